#pragma once

#include <functional>
#include <random>
#include <string>
#include <utility>

#include "gradflow/kinematics.hpp"

namespace gradflow {

/// Central finite-difference gradient of f at x.
template <class F>
Vec3 finite_difference_gradient(F&& f, const State& x, double step = 1e-5) {
    Vec3 g{};
    const Vec3 base = x.vec();
    for (int i = 0; i < 3; ++i) {
        Vec3 plus = base, minus = base;
        plus[i] += step;
        minus[i] -= step;
        g[i] = (f(State::from(plus)) - f(State::from(minus))) / (2.0 * step);
    }
    return g;
}

enum class PotentialKind { quadratic, v_alpha, custom };

/// A C^2 Lyapunov function candidate with analytic gradient.
///
/// Quadratic and V_alpha potentials are diagonal forms c1 x1^2 + c2 x2^2 + c3 x3^2;
/// V_alpha is the quadratic form with c = (alpha, 1/alpha, alpha). Custom potentials
/// carry user callables whose gradient is checked against finite differences when
/// constructed. Instances are immutable.
class Potential {
public:
    using ValueFn = std::function<double(const State&)>;
    using GradientFn = std::function<Vec3(const State&)>;

    static Potential quadratic(double c1, double c2, double c3) {
        if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0))
            throw DomainError("quadratic potential needs positive coefficients");
        Potential p;
        p.kind_ = PotentialKind::quadratic;
        p.coeffs_ = {c1, c2, c3};
        return p;
    }

    /// alpha (x1^2 + x3^2) + x2^2 / alpha. alpha = 1 is the sum of squares.
    static Potential v_alpha(double alpha) {
        if (!(alpha >= 1.0)) throw DomainError("V_alpha needs alpha >= 1, got " + std::to_string(alpha));
        Potential p;
        p.kind_ = PotentialKind::v_alpha;
        p.alpha_ = alpha;
        p.coeffs_ = {alpha, 1.0 / alpha, alpha};
        return p;
    }

    /// Validates `gradient` against central differences of `value` at `checks` seeded
    /// points in [-1, 1]^3. Throws DomainError on mismatch above `tol`.
    static Potential custom(ValueFn value, GradientFn gradient, int checks = 16, double tol = 1e-6) {
        if (!value || !gradient) throw DomainError("custom potential needs both value and gradient");
        std::mt19937_64 rng(0x5eedULL);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int k = 0; k < checks; ++k) {
            const State x{dist(rng), dist(rng), dist(rng)};
            const Vec3 fd = finite_difference_gradient(value, x);
            const Vec3 g = gradient(x);
            for (int i = 0; i < 3; ++i) {
                if (!(std::abs(fd[i] - g[i]) <= tol * (1.0 + std::abs(g[i]))))
                    throw DomainError("custom potential gradient does not match its value (component " +
                                      std::to_string(i + 1) + ")");
            }
        }
        Potential p;
        p.kind_ = PotentialKind::custom;
        p.value_ = std::move(value);
        p.gradient_ = std::move(gradient);
        return p;
    }

    /// c V for c > 0. Keeps the kind; only the overall factor changes.
    Potential scaled(double c) const {
        if (!(c > 0.0)) throw DomainError("potential scale must be positive");
        Potential p = *this;
        p.scale_ *= c;
        return p;
    }

    double value(const State& x) const {
        if (kind_ == PotentialKind::custom) return scale_ * value_(x);
        return scale_ * (coeffs_[0] * x.x1 * x.x1 + coeffs_[1] * x.x2 * x.x2 + coeffs_[2] * x.x3 * x.x3);
    }

    /// Gradient as an ordinary 3-vector (the row/column distinction is notational).
    Vec3 gradient(const State& x) const {
        if (kind_ == PotentialKind::custom) return scale_ * gradient_(x);
        const double s = 2.0 * scale_;
        return {s * coeffs_[0] * x.x1, s * coeffs_[1] * x.x2, s * coeffs_[2] * x.x3};
    }

    PotentialKind kind() const { return kind_; }
    double scale() const { return scale_; }
    /// Effective diagonal coefficients including the scale. Zero for custom potentials.
    Vec3 coefficients() const {
        if (kind_ == PotentialKind::custom) return {0.0, 0.0, 0.0};
        return scale_ * coeffs_;
    }
    double alpha() const { return alpha_; }

    std::string describe() const {
        switch (kind_) {
            case PotentialKind::v_alpha: return "v_alpha(" + std::to_string(alpha_) + ")";
            case PotentialKind::quadratic:
                return "quadratic(" + std::to_string(coeffs_[0]) + "," + std::to_string(coeffs_[1]) + "," +
                       std::to_string(coeffs_[2]) + ")";
            case PotentialKind::custom: return "custom";
        }
        return "unknown";
    }

    /// Sum of squares.
    Potential() = default;

private:
    PotentialKind kind_ = PotentialKind::quadratic;
    Vec3 coeffs_{1.0, 1.0, 1.0};
    double alpha_ = 0.0;
    double scale_ = 1.0;
    ValueFn value_;
    GradientFn gradient_;
};

inline Potential make_quadratic(double c1, double c2, double c3) { return Potential::quadratic(c1, c2, c3); }

inline Potential make_v_alpha(double alpha) { return Potential::v_alpha(alpha); }

/// Amplitudes of the drift (a1, a2) and bracket-direction (a12) components.
struct AmplitudeVector {
    double a1 = 0.0;
    double a2 = 0.0;
    double a12 = 0.0;

    Vec3 vec() const { return {a1, a2, a12}; }
    friend constexpr bool operator==(const AmplitudeVector&, const AmplitudeVector&) = default;
};

/// a(x) = -gamma F^{-1}(x) grad V(x), written out componentwise.
inline AmplitudeVector amplitude_vector(const Potential& V, double gamma, const State& x) {
    const Vec3 g = V.gradient(x);
    const double c = std::cos(x.x3);
    const double s = std::sin(x.x3);
    return {-gamma * (g[0] * c + g[1] * s), -gamma * g[2], -gamma * (g[0] * s - g[1] * c)};
}

/// Same quantity through the frame inverse matrix product.
inline AmplitudeVector amplitude_vector_matrix(const Potential& V, double gamma, const State& x) {
    const Vec3 a = -gamma * (frame_inverse(x) * V.gradient(x));
    return {a[0], a[1], a[2]};
}

}  // namespace gradflow
