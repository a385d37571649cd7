#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gradflow {

using Vec3 = std::array<double, 3>;

/// Row-major 3x3 matrix.
using Mat3 = std::array<Vec3, 3>;

/// Unicycle configuration. The heading is kept unwrapped.
struct State {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    constexpr Vec3 vec() const { return {x1, x2, x3}; }
    static constexpr State from(const Vec3& v) { return {v[0], v[1], v[2]}; }

    bool finite() const { return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3); }

    friend constexpr bool operator==(const State&, const State&) = default;
};

/// Translational (u1) and angular (u2) velocity.
struct Control {
    double u1 = 0.0;
    double u2 = 0.0;

    friend constexpr bool operator==(const Control&, const Control&) = default;
};

enum class BoundsMode { ideal, clamp };

struct VelocityBounds {
    double u1_max = 0.22;
    double u2_max = 2.84;
    BoundsMode mode = BoundsMode::ideal;

    /// No clamping. The limits are retained but unused.
    static constexpr VelocityBounds ideal() { return {0.22, 2.84, BoundsMode::ideal}; }
    static constexpr VelocityBounds clamped(double u1_max, double u2_max) {
        return {u1_max, u2_max, BoundsMode::clamp};
    }
};

/// TurtleBot3 Burger wheel separation (m).
inline constexpr double kDefaultWheelSeparation = 0.160;

struct WheelSpeeds {
    double v_l = 0.0;
    double v_r = 0.0;
    double d = kDefaultWheelSeparation;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Small vector helpers shared by the other modules.

inline constexpr double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

inline constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline constexpr Vec3 operator*(const Mat3& m, const Vec3& v) { return {dot(m[0], v), dot(m[1], v), dot(m[2], v)}; }

inline constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    return r;
}

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct VectorFields {
    Vec3 f1;
    Vec3 f2;
};

/// f1 = (cos x3, sin x3, 0) drives forward, f2 = (0, 0, 1) turns.
inline VectorFields vector_fields(const State& x) {
    return {{std::cos(x.x3), std::sin(x.x3), 0.0}, {0.0, 0.0, 1.0}};
}

/// [f1, f2](x) = Df2 f1 - Df1 f2. Df2 vanishes, so only the x3 column of Df1 contributes.
inline Vec3 lie_bracket(const State& x) { return {std::sin(x.x3), -std::cos(x.x3), 0.0}; }

/// F(x) with columns f1, f2, [f1, f2].
inline Mat3 frame_matrix(const State& x) {
    const double c = std::cos(x.x3);
    const double s = std::sin(x.x3);
    return {{{c, 0.0, s}, {s, 0.0, -c}, {0.0, 1.0, 0.0}}};
}

/// Closed-form inverse of frame_matrix. F is orthogonal, so this is its transpose.
inline Mat3 frame_inverse(const State& x) {
    const double c = std::cos(x.x3);
    const double s = std::sin(x.x3);
    return {{{c, s, 0.0}, {0.0, 0.0, 1.0}, {s, -c, 0.0}}};
}

/// Right-hand side of the unicycle: u1 f1(x) + u2 f2(x).
inline Vec3 unicycle_rhs(const State& x, const Control& u) {
    return {u.u1 * std::cos(x.x3), u.u1 * std::sin(x.x3), u.u2};
}

inline Control diff_drive_to_unicycle(const WheelSpeeds& w) {
    if (!(w.d > 0.0)) throw DomainError("wheel separation must be positive, got " + std::to_string(w.d));
    return {(w.v_r + w.v_l) / 2.0, (w.v_r - w.v_l) / w.d};
}

inline WheelSpeeds unicycle_to_diff_drive(const Control& u, double d = kDefaultWheelSeparation) {
    if (!(d > 0.0)) throw DomainError("wheel separation must be positive, got " + std::to_string(d));
    const double half = u.u2 * d / 2.0;
    return {u.u1 - half, u.u1 + half, d};
}

/// Heading wrapped to (-pi, pi], for reporting only.
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(a, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

}  // namespace gradflow
