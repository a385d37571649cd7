#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gradflow/kinematics.hpp"
#include "gradflow/potential.hpp"

namespace gradflow {

enum class LoopMode { sampling, continuous };

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ControllerParams {
    double epsilon = 1.0;
    double gamma = 0.05;
    double k1 = 0.5;
    double k2 = 8.0;
    VelocityBounds bounds = VelocityBounds::ideal();
    LoopMode loop_mode = LoopMode::continuous;
    /// Skip the k1 k2 = 4 check.
    bool unchecked = false;

    double omega() const { return 2.0 * std::numbers::pi / epsilon; }
};

struct ClampResult {
    Control u;
    bool saturated = false;
};

inline ClampResult clamp(const Control& u, const VelocityBounds& b) {
    if (b.mode == BoundsMode::ideal) return {u, false};
    ClampResult r{u, false};
    if (r.u.u1 > b.u1_max) r.u.u1 = b.u1_max, r.saturated = true;
    if (r.u.u1 < -b.u1_max) r.u.u1 = -b.u1_max, r.saturated = true;
    if (r.u.u2 > b.u2_max) r.u.u2 = b.u2_max, r.saturated = true;
    if (r.u.u2 < -b.u2_max) r.u.u2 = -b.u2_max, r.saturated = true;
    return r;
}

/// Oscillatory time-varying feedback
///
///   u1 = a1 + k1 sqrt(omega |a12|) sign(a12) cos(omega t)
///   u2 = a2 + k2 sqrt(omega |a12|) sin(omega t)
///
/// with omega = 2 pi / epsilon. Immutable once constructed.
class Controller {
public:
    explicit Controller(const ControllerParams& p) : params_(p), omega_(p.omega()) {
        if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon))
            throw DomainError("epsilon must be positive, got " + std::to_string(p.epsilon));
        if (!(p.gamma > 0.0) || !std::isfinite(p.gamma))
            throw DomainError("gamma must be positive, got " + std::to_string(p.gamma));
        if (!(p.k1 > 0.0 && p.k2 > 0.0)) throw DomainError("k1 and k2 must be positive");
        if (!p.unchecked && std::abs(p.k1 * p.k2 - 4.0) > 1e-9)
            throw ValidationError("oscillation coefficients must satisfy k1*k2 = 4, got k1*k2 = " +
                                  std::to_string(p.k1 * p.k2));
        if (p.bounds.mode == BoundsMode::clamp && !(p.bounds.u1_max > 0.0 && p.bounds.u2_max > 0.0))
            throw DomainError("clamped velocity bounds must be positive");
    }

    const ControllerParams& params() const { return params_; }
    double omega() const { return omega_; }

    AmplitudeVector amplitudes(const Potential& V, const State& x) const {
        return amplitude_vector(V, params_.gamma, x);
    }

    /// Control before saturation.
    Control raw_value(const AmplitudeVector& a, double t) const {
        const double mag = std::sqrt(omega_ * std::abs(a.a12));
        const double sgn = (a.a12 > 0.0) - (a.a12 < 0.0);
        const double phase = omega_ * std::fmod(t, params_.epsilon);
        return {a.a1 + params_.k1 * mag * sgn * std::cos(phase), a.a2 + params_.k2 * mag * std::sin(phase)};
    }

    ClampResult value(const AmplitudeVector& a, double t) const { return clamp(raw_value(a, t), params_.bounds); }

private:
    ControllerParams params_;
    double omega_;
};

inline Controller make_controller(const ControllerParams& p) { return Controller(p); }

inline Control control_value(const Controller& c, const AmplitudeVector& a, double t) { return c.value(a, t).u; }

}  // namespace gradflow
