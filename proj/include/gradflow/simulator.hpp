#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradflow/controller.hpp"
#include "gradflow/kinematics.hpp"
#include "gradflow/potential.hpp"

namespace gradflow {

struct SimConfig {
    Potential potential;
    ControllerParams controller;
    State x0{-0.5, -0.5, 0.0};
    State goal{0.0, 0.0, 0.0};
    /// Radius of the full-state stopping ball.
    double goal_tol = 0.05;
    double t_max = 600.0;
    /// RK4 step.
    double h = 5e-4;
    /// Zero-order hold interval of the control.
    double control_period = 5e-4;
    /// Log every n-th control update. Terminal rows are always logged.
    std::int64_t log_stride = 1;
};

struct TrajectoryRow {
    double t = 0.0;
    State x;
    Control u;
    AmplitudeVector a;
    double V = 0.0;
    bool saturated = false;
};

enum class Termination { goal_reached, horizon_exhausted };

inline const char* to_string(Termination t) {
    return t == Termination::goal_reached ? "goal_reached" : "horizon_exhausted";
}

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    Termination terminated = Termination::horizon_exhausted;
    std::optional<double> convergence_time;

    // Statistics over every control update, logged or not.
    double max_abs_u1 = 0.0;
    double max_abs_u2 = 0.0;
    double raw_max_abs_u1 = 0.0;
    double raw_max_abs_u2 = 0.0;
    std::int64_t saturation_count = 0;
    std::int64_t control_updates = 0;

    const TrajectoryRow& front() const { return rows.front(); }
    const TrajectoryRow& back() const { return rows.back(); }
};

/// Thrown when the state leaves the finite range. Carries the last finite row.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, TrajectoryRow last) : std::runtime_error(what), last_valid(last) {}
    TrajectoryRow last_valid;
};

inline bool goal_reached(const State& x, const State& goal, double tol) {
    return std::hypot(x.x1 - goal.x1, x.x2 - goal.x2, x.x3 - goal.x3) <= tol;
}

namespace detail {

/// One classical RK4 step of x' = f(x).
template <class Rhs>
State rk4_step(const State& x, double h, Rhs&& f) {
    const Vec3 y = x.vec();
    const Vec3 k1 = f(x);
    const Vec3 k2 = f(State::from(y + (h / 2.0) * k1));
    const Vec3 k3 = f(State::from(y + (h / 2.0) * k2));
    const Vec3 k4 = f(State::from(y + h * k3));
    return State::from(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// round(num / den) when num is an integer multiple of den within 1e-9, else 0.
inline std::int64_t exact_ratio(double num, double den) {
    const double r = std::round(num / den);
    if (r < 1.0 || std::abs(r * den - num) > 1e-9) return 0;
    return static_cast<std::int64_t>(r);
}

}  // namespace detail

/// Checks the timing invariants of a SimConfig. Throws DomainError.
inline void validate(const SimConfig& cfg) {
    const double eps = cfg.controller.epsilon;
    if (!(cfg.h > 0.0)) throw DomainError("integrator step h must be positive");
    if (!(cfg.control_period >= cfg.h)) throw DomainError("control_period must be >= h");
    if (!(cfg.control_period <= eps * (1.0 + 1e-12))) throw DomainError("control_period must be <= epsilon");
    if (detail::exact_ratio(cfg.control_period, cfg.h) == 0)
        throw DomainError("h must divide control_period");
    if (detail::exact_ratio(eps, cfg.control_period) == 0)
        throw DomainError("control_period must divide epsilon");
    if (!(cfg.goal_tol >= 0.0)) throw DomainError("goal_tol must be nonnegative");
    if (!(cfg.t_max >= 0.0)) throw DomainError("t_max must be nonnegative");
    if (cfg.log_stride < 1) throw DomainError("log_stride must be >= 1");
    if (!cfg.x0.finite() || !cfg.goal.finite()) throw DomainError("x0 and goal must be finite");
}

/// Closed-loop run of the unicycle under the oscillatory feedback.
///
/// The control is computed at t_k = k * control_period and held over the interval,
/// which is covered by control_period / h RK4 steps. In sampling mode the amplitudes
/// are refreshed only at multiples of epsilon; in continuous mode at every update.
/// The phase omega t always uses the absolute time. The run stops at the first update
/// instant inside the goal ball, where the robot halts (zero control is logged), or
/// once t_max is reached.
inline Trajectory simulate(const SimConfig& cfg) {
    validate(cfg);
    const Controller ctrl(cfg.controller);
    const std::int64_t substeps = detail::exact_ratio(cfg.control_period, cfg.h);
    const std::int64_t updates_per_eps = detail::exact_ratio(cfg.controller.epsilon, cfg.control_period);
    const std::int64_t last_update = static_cast<std::int64_t>(std::floor(cfg.t_max / cfg.control_period + 1e-9));
    const bool sampling = cfg.controller.loop_mode == LoopMode::sampling;

    Trajectory traj;
    State x = cfg.x0;
    AmplitudeVector a;
    TrajectoryRow last;

    for (std::int64_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * cfg.control_period;
        if (!sampling || k % updates_per_eps == 0) a = ctrl.amplitudes(cfg.potential, x);

        if (goal_reached(x, cfg.goal, cfg.goal_tol)) {
            traj.rows.push_back({t, x, Control{}, a, cfg.potential.value(x), false});
            traj.terminated = Termination::goal_reached;
            traj.convergence_time = t;
            break;
        }

        const Control raw = ctrl.raw_value(a, t);
        const ClampResult applied = clamp(raw, cfg.controller.bounds);
        ++traj.control_updates;
        traj.raw_max_abs_u1 = std::max(traj.raw_max_abs_u1, std::abs(raw.u1));
        traj.raw_max_abs_u2 = std::max(traj.raw_max_abs_u2, std::abs(raw.u2));
        traj.max_abs_u1 = std::max(traj.max_abs_u1, std::abs(applied.u.u1));
        traj.max_abs_u2 = std::max(traj.max_abs_u2, std::abs(applied.u.u2));
        if (applied.saturated) ++traj.saturation_count;

        last = {t, x, applied.u, a, cfg.potential.value(x), applied.saturated};
        if (k >= last_update) {
            traj.rows.push_back(last);
            traj.terminated = Termination::horizon_exhausted;
            break;
        }
        if (k % cfg.log_stride == 0) traj.rows.push_back(last);

        const Control u = applied.u;
        const auto rhs = [u](const State& s) { return unicycle_rhs(s, u); };
        for (std::int64_t i = 0; i < substeps; ++i) x = detail::rk4_step(x, cfg.h, rhs);
        if (!x.finite())
            throw IntegrationError("state became non-finite after t = " + std::to_string(t), last);
    }
    return traj;
}

/// RK4 integration of x' = -grad V(x) on [0, t_max]. Control columns are zero.
inline Trajectory integrate_gradient_flow(const Potential& V, const State& x0, double t_max, double h,
                                          std::int64_t log_stride = 1) {
    if (!(h > 0.0)) throw DomainError("integrator step h must be positive");
    if (!(t_max >= 0.0)) throw DomainError("t_max must be nonnegative");
    if (log_stride < 1) throw DomainError("log_stride must be >= 1");
    if (!x0.finite()) throw DomainError("x0 must be finite");

    const std::int64_t steps = static_cast<std::int64_t>(std::llround(t_max / h));
    const auto rhs = [&V](const State& s) { return -1.0 * V.gradient(s); };

    Trajectory traj;
    State x = x0;
    for (std::int64_t k = 0;; ++k) {
        const TrajectoryRow row{static_cast<double>(k) * h, x, Control{}, AmplitudeVector{}, V.value(x), false};
        if (k == steps) {
            traj.rows.push_back(row);
            break;
        }
        if (k % log_stride == 0) traj.rows.push_back(row);
        x = detail::rk4_step(x, h, rhs);
        if (!x.finite()) throw IntegrationError("gradient flow became non-finite after t = " + std::to_string(row.t), row);
    }
    traj.terminated = Termination::horizon_exhausted;
    return traj;
}

namespace detail {

/// State of a trajectory at time t by linear interpolation between logged rows.
inline State interpolate(const std::vector<TrajectoryRow>& rows, double t) {
    const auto it = std::lower_bound(rows.begin(), rows.end(), t,
                                     [](const TrajectoryRow& r, double v) { return r.t < v; });
    if (it == rows.begin()) return rows.front().x;
    if (it == rows.end()) return rows.back().x;
    const TrajectoryRow& hi = *it;
    const TrajectoryRow& lo = *(it - 1);
    const double w = (t - lo.t) / (hi.t - lo.t);
    return State::from(lo.x.vec() + w * (hi.x.vec() - lo.x.vec()));
}

}  // namespace detail

/// Maximum state distance between two trajectories over their common time range,
/// sampled at the union of both time grids.
inline double tracking_deviation(const Trajectory& closed_loop, const Trajectory& reference) {
    const auto& a = closed_loop.rows;
    const auto& b = reference.rows;
    if (a.empty() || b.empty()) throw DomainError("tracking_deviation needs nonempty trajectories");
    const double lo = std::max(a.front().t, b.front().t);
    const double hi = std::min(a.back().t, b.back().t);
    if (lo > hi) throw DomainError("trajectories do not overlap in time");

    double worst = 0.0;
    const auto visit = [&](double t) {
        if (t < lo || t > hi) return;
        const Vec3 d = detail::interpolate(a, t).vec() - detail::interpolate(b, t).vec();
        worst = std::max(worst, norm(d));
    };
    for (const auto& r : a) visit(r.t);
    for (const auto& r : b) visit(r.t);
    return worst;
}

}  // namespace gradflow
