#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gradflow/controller.hpp"
#include "gradflow/potential.hpp"
#include "gradflow/simulator.hpp"

namespace gradflow {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hardware velocity limits of the TurtleBot3 Burger.
inline constexpr double kTurtleBotMaxLinear = 0.22;
inline constexpr double kTurtleBotMaxAngular = 2.84;

struct ExperimentPreset {
    std::string_view name;
    double alpha;
    double k1;
    double k2;
};

inline const std::array<ExperimentPreset, 4>& presets() {
    static const std::array<ExperimentPreset, 4> table{{
        {"P1", 1.0, 0.5, 8.0},
        {"P2", 1.0, 1.0 / std::numbers::sqrt2, 4.0 * std::numbers::sqrt2},
        {"P3", 4.0, 0.5, 8.0},
        {"P4", 10.0, 0.5, 8.0},
    }};
    return table;
}

inline std::optional<ExperimentPreset> find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    return std::nullopt;
}

/// Shared experiment setup: epsilon = 1, gamma = 0.05, start (-0.5, -0.5, 0), goal at
/// the origin, clamped to the hardware limits.
inline SimConfig preset_config(const ExperimentPreset& p) {
    SimConfig cfg;
    cfg.potential = Potential::v_alpha(p.alpha);
    cfg.controller.epsilon = 1.0;
    cfg.controller.gamma = 0.05;
    cfg.controller.k1 = p.k1;
    cfg.controller.k2 = p.k2;
    cfg.controller.bounds = VelocityBounds::clamped(kTurtleBotMaxLinear, kTurtleBotMaxAngular);
    cfg.x0 = {-0.5, -0.5, 0.0};
    cfg.goal = {0.0, 0.0, 0.0};
    return cfg;
}

inline LoopMode parse_loop_mode(std::string_view s) {
    if (s == "sampling") return LoopMode::sampling;
    if (s == "continuous") return LoopMode::continuous;
    throw ConfigError("loop_mode must be 'sampling' or 'continuous', got '" + std::string(s) + "'");
}

inline BoundsMode parse_bounds_mode(std::string_view s) {
    if (s == "ideal") return BoundsMode::ideal;
    if (s == "clamp") return BoundsMode::clamp;
    throw ConfigError("bounds_mode must be 'ideal' or 'clamp', got '" + std::string(s) + "'");
}

/// {"kind":"v_alpha","alpha":4} or {"kind":"quadratic","c":[2,1,1]}.
inline Potential potential_from_json(const nlohmann::json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "v_alpha") return Potential::v_alpha(j.at("alpha").get<double>());
        if (kind == "quadratic") {
            const auto c = j.at("c").get<std::vector<double>>();
            if (c.size() != 3) throw ConfigError("quadratic potential needs exactly three coefficients");
            return Potential::quadratic(c[0], c[1], c[2]);
        }
        throw ConfigError("unknown potential kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad potential spec: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

namespace detail {

inline State state_from_json(const nlohmann::json& j, const char* key) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) throw ConfigError(std::string(key) + " needs three components");
    return {v[0], v[1], v[2]};
}

}  // namespace detail

/// Applies the keys of a JSON config object on top of `cfg`. Unknown keys are errors.
/// A "preset" key, if present, is applied first so the other keys override it.
inline SimConfig apply_config(SimConfig cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        if (j.contains("preset")) {
            const auto name = j.at("preset").get<std::string>();
            const auto p = find_preset(name);
            if (!p) throw ConfigError("unknown preset '" + name + "'");
            cfg = preset_config(*p);
        }
        auto& c = cfg.controller;
        for (const auto& [key, val] : j.items()) {
            if (key == "preset") continue;
            else if (key == "potential") cfg.potential = potential_from_json(val);
            else if (key == "epsilon") c.epsilon = val.get<double>();
            else if (key == "gamma") c.gamma = val.get<double>();
            else if (key == "k1") c.k1 = val.get<double>();
            else if (key == "k2") c.k2 = val.get<double>();
            else if (key == "u1_max") c.bounds.u1_max = val.get<double>();
            else if (key == "u2_max") c.bounds.u2_max = val.get<double>();
            else if (key == "bounds_mode") c.bounds.mode = parse_bounds_mode(val.get<std::string>());
            else if (key == "loop_mode") c.loop_mode = parse_loop_mode(val.get<std::string>());
            else if (key == "x0") cfg.x0 = detail::state_from_json(val, "x0");
            else if (key == "goal") cfg.goal = detail::state_from_json(val, "goal");
            else if (key == "goal_tol") cfg.goal_tol = val.get<double>();
            else if (key == "t_max") cfg.t_max = val.get<double>();
            else if (key == "h") cfg.h = val.get<double>();
            else if (key == "control_period") cfg.control_period = val.get<double>();
            else if (key == "log_stride") cfg.log_stride = val.get<std::int64_t>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return cfg;
}

}  // namespace gradflow
