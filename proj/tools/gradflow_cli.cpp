// Command-line front end: closed-loop simulation, admissibility quadrature,
// epsilon-refinement study, gradient-flow reference runs and SVG plots.
//
// Exit codes: 0 success, 1 property check failed, 2 usage or config error,
// 3 runtime or integration error.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gradflow/admissibility.hpp"
#include "gradflow/config.hpp"
#include "gradflow/simulator.hpp"
#include "gradflow/svg_plot.hpp"
#include "gradflow/trajectory_csv.hpp"

namespace {

using namespace gradflow;
using nlohmann::json;

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kRuntime = 3 };

/// Thrown for bad flags that CLI11 itself cannot catch.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size())
            throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

State parse_state(const std::string& text, const char* flag) {
    const auto v = parse_list(text, flag);
    if (v.size() != 3) throw UsageError(std::string(flag) + " needs three comma-separated values");
    return {v[0], v[1], v[2]};
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    return os;
}

json state_json(const State& x) { return json::array({x.x1, x.x2, x.x3}); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Potential selection shared by several subcommands.
struct PotentialFlags {
    std::optional<double> v_alpha;
    std::string quadratic;
    std::string potential_json;

    void attach(CLI::App* app) {
        app->add_option("--v-alpha", v_alpha, "V_alpha potential with the given alpha (>= 1)");
        app->add_option("--quadratic", quadratic, "diagonal quadratic potential c1,c2,c3");
        app->add_option("--potential-json", potential_json, R"(potential spec, e.g. {"kind":"v_alpha","alpha":4})");
    }

    std::optional<Potential> get() const {
        const int given = v_alpha.has_value() + !quadratic.empty() + !potential_json.empty();
        if (given > 1) throw UsageError("choose one of --v-alpha, --quadratic, --potential-json");
        if (v_alpha) return Potential::v_alpha(*v_alpha);
        if (!quadratic.empty()) {
            const auto c = parse_list(quadratic, "--quadratic");
            if (c.size() != 3) throw UsageError("--quadratic needs three coefficients");
            return Potential::quadratic(c[0], c[1], c[2]);
        }
        if (!potential_json.empty()) return potential_from_json(json::parse(potential_json));
        return std::nullopt;
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    std::string preset;
    std::string config_path;
    std::string mode;
    std::string bounds;
    std::string out = "trajectory.csv";
    std::string x0;
    std::optional<double> epsilon, gamma, k1, k2, t_max, h, control_period, goal_tol;
    std::optional<std::int64_t> log_stride;
    PotentialFlags potential;
};

SimConfig resolve(const SimulateOptions& o) {
    SimConfig cfg;
    // Default for file output: one row per 10 ms of a 0.5 ms control loop.
    cfg.log_stride = 20;
    if (!o.preset.empty()) {
        const auto p = find_preset(o.preset);
        if (!p) throw ConfigError("unknown preset '" + o.preset + "' (expected P1, P2, P3 or P4)");
        cfg = preset_config(*p);
        cfg.log_stride = 20;
    }
    if (!o.config_path.empty()) {
        std::ifstream is(o.config_path);
        if (!is) throw ConfigError("cannot read config '" + o.config_path + "'");
        json j;
        try {
            j = json::parse(is);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        cfg = apply_config(cfg, j);
    }
    auto& c = cfg.controller;
    if (!o.mode.empty()) c.loop_mode = parse_loop_mode(o.mode);
    if (!o.bounds.empty()) c.bounds.mode = parse_bounds_mode(o.bounds);
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.gamma) c.gamma = *o.gamma;
    if (o.k1) c.k1 = *o.k1;
    if (o.k2) c.k2 = *o.k2;
    if (o.t_max) cfg.t_max = *o.t_max;
    if (o.h) cfg.h = *o.h;
    if (o.control_period) cfg.control_period = *o.control_period;
    if (o.goal_tol) cfg.goal_tol = *o.goal_tol;
    if (o.log_stride) cfg.log_stride = *o.log_stride;
    if (!o.x0.empty()) cfg.x0 = parse_state(o.x0, "--x0");
    if (auto V = o.potential.get()) cfg.potential = *V;
    return cfg;
}

int run_simulate(const SimulateOptions& o) {
    const SimConfig cfg = resolve(o);
    make_controller(cfg.controller);
    validate(cfg);

    const Trajectory tr = simulate(cfg);
    {
        auto os = open_output(o.out);
        write_trajectory_csv(os, tr);
    }
    const auto& first = tr.front();
    const auto& last = tr.back();
    const json summary{
        {"preset", o.preset.empty() ? json(nullptr) : json(o.preset)},
        {"potential", cfg.potential.describe()},
        {"loop_mode", cfg.controller.loop_mode == LoopMode::sampling ? "sampling" : "continuous"},
        {"bounds_mode", cfg.controller.bounds.mode == BoundsMode::clamp ? "clamp" : "ideal"},
        {"terminated", to_string(tr.terminated)},
        {"convergence_time", optional_json(tr.convergence_time)},
        {"t_end", last.t},
        {"final_state", state_json(last.x)},
        {"final_heading_wrapped", wrap_angle(last.x.x3)},
        {"final_distance", norm(last.x.vec() - cfg.goal.vec())},
        {"V_start", first.V},
        {"V_end", last.V},
        {"max_abs_u1", tr.max_abs_u1},
        {"max_abs_u2", tr.max_abs_u2},
        {"raw_max_abs_u1", tr.raw_max_abs_u1},
        {"raw_max_abs_u2", tr.raw_max_abs_u2},
        {"saturation_count", tr.saturation_count},
        {"control_updates", tr.control_updates},
        {"rows", tr.rows.size()},
        {"csv", o.out},
    };
    std::cout << summary.dump() << '\n';
    return kOk;
}

// ----------------------------------------------------------- admissibility

struct AdmissibilityOptions {
    bool table1 = false;
    std::string v_alpha_list;
    PotentialFlags potential;
    std::string domain;
    double q = 2.0;
    std::string method = "midpoint";
    int grid = 200;
    std::int64_t samples = 1'000'000;
    std::optional<std::uint64_t> seed;
    unsigned jobs = default_jobs();
    double grad_floor = 1e-12;
    std::string out;
    bool check = false;
};

int run_admissibility(const AdmissibilityOptions& o) {
    AdmissibilityConfig cfg;
    cfg.q = o.q;
    if (o.method == "midpoint") cfg.method = QuadratureMethod::midpoint;
    else if (o.method == "monte_carlo") cfg.method = QuadratureMethod::monte_carlo;
    else throw UsageError("--method must be midpoint or monte_carlo");
    cfg.grid_n = o.grid;
    cfg.samples = o.samples;
    cfg.jobs = std::max(1u, o.jobs);
    cfg.grad_floor = o.grad_floor;
    if (const char* env = std::getenv("GRADFLOW_SEED")) {
        try {
            cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("GRADFLOW_SEED is not an unsigned integer: '") + env + "'");
        }
    }
    if (o.seed) cfg.seed = *o.seed;
    if (!(cfg.q > 0.0)) throw UsageError("--q must be positive");

    BoxDomain X = BoxDomain::cube(1.0);
    if (!o.domain.empty()) {
        const auto d = parse_list(o.domain, "--domain");
        if (d.size() != 6) throw UsageError("--domain needs lo1,hi1,lo2,hi2,lo3,hi3");
        X = BoxDomain({d[0], d[2], d[4]}, {d[1], d[3], d[5]});
    }

    struct Job {
        Potential V;
        std::optional<double> reference;
    };
    std::vector<Job> jobs;
    if (o.table1) {
        if (cfg.q != 2.0 || !o.domain.empty()) throw UsageError("--table1 is defined for q = 2 on [-1,1]^3");
        for (const auto& [c, ref] : kTable1Reference) jobs.push_back({Potential::quadratic(c[0], c[1], c[2]), ref});
    }
    if (!o.v_alpha_list.empty()) {
        for (double a : parse_list(o.v_alpha_list, "--v-alpha")) {
            std::optional<double> ref;
            for (const auto& [alpha, value] : kVAlphaReference)
                if (alpha == a && cfg.q == 2.0 && o.domain.empty()) ref = value;
            jobs.push_back({Potential::v_alpha(a), ref});
        }
    }
    if (auto V = o.potential.get()) jobs.push_back({*V, std::nullopt});
    if (jobs.empty()) throw UsageError("nothing to evaluate: give --table1, --v-alpha, --quadratic or --potential-json");

    std::ofstream file;
    if (!o.out.empty()) file = open_output(o.out);
    std::ostream& os = o.out.empty() ? std::cout : file;
    os << kSweepHeader << '\n';

    bool ok = true;
    for (const auto& job : jobs) {
        const AdmissibilityResult r = admissibility_measure(job.V, X, cfg);
        write_sweep_row(os, job.V.coefficients(), cfg.q, r);
        if (o.check && job.reference && std::abs(r.J - *job.reference) > 0.005) {
            std::cerr << "check failed: " << job.V.describe() << " J = " << r.J << ", reference "
                      << *job.reference << '\n';
            ok = false;
        }
    }
    return ok ? kOk : kCheckFailed;
}

// ------------------------------------------------------------------ refine

struct RefineOptions {
    PotentialFlags potential;
    std::string eps_list;
    double horizon = 2.0;
    std::string mode = "continuous";
    double gamma = 0.05;
    double k1 = 0.5;
    double k2 = 8.0;
    double h = 5e-4;
    double control_period = 5e-4;
    std::string x0 = "-0.5,-0.5,0";
    unsigned jobs = default_jobs();
};

int run_refine(const RefineOptions& o) {
    const auto eps = parse_list(o.eps_list, "--eps");
    if (eps.empty()) throw UsageError("--eps needs at least one value");
    for (std::size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1])) throw UsageError("--eps must be strictly descending");
    if (!(o.horizon > 0.0)) throw UsageError("--horizon must be positive");

    const Potential V = o.potential.get().value_or(Potential::v_alpha(1.0));
    const State x0 = parse_state(o.x0, "--x0");
    // The averaged closed loop follows x' = -gamma grad V, i.e. the gradient flow of gamma V.
    const Trajectory reference = integrate_gradient_flow(V.scaled(o.gamma), x0, o.horizon, o.h);

    std::vector<SimConfig> cfgs;
    for (double e : eps) {
        SimConfig cfg;
        cfg.potential = V;
        cfg.x0 = x0;
        cfg.goal_tol = 0.0;
        cfg.t_max = o.horizon;
        cfg.h = o.h;
        cfg.control_period = o.control_period;
        cfg.controller.epsilon = e;
        cfg.controller.gamma = o.gamma;
        cfg.controller.k1 = o.k1;
        cfg.controller.k2 = o.k2;
        cfg.controller.loop_mode = parse_loop_mode(o.mode);
        cfg.controller.bounds = VelocityBounds::ideal();
        make_controller(cfg.controller);
        validate(cfg);
        cfgs.push_back(cfg);
    }

    std::vector<double> dev(cfgs.size());
    parallel_for(cfgs.size(), std::max(1u, o.jobs),
                 [&](std::size_t i) { dev[i] = tracking_deviation(simulate(cfgs[i]), reference); });

    std::cout << "epsilon,deviation\n";
    bool monotone = true;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        std::cout << format_g9(eps[i]) << ',' << format_g9(dev[i]) << '\n';
        if (i > 0 && dev[i] > dev[i - 1]) monotone = false;
    }
    if (!monotone) std::cerr << "deviation is not non-increasing as epsilon decreases\n";
    return monotone ? kOk : kCheckFailed;
}

// ----------------------------------------------------------- gradient-flow

struct GradientFlowOptions {
    PotentialFlags potential;
    std::string x0 = "-0.5,-0.5,0";
    double t_max = 10.0;
    double h = 1e-3;
    double scale = 1.0;
    std::int64_t log_stride = 1;
    std::string out = "gradient_flow.csv";
};

int run_gradient_flow(const GradientFlowOptions& o) {
    const Potential V = o.potential.get().value_or(Potential::v_alpha(1.0)).scaled(o.scale);
    const Trajectory tr = integrate_gradient_flow(V, parse_state(o.x0, "--x0"), o.t_max, o.h, o.log_stride);
    {
        auto os = open_output(o.out);
        write_trajectory_csv(os, tr);
    }
    const json summary{{"potential", V.describe()},
                       {"t_end", tr.back().t},
                       {"final_state", state_json(tr.back().x)},
                       {"V_start", tr.front().V},
                       {"V_end", tr.back().V},
                       {"rows", tr.rows.size()},
                       {"csv", o.out}};
    std::cout << summary.dump() << '\n';
    return kOk;
}

// -------------------------------------------------------------------- plot

struct PlotOptions {
    std::string csv;
    std::string svg;
};

int run_plot(const PlotOptions& o) {
    std::ifstream is(o.csv, std::ios::binary);
    if (!is) throw ConfigError("cannot read '" + o.csv + "'");
    Trajectory tr;
    try {
        tr = read_trajectory_csv(is);
    } catch (const FormatError& e) {
        throw ConfigError(o.csv + ": " + e.what());
    }
    auto os = open_output(o.svg);
    write_trajectory_svg(os, tr);
    std::cout << json{{"rows", tr.rows.size()}, {"svg", o.svg}}.dump() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Oscillatory feedback for the unicycle: simulation and gradient-flow admissibility"};
    app.require_subcommand(1);
    // "-h" is left free so that "--h" can name the integration step.
    app.set_help_flag("--help", "print this help message and exit");

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "closed-loop run, writes a trajectory CSV and prints a JSON summary");
    s->add_option("--preset", sim.preset, "P1, P2, P3 or P4");
    s->add_option("--config", sim.config_path, "JSON config file");
    s->add_option("--mode", sim.mode, "sampling or continuous");
    s->add_option("--bounds", sim.bounds, "ideal or clamp");
    s->add_option("--out", sim.out, "trajectory CSV path")->capture_default_str();
    s->add_option("--x0", sim.x0, "initial state x1,x2,x3");
    s->add_option("--epsilon", sim.epsilon);
    s->add_option("--gamma", sim.gamma);
    s->add_option("--k1", sim.k1);
    s->add_option("--k2", sim.k2);
    s->add_option("--t-max", sim.t_max);
    s->add_option("--h", sim.h, "RK4 step");
    s->add_option("--control-period", sim.control_period, "zero-order hold interval");
    s->add_option("--goal-tol", sim.goal_tol);
    s->add_option("--log-stride", sim.log_stride, "log every n-th control update");
    sim.potential.attach(s);

    AdmissibilityOptions adm;
    auto* a = app.add_subcommand("admissibility", "admissibility measure of gradient flows, CSV to stdout or --out");
    a->add_flag("--table1", adm.table1, "the seven tabulated quadratic forms");
    a->add_option("--v-alpha", adm.v_alpha_list, "comma-separated alphas");
    a->add_option("--quadratic", adm.potential.quadratic, "c1,c2,c3");
    a->add_option("--potential-json", adm.potential.potential_json);
    a->add_option("--domain", adm.domain, "lo1,hi1,lo2,hi2,lo3,hi3 (default [-1,1]^3)");
    a->add_option("--q", adm.q, "exponent, > 0")->capture_default_str();
    a->add_option("--method", adm.method, "midpoint or monte_carlo")->capture_default_str();
    a->add_option("--grid", adm.grid, "midpoint cells per axis (even)")->capture_default_str();
    a->add_option("--samples", adm.samples, "Monte-Carlo sample count")->capture_default_str();
    a->add_option("--seed", adm.seed, "Monte-Carlo seed (overrides GRADFLOW_SEED)");
    a->add_option("--grad-floor", adm.grad_floor)->capture_default_str();
    a->add_option("--jobs", adm.jobs, "worker threads")->capture_default_str();
    a->add_option("--out", adm.out, "CSV path");
    a->add_flag("--check", adm.check, "exit 1 if a reference value is missed by more than 0.005");

    RefineOptions ref;
    auto* r = app.add_subcommand("refine", "tracking deviation from the gradient flow for decreasing epsilon");
    ref.potential.attach(r);
    r->add_option("--eps", ref.eps_list, "descending comma-separated epsilons")->required();
    r->add_option("--horizon", ref.horizon)->capture_default_str();
    r->add_option("--mode", ref.mode)->capture_default_str();
    r->add_option("--gamma", ref.gamma)->capture_default_str();
    r->add_option("--k1", ref.k1)->capture_default_str();
    r->add_option("--k2", ref.k2)->capture_default_str();
    r->add_option("--h", ref.h)->capture_default_str();
    r->add_option("--control-period", ref.control_period)->capture_default_str();
    r->add_option("--x0", ref.x0)->capture_default_str();
    r->add_option("--jobs", ref.jobs)->capture_default_str();

    GradientFlowOptions gf;
    auto* g = app.add_subcommand("gradient-flow", "RK4 integration of x' = -scale * grad V(x)");
    gf.potential.attach(g);
    g->add_option("--x0", gf.x0)->capture_default_str();
    g->add_option("--t-max", gf.t_max)->capture_default_str();
    g->add_option("--h", gf.h)->capture_default_str();
    g->add_option("--scale", gf.scale, "multiplies V, e.g. the controller gain")->capture_default_str();
    g->add_option("--log-stride", gf.log_stride)->capture_default_str();
    g->add_option("--out", gf.out)->capture_default_str();

    PlotOptions plot;
    auto* p = app.add_subcommand("plot", "three-panel SVG of a trajectory CSV");
    p->add_option("csv", plot.csv, "trajectory CSV")->required();
    p->add_option("svg", plot.svg, "output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (s->parsed()) return run_simulate(sim);
        if (a->parsed()) return run_admissibility(adm);
        if (r->parsed()) return run_refine(ref);
        if (g->parsed()) return run_gradient_flow(gf);
        if (p->parsed()) return run_plot(plot);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IntegrationError& e) {
        std::cerr << "integration failed: " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
