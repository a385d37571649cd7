#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gradflow/kinematics.hpp"
#include "gradflow/parallel.hpp"
#include "gradflow/potential.hpp"

namespace gradflow {

class DegeneratePotentialError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Axis-aligned box [lo, hi] in state space.
class BoxDomain {
public:
    BoxDomain(const Vec3& lo, const Vec3& hi) : lo_(lo), hi_(hi) {
        for (int i = 0; i < 3; ++i) {
            if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
                throw DomainError("box domain needs finite lo < hi on every axis");
        }
    }

    /// [-half, half]^3.
    static BoxDomain cube(double half) { return BoxDomain({-half, -half, -half}, {half, half, half}); }

    const Vec3& lo() const { return lo_; }
    const Vec3& hi() const { return hi_; }
    double side(int i) const { return hi_[i] - lo_[i]; }
    double measure() const { return side(0) * side(1) * side(2); }

private:
    Vec3 lo_;
    Vec3 hi_;
};

enum class QuadratureMethod { midpoint, monte_carlo };

inline const char* to_string(QuadratureMethod m) {
    return m == QuadratureMethod::midpoint ? "midpoint" : "monte_carlo";
}

struct AdmissibilityConfig {
    double q = 2.0;
    QuadratureMethod method = QuadratureMethod::midpoint;
    /// Cells per axis for the midpoint rule. Even, so no cell center sits on a
    /// coordinate plane through the origin.
    int grid_n = 200;
    std::int64_t samples = 1'000'000;
    std::uint64_t seed = 20240601;
    /// Points with |grad V| <= grad_floor contribute zero and are counted as excluded.
    double grad_floor = 1e-12;
    unsigned jobs = 1;
};

struct AdmissibilityResult {
    double J = 0.0;
    /// Standard error of the Monte-Carlo mean; 0 for the midpoint rule.
    double std_error = 0.0;
    std::int64_t points = 0;
    std::int64_t excluded = 0;
    QuadratureMethod method = QuadratureMethod::midpoint;
};

/// Distance from -p to span{f1(x), f2(x)}, in closed form |p1 sin x3 - p2 cos x3|.
inline double rho(const State& x, const Vec3& p) {
    return std::abs(p[0] * std::sin(x.x3) - p[1] * std::cos(x.x3));
}

/// Independent estimate of inf_u |u1 f1(x) + u2 f2(x) + p| by nested grid search over
/// u in [-coarse_range, coarse_range]^2. Each refinement recenters on the best point
/// and shrinks the half-width tenfold.
inline double rho_bruteforce(const State& x, const Vec3& p, double coarse_range, int refine_iters = 4,
                             int grid = 51) {
    if (!(coarse_range >= norm(p))) throw DomainError("coarse_range must be >= |p|");
    if (grid < 3 || grid % 2 == 0) throw DomainError("grid must be odd and >= 3");
    const auto [f1, f2] = vector_fields(x);
    const auto residual = [&](double u1, double u2) { return norm(u1 * f1 + u2 * f2 + p); };

    const int half = grid / 2;
    double c1 = 0.0, c2 = 0.0, r = coarse_range;
    double best = residual(0.0, 0.0);
    for (int level = 0; level <= refine_iters; ++level) {
        double b1 = c1, b2 = c2;
        for (int i = -half; i <= half; ++i) {
            const double u1 = c1 + r * i / half;
            for (int j = -half; j <= half; ++j) {
                const double u2 = c2 + r * j / half;
                const double v = residual(u1, u2);
                if (v < best) best = v, b1 = u1, b2 = u2;
            }
        }
        c1 = b1, c2 = b2;
        r /= 10.0;
    }
    return best;
}

namespace detail {

/// rho(x, g)^q / |g|^q with sin/cos of x3 supplied by the caller.
inline double admissibility_integrand(const Vec3& g, double s, double c, double q) {
    const double r = std::abs(g[0] * s - g[1] * c) / norm(g);
    return q == 2.0 ? r * r : std::pow(r, q);
}

inline void check(const AdmissibilityConfig& cfg) {
    if (!(cfg.q > 0.0) || !std::isfinite(cfg.q)) throw DomainError("q must be positive");
    if (cfg.method == QuadratureMethod::midpoint && (cfg.grid_n < 2 || cfg.grid_n % 2 != 0))
        throw DomainError("grid_n must be even and >= 2");
    if (cfg.method == QuadratureMethod::monte_carlo && cfg.samples < 1)
        throw DomainError("samples must be >= 1");
    if (!(cfg.grad_floor >= 0.0)) throw DomainError("grad_floor must be nonnegative");
}

struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t excluded = 0;
};

inline constexpr std::int64_t kMonteCarloChunk = 1 << 16;

inline AdmissibilityResult midpoint(const Potential& V, const BoxDomain& X, const AdmissibilityConfig& cfg) {
    const int n = cfg.grid_n;
    std::array<std::vector<double>, 3> centers;
    for (int axis = 0; axis < 3; ++axis) {
        const double dx = X.side(axis) / n;
        centers[axis].resize(n);
        for (int i = 0; i < n; ++i) centers[axis][i] = X.lo()[axis] + (i + 0.5) * dx;
    }
    std::vector<double> sin3(n), cos3(n);
    for (int k = 0; k < n; ++k) sin3[k] = std::sin(centers[2][k]), cos3[k] = std::cos(centers[2][k]);

    // One partial per x1 slab, reduced in slab order.
    std::vector<Partial> slabs(n);
    parallel_for(static_cast<std::size_t>(n), cfg.jobs, [&](std::size_t i) {
        Partial part;
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const Vec3 g = V.gradient({centers[0][i], centers[1][j], centers[2][k]});
                if (norm(g) <= cfg.grad_floor) {
                    ++part.excluded;
                    continue;
                }
                part.sum += admissibility_integrand(g, sin3[k], cos3[k], cfg.q);
            }
        }
        slabs[i] = part;
    });

    AdmissibilityResult res;
    res.method = QuadratureMethod::midpoint;
    res.points = static_cast<std::int64_t>(n) * n * n;
    double sum = 0.0;
    for (const auto& s : slabs) sum += s.sum, res.excluded += s.excluded;
    if (res.excluded == res.points) throw DegeneratePotentialError("gradient vanishes at every quadrature point");
    // Cell volume / mu(X) = 1 / n^3.
    res.J = sum / static_cast<double>(res.points);
    return res;
}

inline AdmissibilityResult monte_carlo(const Potential& V, const BoxDomain& X, const AdmissibilityConfig& cfg) {
    const std::int64_t total = cfg.samples;
    const std::int64_t chunks = (total + kMonteCarloChunk - 1) / kMonteCarloChunk;
    std::vector<Partial> parts(static_cast<std::size_t>(chunks));

    // Chunk c always draws from a generator seeded by (seed, c), whichever thread runs it.
    parallel_for(static_cast<std::size_t>(chunks), cfg.jobs, [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const std::int64_t begin = static_cast<std::int64_t>(c) * kMonteCarloChunk;
        const std::int64_t end = std::min(total, begin + kMonteCarloChunk);
        Partial part;
        for (std::int64_t s = begin; s < end; ++s) {
            State x;
            x.x1 = X.lo()[0] + X.side(0) * unit(rng);
            x.x2 = X.lo()[1] + X.side(1) * unit(rng);
            x.x3 = X.lo()[2] + X.side(2) * unit(rng);
            const Vec3 g = V.gradient(x);
            if (norm(g) <= cfg.grad_floor) {
                ++part.excluded;
                continue;
            }
            const double v = admissibility_integrand(g, std::sin(x.x3), std::cos(x.x3), cfg.q);
            part.sum += v;
            part.sum_sq += v * v;
        }
        parts[c] = part;
    });

    AdmissibilityResult res;
    res.method = QuadratureMethod::monte_carlo;
    res.points = total;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& p : parts) sum += p.sum, sum_sq += p.sum_sq, res.excluded += p.excluded;
    if (res.excluded == res.points) throw DegeneratePotentialError("gradient vanishes at every sample");
    const double n = static_cast<double>(total);
    res.J = sum / n;
    if (total > 1) {
        const double var = std::max(0.0, (sum_sq - n * res.J * res.J) / (n - 1.0));
        res.std_error = std::sqrt(var / n);
    }
    return res;
}

}  // namespace detail

/// Average over X of (rho(x, grad V(x)) / |grad V(x)|)^q, i.e. the admissibility
/// measure of the gradient flow of V with unconstrained controls.
inline AdmissibilityResult admissibility_measure(const Potential& V, const BoxDomain& X,
                                                 const AdmissibilityConfig& cfg = {}) {
    detail::check(cfg);
    return cfg.method == QuadratureMethod::midpoint ? detail::midpoint(V, X, cfg) : detail::monte_carlo(V, X, cfg);
}

struct Table1Row {
    Vec3 c;
    /// Reference four-decimal value.
    double reference;
    AdmissibilityResult result;
};

/// The seven diagonal quadratic forms tabulated on [-1, 1]^3 with q = 2.
inline constexpr std::array<std::pair<Vec3, double>, 7> kTable1Reference{{
    {{1.0, 1.0, 1.0}, 0.3333},
    {{2.0, 1.0, 1.0}, 0.3056},
    {{0.5, 1.0, 1.0}, 0.3658},
    {{1.0, 2.0, 1.0}, 0.4716},
    {{1.0, 0.5, 1.0}, 0.2123},
    {{1.0, 1.0, 2.0}, 0.2228},
    {{1.0, 1.0, 0.5}, 0.4219},
}};

/// Reference J values of V_alpha for alpha = 2, 4, 10.
inline constexpr std::array<std::pair<double, double>, 3> kVAlphaReference{{
    {2.0, 0.1403},
    {4.0, 0.0962},
    {10.0, 0.0906},
}};

inline std::vector<Table1Row> table1(AdmissibilityConfig cfg = {}) {
    cfg.q = 2.0;
    const BoxDomain X = BoxDomain::cube(1.0);
    std::vector<Table1Row> rows;
    for (const auto& [c, ref] : kTable1Reference)
        rows.push_back({c, ref, admissibility_measure(Potential::quadratic(c[0], c[1], c[2]), X, cfg)});
    return rows;
}

}  // namespace gradflow
