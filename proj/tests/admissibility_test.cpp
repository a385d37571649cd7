#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gradflow/admissibility.hpp"

namespace gradflow {
namespace {

/// Residual of projecting -p onto span{f1, f2} via the 2x2 normal equations.
double rho_normal_equations(const State& x, const Vec3& p) {
    const auto [f1, f2] = vector_fields(x);
    const double g11 = dot(f1, f1), g12 = dot(f1, f2), g22 = dot(f2, f2);
    const double b1 = -dot(f1, p), b2 = -dot(f2, p);
    const double det = g11 * g22 - g12 * g12;
    const double u1 = (g22 * b1 - g12 * b2) / det;
    const double u2 = (g11 * b2 - g12 * b1) / det;
    return norm(u1 * f1 + u2 * f2 + p);
}

AdmissibilityConfig midpoint_cfg(int n) {
    AdmissibilityConfig cfg;
    cfg.grid_n = n;
    cfg.jobs = 4;
    return cfg;
}

TEST(BoxDomain, Measure) {
    EXPECT_DOUBLE_EQ(BoxDomain::cube(1.0).measure(), 8.0);
    EXPECT_NEAR(BoxDomain({-1, 0, 2}, {0.5, 0.25, 2.1}).measure(), 1.5 * 0.25 * 0.1, 1e-12);
    EXPECT_THROW(BoxDomain({0, 0, 0}, {1, 0, 1}), DomainError);
}

TEST(Rho, KnownValues) {
    EXPECT_EQ(rho({0, 0, 0}, {1, 0, 0}), 0.0);
    EXPECT_EQ(rho({0, 0, 0}, {0, 1, 0}), 1.0);
    EXPECT_NEAR(rho({0, 0, 0.7}, {0.3, -0.4, 5.0}), 0.49919, 1e-4);
    EXPECT_NEAR(rho({0, 0, 0.7}, {0.3, -0.4, 5.0}), rho_bruteforce({0, 0, 0.7}, {0.3, -0.4, 5.0}, 6.0), 1e-4);
}

TEST(RhoBruteforce, KnownValues) {
    EXPECT_NEAR(rho_bruteforce({0, 0, 0}, {0, 1, 0}, 1.0), 1.0, 1e-4);
    EXPECT_EQ(rho_bruteforce({0.3, 0.2, 1.1}, {0, 0, 0}, 1.0), 0.0);
    EXPECT_NEAR(rho_bruteforce({0, 0, std::numbers::pi / 2}, {2, 0, 0}, 2.0), 2.0, 1e-4);
}

TEST(RhoBruteforce, RejectsTooSmallSearchBox) {
    EXPECT_THROW(rho_bruteforce({0, 0, 0}, {3, 0, 0}, 1.0), DomainError);
}

TEST(Rho, PropertiesOnRandomInputs) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> d(-10.0, 10.0), ang(-10.0, 10.0), w(-3.0, 3.0);
    for (int k = 0; k < 500; ++k) {
        const State x{d(rng), d(rng), ang(rng)};
        const Vec3 p{d(rng), d(rng), d(rng)};
        const double r = rho(x, p);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, norm(p) + 1e-12);
        EXPECT_NEAR(r, rho_normal_equations(x, p), 1e-10);
        // Anything in span{f1, f2} has zero residual.
        const auto [f1, f2] = vector_fields(x);
        EXPECT_NEAR(rho(x, w(rng) * f1 + w(rng) * f2), 0.0, 1e-14);
    }
}

TEST(Admissibility, GradientInControllableSpanIsZero) {
    const Potential V = Potential::custom([](const State& x) { return x.x3 * x.x3; },
                                          [](const State& x) { return Vec3{0, 0, 2 * x.x3}; });
    const auto r = admissibility_measure(V, BoxDomain::cube(1.0), midpoint_cfg(20));
    EXPECT_EQ(r.J, 0.0);
    EXPECT_EQ(r.excluded, 0);
}

TEST(Admissibility, SumOfSquaresMatchesTable) {
    const auto r = admissibility_measure(make_v_alpha(1.0), BoxDomain::cube(1.0), midpoint_cfg(200));
    EXPECT_NEAR(r.J, 0.3333, 0.005);
    EXPECT_EQ(r.points, 8'000'000);
    EXPECT_EQ(r.excluded, 0);
}

TEST(Admissibility, VAlphaFour) {
    const auto r = admissibility_measure(make_v_alpha(4.0), BoxDomain::cube(1.0), midpoint_cfg(200));
    EXPECT_NEAR(r.J, 0.0962, 0.005);
}

TEST(Admissibility, IntegrandBoundedSoMeasureInUnitInterval) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> c(0.1, 10.0);
    for (int k = 0; k < 10; ++k) {
        const auto r = admissibility_measure(make_quadratic(c(rng), c(rng), c(rng)), BoxDomain::cube(1.0),
                                             midpoint_cfg(24));
        EXPECT_GE(r.J, 0.0);
        EXPECT_LE(r.J, 1.0);
    }
}

TEST(Admissibility, ScaleInvariant) {
    const BoxDomain X = BoxDomain::cube(1.0);
    const Potential V = make_quadratic(1.0, 0.5, 2.0);
    const double base = admissibility_measure(V, X, midpoint_cfg(60)).J;
    for (double c : {0.5, 3.0}) EXPECT_NEAR(admissibility_measure(V.scaled(c), X, midpoint_cfg(60)).J, base, 1e-12);
}

TEST(Admissibility, VAlphaSequenceDecreases) {
    const BoxDomain X = BoxDomain::cube(1.0);
    const double j2 = admissibility_measure(make_v_alpha(2.0), X, midpoint_cfg(80)).J;
    const double j4 = admissibility_measure(make_v_alpha(4.0), X, midpoint_cfg(80)).J;
    const double j10 = admissibility_measure(make_v_alpha(10.0), X, midpoint_cfg(80)).J;
    EXPECT_GT(j2, j4);
    EXPECT_GT(j4, j10);
}

TEST(Admissibility, MidpointAndMonteCarloAgree) {
    const BoxDomain X = BoxDomain::cube(1.0);
    for (const auto& V : {make_v_alpha(1.0), make_quadratic(1.0, 2.0, 1.0)}) {
        const auto mid = admissibility_measure(V, X, midpoint_cfg(100));
        AdmissibilityConfig mc_cfg;
        mc_cfg.method = QuadratureMethod::monte_carlo;
        mc_cfg.samples = 400'000;
        mc_cfg.jobs = 4;
        const auto mc = admissibility_measure(V, X, mc_cfg);
        EXPECT_GT(mc.std_error, 0.0);
        EXPECT_LE(std::abs(mid.J - mc.J), 3.0 * mc.std_error);
    }
}

TEST(Admissibility, ResultIndependentOfJobCount) {
    const BoxDomain X = BoxDomain::cube(1.0);
    AdmissibilityConfig cfg = midpoint_cfg(40);
    cfg.jobs = 1;
    const double serial = admissibility_measure(make_v_alpha(2.0), X, cfg).J;
    cfg.jobs = 7;
    EXPECT_EQ(admissibility_measure(make_v_alpha(2.0), X, cfg).J, serial);

    AdmissibilityConfig mc;
    mc.method = QuadratureMethod::monte_carlo;
    mc.samples = 300'001;
    mc.jobs = 1;
    const auto a = admissibility_measure(make_v_alpha(2.0), X, mc);
    mc.jobs = 5;
    const auto b = admissibility_measure(make_v_alpha(2.0), X, mc);
    EXPECT_EQ(a.J, b.J);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Admissibility, ExponentOneAlsoBounded) {
    AdmissibilityConfig cfg = midpoint_cfg(40);
    cfg.q = 1.0;
    const double j1 = admissibility_measure(make_v_alpha(1.0), BoxDomain::cube(1.0), cfg).J;
    cfg.q = 2.0;
    const double j2 = admissibility_measure(make_v_alpha(1.0), BoxDomain::cube(1.0), cfg).J;
    // r in [0, 1] implies r >= r^2.
    EXPECT_GT(j1, j2);
    EXPECT_LE(j1, 1.0);
}

TEST(Admissibility, ZeroGradientPotentialIsDegenerate) {
    const Potential flat = Potential::custom([](const State&) { return 2.0; }, [](const State&) { return Vec3{}; });
    EXPECT_THROW(admissibility_measure(flat, BoxDomain::cube(1.0), midpoint_cfg(10)), DegeneratePotentialError);
}

TEST(Admissibility, ExcludedPointsAreCounted) {
    // Vanishing gradient on the plane x1 = 0.05, which holds a layer of cell centers.
    const Potential V = Potential::custom(
        [](const State& x) { return (x.x1 - 0.05) * (x.x1 - 0.05) * (x.x1 - 0.05) * (x.x1 - 0.05); },
        [](const State& x) { return Vec3{4 * (x.x1 - 0.05) * (x.x1 - 0.05) * (x.x1 - 0.05), 0, 0}; });
    AdmissibilityConfig cfg = midpoint_cfg(10);
    cfg.grad_floor = 1e-9;
    const auto r = admissibility_measure(V, BoxDomain({0, -1, -1}, {1, 1, 1}), cfg);
    EXPECT_EQ(r.excluded, 100);
}

TEST(Admissibility, RejectsBadConfig) {
    const BoxDomain X = BoxDomain::cube(1.0);
    AdmissibilityConfig cfg;
    cfg.q = -1.0;
    EXPECT_THROW(admissibility_measure(make_v_alpha(1.0), X, cfg), DomainError);
    cfg = {};
    cfg.grid_n = 7;
    EXPECT_THROW(admissibility_measure(make_v_alpha(1.0), X, cfg), DomainError);
    cfg = {};
    cfg.method = QuadratureMethod::monte_carlo;
    cfg.samples = 0;
    EXPECT_THROW(admissibility_measure(make_v_alpha(1.0), X, cfg), DomainError);
}

}  // namespace
}  // namespace gradflow
