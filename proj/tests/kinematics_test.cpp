#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gradflow/kinematics.hpp"

namespace gradflow {
namespace {

/// Central-difference Jacobian (row i = d(field_i)/dx) of a vector field.
template <class Field>
Mat3 jacobian(Field&& f, const State& x, double step) {
    Mat3 J{};
    for (int j = 0; j < 3; ++j) {
        Vec3 plus = x.vec(), minus = x.vec();
        plus[j] += step;
        minus[j] -= step;
        const Vec3 d = (1.0 / (2.0 * step)) * (f(State::from(plus)) - f(State::from(minus)));
        for (int i = 0; i < 3; ++i) J[i][j] = d[i];
    }
    return J;
}

/// Bracket definition [f1, f2] = Df2 f1 - Df1 f2 evaluated with numerical Jacobians.
Vec3 finite_difference_bracket(const State& x) {
    const auto f1 = [](const State& s) { return vector_fields(s).f1; };
    const auto f2 = [](const State& s) { return vector_fields(s).f2; };
    const auto [v1, v2] = vector_fields(x);
    return jacobian(f2, x, 1e-5) * v1 - jacobian(f1, x, 1e-5) * v2;
}

double max_abs_from_identity(const Mat3& m) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(m[i][j] - (i == j ? 1.0 : 0.0)));
    return worst;
}

State random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(-5.0, 5.0), ang(-20.0, 20.0);
    return {pos(rng), pos(rng), ang(rng)};
}

TEST(VectorFields, AtZeroHeading) {
    const auto [f1, f2] = vector_fields({0.0, 0.0, 0.0});
    EXPECT_EQ(f1, (Vec3{1.0, 0.0, 0.0}));
    EXPECT_EQ(f2, (Vec3{0.0, 0.0, 1.0}));
}

TEST(VectorFields, QuarterTurn) {
    const auto [f1, f2] = vector_fields({5.0, -3.0, std::numbers::pi / 2});
    EXPECT_NEAR(f1[0], 0.0, 1e-16);
    EXPECT_DOUBLE_EQ(f1[1], 1.0);
    EXPECT_EQ(f1[2], 0.0);
    EXPECT_EQ(f2, (Vec3{0.0, 0.0, 1.0}));
}

TEST(VectorFields, TrigValues) {
    const auto [f1, f2] = vector_fields({0.0, 0.0, 0.7});
    // cos(0.7), sin(0.7) to 16 digits.
    EXPECT_NEAR(f1[0], 0.7648421872844885, 1e-15);
    EXPECT_NEAR(f1[1], 0.6442176872376911, 1e-15);
}

TEST(VectorFields, OrthonormalEverywhere) {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 1000; ++k) {
        const auto [f1, f2] = vector_fields(random_state(rng));
        EXPECT_NEAR(norm(f1), 1.0, 1e-15);
        EXPECT_EQ(norm(f2), 1.0);
        EXPECT_EQ(dot(f1, f2), 0.0);
    }
}

TEST(LieBracket, KnownValues) {
    const Vec3 b0 = lie_bracket({0.0, 0.0, 0.0});
    EXPECT_EQ(b0, (Vec3{0.0, -1.0, 0.0}));
    const Vec3 bpi = lie_bracket({1.0, 1.0, std::numbers::pi});
    EXPECT_NEAR(bpi[0], 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(bpi[1], 1.0);
    EXPECT_EQ(bpi[2], 0.0);
}

TEST(LieBracket, MatchesFiniteDifferenceDefinition) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 1000; ++k) {
        const State x = random_state(rng);
        const Vec3 d = lie_bracket(x) - finite_difference_bracket(x);
        EXPECT_LE(std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])}), 1e-8);
    }
}

TEST(LieBracket, IsThirdFrameColumnAndCrossProduct) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        const State x = random_state(rng);
        const Mat3 F = frame_matrix(x);
        const Vec3 b = lie_bracket(x);
        for (int i = 0; i < 3; ++i) EXPECT_EQ(F[i][2], b[i]);
        const auto [f1, f2] = vector_fields(x);
        const Vec3 c = cross(f1, f2);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(c[i], b[i], 1e-15);
    }
}

TEST(FrameMatrix, InverseAtZero) {
    const Mat3 inv = frame_inverse({0.0, 0.0, 0.0});
    EXPECT_EQ(inv[0], (Vec3{1.0, 0.0, 0.0}));
    EXPECT_EQ(inv[1], (Vec3{0.0, 0.0, 1.0}));
    EXPECT_EQ(inv[2], (Vec3{0.0, -1.0, 0.0}));
}

TEST(FrameMatrix, InverseEntry) {
    EXPECT_NEAR(frame_inverse({0.0, 0.0, 0.7})[2][0], 0.644218, 1e-6);
}

TEST(FrameMatrix, InverseBothSides) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 1000; ++k) {
        const State x = random_state(rng);
        EXPECT_LE(max_abs_from_identity(frame_matrix(x) * frame_inverse(x)), 1e-12);
        EXPECT_LE(max_abs_from_identity(frame_inverse(x) * frame_matrix(x)), 1e-12);
    }
}

TEST(DiffDrive, PureTranslation) {
    const Control u = diff_drive_to_unicycle({0.1, 0.1, 0.16});
    EXPECT_DOUBLE_EQ(u.u1, 0.1);
    EXPECT_EQ(u.u2, 0.0);
}

TEST(DiffDrive, PureRotation) {
    const Control u = diff_drive_to_unicycle({-0.3, 0.3, 0.16});
    EXPECT_EQ(u.u1, 0.0);
    EXPECT_DOUBLE_EQ(u.u2, 0.6 / 0.16);
}

TEST(DiffDrive, InverseByHand) {
    // v_r + v_l = 0.2 and v_r - v_l = 0.16 give v_r = 0.18, v_l = 0.02.
    const WheelSpeeds w = unicycle_to_diff_drive({0.1, 1.0}, 0.16);
    EXPECT_NEAR(w.v_r, 0.18, 1e-15);
    EXPECT_NEAR(w.v_l, 0.02, 1e-15);
    const Control back = diff_drive_to_unicycle(w);
    EXPECT_NEAR(back.u1, 0.1, 1e-12);
    EXPECT_NEAR(back.u2, 1.0, 1e-12);
}

TEST(DiffDrive, RoundTripProperty) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> v(-1.0, 1.0), dd(0.05, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const WheelSpeeds w{v(rng), v(rng), dd(rng)};
        const WheelSpeeds back = unicycle_to_diff_drive(diff_drive_to_unicycle(w), w.d);
        EXPECT_NEAR(back.v_l, w.v_l, 1e-12);
        EXPECT_NEAR(back.v_r, w.v_r, 1e-12);
    }
}

TEST(DiffDrive, RejectsNonpositiveSeparation) {
    EXPECT_THROW(diff_drive_to_unicycle({0.1, 0.1, 0.0}), DomainError);
    EXPECT_THROW(unicycle_to_diff_drive({0.1, 0.1}, -1.0), DomainError);
}

TEST(WrapAngle, ReportingView) {
    EXPECT_NEAR(wrap_angle(3 * std::numbers::pi), std::numbers::pi, 1e-12);
    EXPECT_NEAR(wrap_angle(-std::numbers::pi), std::numbers::pi, 1e-12);
    EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2 * std::numbers::pi, 1e-12);
}

}  // namespace
}  // namespace gradflow
