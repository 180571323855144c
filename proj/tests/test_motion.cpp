#include <gtest/gtest.h>

#include <cmath>

#include "dynahoi/fourier.hpp"
#include "dynahoi/motion.hpp"
#include "support/motion_checks.hpp"

using namespace dynahoi;

namespace {

MotionConfig config_of(FamilyParams p, double duration) { return checks::make_config(std::move(p), duration); }

}  // namespace

TEST(Motion, StraightLineExample) {
  const Vec3 p = position_at(config_of(LineParams{{0, 0, 0}, {1, 0, 0}}, 3.0), 2.0);
  EXPECT_EQ(p, (Vec3{2, 0, 0}));
}

TEST(Motion, CircularHalfPeriodIsAntipodal) {
  const MotionConfig c = config_of(CircularParams{{}, 1.0, {1, 0, 0}, {0, 0, 1}, kPi, 0.0}, 2.0);
  const Vec3 p = position_at(c, 1.0);
  EXPECT_NEAR(distance(p, Vec3{-1, 0, 0}), 0.0, 1e-12);
  EXPECT_NEAR(norm(p), 1.0, 1e-12);
}

TEST(Motion, ProjectileMatchesBallisticFormula) {
  const MotionConfig c = config_of(ProjectileParams{{}, 10.0, kPi / 4.0, 0.0, 9.81}, 2.0);
  const Vec3 p = position_at(c, 1.0);
  const double h = 10.0 * std::cos(kPi / 4.0);
  EXPECT_NEAR(p.x, h, 1e-12);
  EXPECT_NEAR(p.y, 10.0 * std::sin(kPi / 4.0) - 0.5 * 9.81, 1e-12);
  EXPECT_NEAR(p.z, 0.0, 1e-12);
  EXPECT_NEAR(p.x, 7.0711, 1e-4);
  EXPECT_NEAR(p.y, 2.1661, 1e-4);
}

TEST(Motion, OutOfRangeTimeThrows) {
  const MotionConfig c = config_of(LineParams{{}, {1, 0, 0}}, 1.0);
  EXPECT_THROW(position_at(c, -0.1), std::out_of_range);
  EXPECT_THROW(position_at(c, 1.5), std::out_of_range);
  EXPECT_NO_THROW(position_at(c, 1.0));
}

TEST(Motion, InvalidParametersRejected) {
  EXPECT_THROW(Trajectory(config_of(CircularParams{{}, -1.0}, 1.0)), Error);
  EXPECT_THROW(Trajectory(config_of(ImpactParams{ProjectileParams{}, 0.0, 1.5}, 1.0)), Error);
  EXPECT_THROW(Trajectory(config_of(InclineParams{{}, {1, 0, 0}, 2.0}, 1.0)), Error);
  EXPECT_THROW(Trajectory(config_of(LineParams{}, 0.0)), Error);
}

TEST(MotionInvariants, CircularRadiusIsConstant) {
  const auto s = checks::circular_radius(200, 1);
  EXPECT_EQ(s.configs, 200);
  EXPECT_LE(s.worst, 1e-9);
}

TEST(MotionInvariants, HarmonicAndCircularArePeriodic) {
  const auto s = checks::periodicity(200, 2);
  EXPECT_LE(s.worst, 1e-9);
}

TEST(MotionInvariants, BallisticSecondDifferenceIsGravity) {
  const auto s = checks::ballistic_second_difference(200, 3);
  EXPECT_LE(s.worst, 1e-8);
}

TEST(MotionInvariants, RestitutionScalesVerticalSpeed) {
  const auto s = checks::impact_restitution(200, 4);
  EXPECT_GT(s.bounces, 100);
  EXPECT_LE(s.worst_restitution, 1e-8);
  EXPECT_LE(s.worst_penetration, 1e-12);
}

TEST(MotionInvariants, PendulumEnergyDrift) {
  const auto s = checks::pendulum_energy(120, 5);
  EXPECT_LT(s.worst, 1e-6);
}

TEST(MotionInvariants, InclineAccelerationIsGSinAlpha) {
  const auto s = checks::incline_acceleration(200, 6);
  EXPECT_LE(s.worst, 1e-8);
}

TEST(MotionInvariants, FourierResidualMonotoneInOrder) {
  const auto s = checks::fourier_monotone(150, 7);
  EXPECT_EQ(s.violations, 0);
}

TEST(Motion, PendulumIsNonlinear) {
  // Large swings are slower than the small-angle period 2 pi sqrt(L/g).
  PendulumParams p;
  p.length = 1.0;
  p.initial_angle = 1.2;
  const double t0 = 2.0 * kPi * std::sqrt(p.length / p.gravity);
  const Trajectory tr(config_of(p, 3.0));
  EXPECT_GT(tr.position_at(t0).x, 0.0);
  EXPECT_LT(tr.position_at(t0).x, p.length * std::sin(1.2) - 1e-3);
}

TEST(Motion, ImpactRestsOnGroundEventually) {
  ImpactParams p{ProjectileParams{{0, 1, 0}, 2.0, 0.3, 0.0}, 0.0, 0.3};
  const Trajectory tr(config_of(p, 10.0));
  ASSERT_FALSE(tr.bounces().empty());
  EXPECT_EQ(tr.bounces().back().vertical_speed_after, 0.0);
  EXPECT_NEAR(tr.position_at(10.0).y, 0.0, 1e-12);
}

TEST(Fourier, SineIsRecoveredExactly) {
  const int n = 32;
  const double period = 2.0;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(2.0 * kPi / period * (period * i / n));
  const FourierSpec f = fourier_fit(x, 1, period);
  EXPECT_NEAR(f.b[0], 1.0, 1e-9);
  EXPECT_NEAR(f.a[0], 0.0, 1e-9);
  EXPECT_NEAR(f.a0, 0.0, 1e-9);
  EXPECT_NEAR(f.eval(0.25), std::sin(kPi * 0.25), 1e-9);
}

TEST(Fourier, ConstantHasNoHarmonics) {
  std::vector<double> x(17, 2.5);
  const FourierSpec f = fourier_fit(x, 4, 1.0);
  EXPECT_NEAR(f.a0, 2.5, 1e-12);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(f.a[k], 0.0, 1e-12);
    EXPECT_NEAR(f.b[k], 0.0, 1e-12);
  }
}

TEST(Fourier, SquareWaveErrorDecreases) {
  const int n = 256;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = i < n / 2 ? 1.0 : -1.0;
  // Brute-force L2 error of the reconstruction on the sample grid.
  auto err = [&](int k) {
    const FourierSpec f = fourier_fit(x, k, 1.0);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = x[i] - f.eval(static_cast<double>(i) / n);
      acc += d * d;
    }
    return std::sqrt(acc / n);
  };
  EXPECT_GT(err(1), err(3));
  EXPECT_GT(err(3), err(5));
  EXPECT_NEAR(err(5), fourier_residual(fourier_fit(x, 5, 1.0), x, 1.0), 1e-12);
}

TEST(Fourier, TooFewSamplesThrows) {
  std::vector<double> x(4, 0.0);
  EXPECT_THROW(fourier_fit(x, 2, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(fourier_fit(std::vector<double>(5, 0.0), 2, 1.0));
}

TEST(Hybrid, SingleSegmentMatchesUnderlyingFamily) {
  const CircularParams arc{{0.3, 0.1, 0}, 0.5, {1, 0, 0}, {0, 0, 1}, 1.3, 0.2};
  const Trajectory a(config_of(arc, 2.0));
  const Trajectory b(compose_hybrid({{arc, 2.0}}));
  for (int k = 0; k <= 40; ++k) EXPECT_NEAR(distance(a.position_at(0.05 * k), b.position_at(0.05 * k)), 0.0, 1e-15);
}

TEST(Hybrid, LineThenTangentArcIsC1) {
  const Vec3 dir{1, 0, 0};
  const double speed = 0.8;
  CircularParams arc;
  arc.radius = 0.4;
  arc.u1 = cross(dir, kUp);
  arc.u2 = dir;
  arc.omega = speed / arc.radius;
  const Trajectory tr(compose_hybrid({{LineParams{{}, speed * dir}, 1.0}, {arc, 1.0}}));
  const double h = 1e-6;
  const Vec3 before = normalized(tr.position_at(1.0) - tr.position_at(1.0 - h));
  const Vec3 after = normalized(tr.position_at(1.0 + h) - tr.position_at(1.0));
  EXPECT_NEAR(distance(before, after), 0.0, 1e-5);
  EXPECT_NEAR(distance(normalized(tr.velocity_at(1.0 - 1e-12)), normalized(tr.velocity_at(1.0))), 0.0, 1e-9);
}

TEST(Hybrid, ThreeSegmentsArePositionContinuous) {
  CircularParams arc{{5, 5, 5}, 0.3, {0, 0, -1}, {1, 0, 0}, 2.0, 0.0};
  const Trajectory tr(compose_hybrid(
      {{LineParams{{0, 1, 0}, {1, 0, 0}}, 0.7}, {arc, 0.9}, {LineParams{{9, 9, 9}, {0, 0, 1}}, 0.6}}));
  for (double join : {0.7, 1.6}) {
    EXPECT_NEAR(distance(tr.position_at(join - 1e-12), tr.position_at(join)), 0.0, 1e-9);
  }
  EXPECT_EQ(tr.segment_starts().size(), 3u);
}

TEST(Hybrid, EmptySegmentListThrows) { EXPECT_THROW(compose_hybrid({}), Error); }
