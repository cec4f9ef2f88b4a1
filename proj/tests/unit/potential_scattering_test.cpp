#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/potential.hpp"
#include "hydrolimit/scattering.hpp"
#include "oracles.hpp"

using namespace hydrolimit;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Potential, ClosedFormValues) {
  EXPECT_EQ(potential_value(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(potential_value(0.5, 1.0), 0.5);
  EXPECT_EQ(potential_value(2.0, 1.0), 0.0);
  EXPECT_GT(potential_value(1e-6, 1.0), 1e5);
}

TEST(Potential, ForceClosedForm) {
  EXPECT_EQ(force_magnitude(0.1, 0.1), 0.0);
  EXPECT_NEAR(force_magnitude(0.05, 0.1), 30.0, 1e-12);
  EXPECT_EQ(force_magnitude(1.5, 1.0), 0.0);
}

TEST(Potential, RejectsNonPositiveArguments) {
  EXPECT_THROW(potential_value(0.0, 1.0), DomainError);
  EXPECT_THROW(potential_value(-1.0, 1.0), DomainError);
  EXPECT_THROW(potential_value(1.0, 0.0), DomainError);
  EXPECT_THROW(force_magnitude(-0.5, 1.0), DomainError);
  EXPECT_THROW(PairPotential(-1.0), DomainError);
}

TEST(Potential, ScalingProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> r(1e-3, 3.0), s(1e-3, 2.0);
  for (int i = 0; i < 500; ++i) {
    double sigma = s(rng), x = r(rng);
    PairPotential p(sigma);
    // x * sigma / sigma need not round back to x.
    EXPECT_NEAR(p.value(x * sigma), p.profile().value(x), 1e-13 * (1 + p.profile().value(x)));
  }
}

TEST(Potential, ProfileIsAdmissible) {
  auto c = check_profile(*default_profile());
  EXPECT_TRUE(c.blows_up_at_origin);
  EXPECT_TRUE(c.nonincreasing);
  EXPECT_TRUE(c.convex);
  EXPECT_TRUE(c.vanishes_exactly_at_one);
}

TEST(Potential, ForceMatchesFiniteDifference) {
  PairPotential p(0.3);
  for (double r = 0.02; r < 0.29; r += 0.013) {
    double h = 1e-6 * r;
    double fd = -(p.value(r + h) - p.value(r - h)) / (2 * h);
    EXPECT_NEAR(p.force(r), fd, 1e-6 * std::max(1.0, fd));
  }
}

TEST(Scattering, PericenterRadiusExamples) {
  PairPotential p(1.0);
  EXPECT_NEAR(pericenter_radius({1.0, 0.7}, p), 1.0, 1e-12);
  // E = 1 with coupling 1 means speed sqrt 2.
  EXPECT_NEAR(pericenter_radius({0.0, std::sqrt(2.0)}, p), (3 - std::sqrt(5.0)) / 2, 1e-12);
  ScatteringQuery q{0.5, 2.0};
  double r = pericenter_radius(q, p);
  EXPECT_NEAR(1 - 0.25 / (r * r) - p.value(r) / q.energy(), 0.0, 1e-11);
  EXPECT_NEAR(r, 0.55255154152685293, 1e-12);
}

TEST(Scattering, PericenterAngleEndpoints) {
  PairPotential p(1.0);
  EXPECT_NEAR(pericenter_angle({1.0, 1.0}, p), kPi / 2, 1e-8);
  EXPECT_LT(pericenter_angle({0.0, 1.0}, p), 1e-6);
  EXPECT_NEAR(lab_deflection({1.0, 1.0}, p), 0.0, 1e-8);
  EXPECT_NEAR(lab_deflection({0.0, 1.0}, p), kPi / 2, 1e-6);
}

TEST(Scattering, PericenterAngleAgainstOde) {
  PairPotential p(1.0);
  // E = 0.5 is speed 1.
  double phi = pericenter_angle({0.5, 1.0}, p);
  auto ode = oracle::integrate_two_body(0.5, 1.0, p);
  EXPECT_NEAR(phi, kPi / 2 - ode.lab_deflection, 1e-5);
  EXPECT_NEAR(phi, 1.0843858234634873, 1e-9);
}

TEST(Scattering, LabDeflectionAgainstOde) {
  PairPotential p(1.0);
  double theta = lab_deflection({0.3, 2.0}, p);
  auto ode = oracle::integrate_two_body(0.3, 2.0, p);
  EXPECT_NEAR(theta, ode.lab_deflection, 1e-5);
  EXPECT_NEAR(theta, 0.44346706415936188, 1e-9);
}

TEST(Scattering, ImpactInversionExamples) {
  PairPotential p(1.0);
  EXPECT_NEAR(impact_for_deflection(0.0, 1.0, p), 1.0, 1e-10);
  EXPECT_NEAR(impact_for_deflection(kPi / 2, 1.0, p), 0.0, 1e-6);
  double target = std::asin(1 / std::sqrt(3.0));
  double a = impact_for_deflection(target, std::sqrt(3.0), p);
  EXPECT_NEAR(lab_deflection({a, std::sqrt(3.0)}, p), target, 1e-10);
  auto ode = oracle::integrate_two_body(a, std::sqrt(3.0), p);
  EXPECT_NEAR(ode.lab_deflection, target, 1e-5);
  EXPECT_NEAR(a, 0.25746685576109485, 1e-9);
}

TEST(Scattering, ImpactInversionRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.01, kPi / 2 - 0.01), v(0.3, 5.0);
  PairPotential p(0.2);
  for (int i = 0; i < 40; ++i) {
    double target = th(rng), speed = v(rng);
    double a = impact_for_deflection(target, speed, p);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 0.2);
    EXPECT_NEAR(lab_deflection({a, speed}, p), target, 1e-9);
  }
}

TEST(Scattering, TimeBound) {
  EXPECT_DOUBLE_EQ(interaction_time_bound(0.01, 2.0), 0.02);
  EXPECT_DOUBLE_EQ(interaction_time_bound(1.0, 1.0), 4.0);
  auto ode = oracle::integrate_two_body(0.5, 1.0, PairPotential(1.0));
  EXPECT_LT(ode.duration, 4.0);
  EXPECT_GT(ode.duration, 0.0);
}

TEST(ScatteringProperty, AngleBoundedAndContinuous) {
  PairPotential p(1.0);
  for (double v : {0.5, 1.0, 3.0}) {
    const int n = 200;
    double prev = pericenter_angle({0.0, v}, p);
    double prev_r = pericenter_radius({0.0, v}, p);
    for (int i = 1; i <= n; ++i) {
      double a = static_cast<double>(i) / n;
      double phi = pericenter_angle({a, v}, p);
      double r = pericenter_radius({a, v}, p);
      EXPECT_GE(phi, 0.0);
      EXPECT_LE(phi, kPi / 2 + 1e-12);
      // Empirical slope bound: |dphi/dalpha| peaks near 11 at alpha = 0, v = 3.
      EXPECT_LT(std::abs(phi - prev), 20.0 / n) << "v=" << v << " a=" << a;
      EXPECT_GE(r, prev_r - 1e-12);
      EXPECT_LE(r, 1.0 + 1e-12);
      prev = phi;
      prev_r = r;
    }
  }
}

TEST(ScatteringProperty, ResultFieldsConsistent) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> a(0.0, 1.0), v(0.2, 4.0);
  PairPotential p(1.0);
  for (int i = 0; i < 50; ++i) {
    ScatteringQuery q{a(rng), v(rng)};
    auto r = scatter(q, p);
    EXPECT_NEAR(r.deflection, kPi / 2 - r.pericenter_angle, 1e-14);
    EXPECT_DOUBLE_EQ(r.time_bound, 4.0 / q.speed);
    EXPECT_LE(r.r_min, 1.0 + 1e-12);
    EXPECT_LT(r.quadrature_error, 1e-8);
  }
}

TEST(ScatteringOracle, OdeConservesInvariants) {
  PairPotential p(1.0);
  for (double a : {0.1, 0.5, 0.9}) {
    auto ode = oracle::integrate_two_body(a, 1.0, p, 2e-4);
    EXPECT_LT(ode.energy_drift, 1e-8);
    EXPECT_LT(ode.angular_momentum_drift, 1e-8);
  }
}
