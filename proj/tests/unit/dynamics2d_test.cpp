#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hydrolimit/dynamics2d.hpp"
#include "hydrolimit/errors.hpp"
#include "hydrolimit/scattering.hpp"
#include "hydrolimit/scenarios.hpp"

using namespace hydrolimit;

namespace {

// Three particles heading into a common neighbourhood.
ParticleSystem2D small_cluster() {
  return ParticleSystem2D(PairPotential(0.2), {{-0.5, 0.0}, {0.5, 0.03}, {0.02, -0.45}},
                          {{1.0, 0.0}, {-0.8, 0.0}, {0.0, 0.9}});
}

ParticleSystem2D random_free_system(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec2> x, v;
  for (int i = 0; i < n; ++i) {
    x.push_back({10.0 * i, u(rng)});
    v.push_back({0.0, u(rng)});
  }
  return ParticleSystem2D(PairPotential(0.1), x, v);
}

}  // namespace

TEST(Dynamics2D, AccelerationsVanishOutOfRange) {
  ParticleSystem2D s(PairPotential(0.1), {{0, 0}, {0.2, 0}, {0, 0.5}}, {{0, 0}, {0, 0}, {0, 0}});
  for (auto a : accelerations(s)) EXPECT_EQ(a, Vec2{});
}

TEST(Dynamics2D, TwoBodyAccelerationClosedForm) {
  const double sigma = 0.1;
  ParticleSystem2D s(PairPotential(sigma), {{0, 0}, {sigma / 2, 0}}, {{0, 0}, {0, 0}});
  auto a = accelerations(s);
  double expect = 0.5 * force_magnitude(sigma / 2, sigma);
  EXPECT_NEAR(a[0].x, -expect, 1e-12);
  EXPECT_NEAR(a[0].y, 0.0, 1e-15);
  EXPECT_NEAR(a[1].x, expect, 1e-12);
}

TEST(Dynamics2DProperty, AccelerationsSumToZero) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> x, v;
    for (int i = 0; i < 8; ++i) {
      x.push_back({u(rng), u(rng)});
      v.push_back({0, 0});
    }
    ParticleSystem2D s(PairPotential(0.15), x, v);
    Vec2 sum{};
    double scale = 0.0;
    for (auto a : accelerations(s)) {
      sum += a;
      scale += norm(a);
    }
    EXPECT_LE(norm(sum), 1e-12 * std::max(1.0, scale));
  }
}

TEST(Dynamics2D, CoincidentParticlesInRangeThrow) {
  ParticleSystem2D s(PairPotential(0.1), {{0.3, 0.3}, {0.3, 0.3}}, {{0, 0}, {0, 0}});
  EXPECT_THROW(accelerations(s), SingularityError);
}

TEST(Dynamics2D, EnergyAndMomentumOfSimpleStates) {
  ParticleSystem2D rest(PairPotential(0.1), {{0, 0}, {1, 0}}, {{0, 0}, {0, 0}});
  EXPECT_EQ(total_energy(rest), 0.0);
  auto tr = transverse_init(6);
  EXPECT_NEAR(norm(total_momentum(tr)), 0.0, 1e-15);
}

TEST(Dynamics2DProperty, FreeFlightIsLinear) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_free_system(rng, 5);
    auto traj = integrate(s, 2.5);
    const auto& f = traj.final_state();
    for (std::size_t i = 0; i < s.size(); ++i) {
      Vec2 expect = s.position(i) + (f.time() - s.time()) * s.velocity(i);
      EXPECT_NEAR(f.position(i).x, expect.x, 1e-13);
      EXPECT_NEAR(f.position(i).y, expect.y, 1e-13);
      EXPECT_EQ(f.velocity(i), s.velocity(i));
    }
    EXPECT_TRUE(traj.events.empty());
  }
}

TEST(Dynamics2D, EncounterConservesEnergyAndMomentum) {
  auto s = small_cluster();
  auto traj = integrate(s, 1.5);
  EXPECT_FALSE(traj.events.empty());
  EXPECT_LT(traj.energy_drift, 1e-6);
  EXPECT_LT(traj.momentum_drift, 1e-8);
  for (const auto& e : traj.events) EXPECT_LT(e.entry, e.exit);
}

TEST(Dynamics2D, TwoBodyEncounterMatchesScattering) {
  const double sigma = 0.05;
  for (double frac : {0.2, 0.5, 0.8}) {
    auto enc = two_body_encounter(frac * sigma, 1.3, sigma);
    ASSERT_TRUE(enc.interacted);
    EXPECT_NEAR(norm2(enc.p_velocity) + norm2(enc.q_velocity), 1.3 * 1.3, 1e-8);
    double theta = lab_deflection({frac * sigma, 1.3}, PairPotential(sigma));
    EXPECT_NEAR(enc.deflection, theta, 1e-5);
    EXPECT_LT(enc.duration, interaction_time_bound(sigma, 1.3));
  }
}

TEST(Dynamics2D, ReverseIsAnInvolution) {
  auto s = small_cluster();
  s.set_time(0.7);
  auto rr = reverse(reverse(s));
  EXPECT_EQ(rr.lattice_positions(), s.lattice_positions());
  EXPECT_EQ(rr.lattice_velocities(), s.lattice_velocities());
  EXPECT_EQ(rr.time(), s.time());
  EXPECT_EQ(total_energy(reverse(s)), total_energy(s));
}

TEST(Dynamics2D, ForwardReverseRetracesExactly) {
  auto s = small_cluster();
  StepPolicy policy;
  policy.step = 1e-4;
  auto fwd = integrate(s, 1.2, policy);
  auto back = integrate(reverse(fwd.final_state()), -s.time(), policy);
  auto r = reverse(back.final_state());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_LT(norm(r.position(i) - s.position(i)), 1e-6);
    EXPECT_EQ(r.lattice_positions()[i], s.lattice_positions()[i]);
  }
}

TEST(Dynamics2D, BackwardIntegrationReachesEarlierTime) {
  auto s = small_cluster();
  StepPolicy policy;
  policy.step = 1e-4;
  auto fwd = integrate(s, 1.0, policy);
  auto back = integrate(fwd.final_state(), 0.0, policy);
  EXPECT_NEAR(back.final_state().time(), 0.0, 1e-12);
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_LT(norm(back.final_state().position(i) - s.position(i)), 1e-6);
}

TEST(Dynamics2D, FreeJumpReproducesStepping) {
  std::mt19937_64 rng(23);
  auto s = random_free_system(rng, 4);
  const double dt = 1e-3;
  auto moved = shift_free_flight(s, 1000, dt, 2);
  StepPolicy policy;
  policy.step = dt;
  auto back = shift_free_flight(moved, -1000, dt, 2);
  EXPECT_EQ(back.lattice_positions(), s.lattice_positions());
  auto fwd = integrate(s, moved.time(), policy);
  EXPECT_EQ(fwd.final_state().lattice_positions(), moved.lattice_positions());
}

TEST(Dynamics2D, SamplesAreReturnedInOrder) {
  auto s = small_cluster();
  StepPolicy policy;
  policy.sample_times = {0.25, 0.5, 0.75};
  auto traj = integrate(s, 1.0, policy);
  ASSERT_GE(traj.snapshots.size(), 4u);
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
    EXPECT_LT(traj.snapshots[i - 1].time(), traj.snapshots[i].time());
}
