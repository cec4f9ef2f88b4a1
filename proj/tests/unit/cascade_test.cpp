#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hydrolimit/cascade.hpp"
#include "hydrolimit/errors.hpp"
#include "hydrolimit/scenarios.hpp"

using namespace hydrolimit;

namespace {

constexpr double kPi = std::numbers::pi;

const CascadeBuild& build4() {
  static const CascadeBuild b = build_cascade(4);
  return b;
}

}  // namespace

TEST(Schedule, ClosedFormAngles) {
  auto s = deflection_schedule(3);
  EXPECT_NEAR(s.theta[1], -kPi / 6, 1e-15);
  for (int N : {1, 2, 5, 40}) {
    auto t = deflection_schedule(N);
    EXPECT_NEAR(std::abs(t.theta[N]), kPi / 4, 1e-15);
    EXPECT_EQ(t.phi[0], 0.0);
    for (int k = 1; k <= N; ++k) {
      EXPECT_NEAR(t.phi[k], t.phi[k - 1] + t.theta[k], 1e-15);
      EXPECT_NEAR(t.phi_hat[k], (k % 2 ? 1 : -1) * kPi / 2 + t.phi[k], 1e-15);
    }
  }
}

TEST(ScheduleProperty, LemmaInequalitiesHold) {
  for (int N = 1; N <= 200; ++N) EXPECT_TRUE(check_schedule(deflection_schedule(N)).ok()) << N;
}

TEST(Cascade, SigmaValues) {
  EXPECT_NEAR(sigma_limit(1), 1 / (16 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(sigma_for(1), 0.5 / (16 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(sigma_for(64), 5.0365463245181909e-06, 1e-18);
  for (int N = 1; N <= 1024; ++N) EXPECT_LT(sigma_for(N), 1.0 / N);
}

TEST(Cascade, TimeBound) {
  EXPECT_NEAR(tN_bound(1), (4 * sigma_for(1) + std::sqrt(2.0)) / std::sqrt(2.0), 1e-15);
  double prev = tN_bound(4);
  for (int N : {8, 16, 32, 64}) {
    EXPECT_LT(tN_bound(N), prev);
    prev = tN_bound(N);
  }
}

TEST(Cascade, PlanGeometry) {
  auto p2 = plan_geometry(2);
  EXPECT_NEAR(p2.centers[2].x, 1.0, 1e-15);
  EXPECT_NEAR(p2.centers[2].y, -1 / (2 * std::sqrt(2.0)), 1e-15);
  for (int N : {1, 4, 16, 64}) {
    auto p = plan_geometry(N);
    EXPECT_NEAR(p.centers[1].x, 1.0 / N, 1e-15);
    EXPECT_EQ(p.centers[1].y, 0.0);
    EXPECT_NEAR(p.radii[1], 6 * p.sigma, 1e-15);
    double cap = 2 * std::sqrt(2.0) * std::pow(N + 3, 1.5) * p.sigma;
    for (int k = 1; k <= N; ++k) {
      EXPECT_LT(p.radii[k], cap);
      EXPECT_LT(p.radii[k], 1.0 / N);
    }
  }
}

TEST(Cascade, SeparationMargins) {
  EXPECT_TRUE(separation_check(plan_geometry(1)).ok);
  EXPECT_TRUE(separation_check(plan_geometry(1)).margins.empty());
  for (int N : {4, 16}) {
    auto r = separation_check(plan_geometry(N));
    EXPECT_TRUE(r.ok) << N;
    EXPECT_GT(r.min_margin, 0.0);
  }
}

TEST(Cascade, TerminalVelocityFormulas) {
  auto s = deflection_schedule(5);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_NEAR(norm(q_terminal_velocity(s, k)), 1.0, 1e-15);
    EXPECT_NEAR(norm(p_velocity_after(s, k)), std::sqrt(6.0 - k), 1e-14);
    // Q_k leaves perpendicular to P.
    EXPECT_NEAR(dot(q_terminal_velocity(s, k), p_velocity_after(s, k)), 0.0, 1e-14);
  }
}

TEST(Cascade, BuildN4) {
  const auto& b = build4();
  ASSERT_EQ(b.initial.size(), 5u);
  EXPECT_EQ(b.initial.position(0), (Vec2{0, 0}));
  EXPECT_NEAR(b.initial.velocity(0).x, std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(total_energy(b.initial), 2.5, 1e-12);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_EQ(b.initial.velocity(k), Vec2{});
    EXPECT_NEAR(b.initial.position(k).x, k / 4.0, 1e-15);
    EXPECT_LE(std::abs(b.plan.offsets[k]),
              std::abs(b.plan.centers[k].y) + b.plan.radii[k] + 1e-15);
    EXPECT_LT(b.encounters[k - 1].p_velocity_error, 1e-4);
    EXPECT_LT(b.encounters[k - 1].q_velocity_error, 1e-4);
  }
  // First encounter: |v_P| = sqrt N along phi_1.
  EXPECT_NEAR(norm(b.encounters[0].p_velocity), 2.0, 2e-4);
  EXPECT_NEAR(angle_of(b.encounters[0].p_velocity), b.plan.schedule.phi[1], 1e-4);
  EXPECT_NEAR(norm(b.encounters[3].p_velocity), 1.0, 1e-4);
  for (int k = 1; k < 4; ++k) EXPECT_LT(b.plan.windows[k].exit, b.plan.windows[k + 1].entry);
}

TEST(Cascade, FrozenOffsetsN4) {
  const auto& b = build4();
  EXPECT_NEAR(b.plan.offsets[1], 0.0011973739627709214, 1e-12);
  EXPECT_NEAR(b.plan.offsets[4], -0.26717489954244594, 1e-12);
}

TEST(Cascade, VerifyN4) {
  auto v = verify_cascade(build4(), 2.0);
  for (const auto& c : v.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  EXPECT_TRUE(v.ok());
  EXPECT_LT(v.t_N_measured, v.t_N_bound);
  EXPECT_LT(v.energy_drift, 1e-6);
  EXPECT_LT(v.momentum_drift, 1e-8);
  EXPECT_NEAR(v.q_energy_before, 0.0, 1e-6);
  EXPECT_NEAR(v.q_energy_after, 4.0 / 5.0, 1e-6);
}

TEST(Cascade, ReplayIsDeterministic) {
  auto a = replay_cascade(build4(), 0.0, 0.8);
  auto b = replay_cascade(build4(), 0.0, 0.8);
  EXPECT_EQ(a.final_state().lattice_positions(), b.final_state().lattice_positions());
  EXPECT_EQ(a.final_state().lattice_velocities(), b.final_state().lattice_velocities());
}

TEST(Cascade, ReverseScenarioUnwinds) {
  const auto& b = build4();
  auto s = reverse_samples(b, 1.0, {-0.5, 0.9999});
  ASSERT_EQ(s.snapshots.size(), 2u);
  // Near t = 1 the reversed flow has P back near the origin.
  const auto& m = s.snapshots[1].m;
  EXPECT_LT(norm(m.x[0] - Vec2{-std::sqrt(5.0) * 0.9999, 0}), 1e-3);
}

TEST(Cascade, TransverseInitRejectsOddN) {
  EXPECT_THROW(transverse_init(5), DomainError);
  auto s = transverse_init(4);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_NEAR(s.velocity(0).y, 1.0, 0);
  EXPECT_NEAR(s.velocity(1).y, -1.0, 0);
}
