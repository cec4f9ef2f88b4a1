#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hydrolimit/collide1d.hpp"
#include "hydrolimit/errors.hpp"
#include "hydrolimit/scenarios.hpp"

using namespace hydrolimit;

namespace {
const double kS = std::sqrt(6.0) / 2;
}

TEST(Collide1D, InitialConditions) {
  auto s = two_layer_init(2);
  EXPECT_EQ(s.position(0), 0.5);
  EXPECT_EQ(s.position(1), 1.0);
  EXPECT_EQ(s.velocity(0), 1.0);
  EXPECT_EQ(s.velocity(1), -1.0);
  auto t = three_layer_init(3);
  EXPECT_EQ(t.velocity(0), kS);
  EXPECT_EQ(t.velocity(1), 0.0);
  EXPECT_EQ(t.velocity(2), -kS);
  EXPECT_THROW(two_layer_init(3), DomainError);
  EXPECT_THROW(three_layer_init(4), DomainError);
  EXPECT_THROW(System1D({0.0, 0.0}, {1.0, 1.0}), DomainError);
}

TEST(Collide1D, TwoLayerFirstEventsAreSimultaneous) {
  auto ev = next_events(two_layer_init(4));
  ASSERT_EQ(ev.size(), 2u);
  for (const auto& e : ev) {
    EXPECT_EQ(e.type, CollisionType::binary);
    EXPECT_NEAR(e.time, 0.125, 1e-15);
  }
}

TEST(Collide1D, EqualVelocitiesNeverCollide) {
  System1D s({0.0, 1.0, 2.0}, {0.3, 0.3, 0.3});
  EXPECT_TRUE(next_events(s).empty());
  auto sim = simulate_1d(s, 10.0);
  EXPECT_TRUE(sim.events.empty());
  EXPECT_NEAR(sim.final_state.position(2), 5.0, 1e-14);
}

TEST(Collide1D, ThreeLayerTriple) {
  auto ev = next_events(three_layer_init(3));
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].type, CollisionType::triple);
  EXPECT_EQ(ev[0].first, 0u);
  EXPECT_EQ(ev[0].count, 3u);
  EXPECT_NEAR(ev[0].time, (2.0 / 3.0) / std::sqrt(6.0), 1e-15);
}

TEST(Collide1D, ApplyBinaryAndTriple) {
  System1D b({0.0, 1.0}, {1.0, -1.0});
  b.set_time(0.5);
  apply_event(b, {0.5, 0, 2, CollisionType::binary});
  EXPECT_EQ(b.velocity(0), -1.0);
  EXPECT_EQ(b.velocity(1), 1.0);

  auto t = three_layer_init(3);
  auto e = next_events(t)[0];
  t.set_time(e.time);
  apply_event(t, e);
  EXPECT_EQ(t.velocity(0), -kS);
  EXPECT_EQ(t.velocity(1), 0.0);
  EXPECT_EQ(t.velocity(2), kS);
}

TEST(Collide1D, UnsupportedPatternIsAnError) {
  // All three meet at x = 0.5, t = 1 with a moving middle particle.
  System1D s({-1.0, 0.0, 1.0}, {1.5, 0.5, -0.5});
  EXPECT_THROW(next_events(s), UnsupportedCollision);
}

TEST(Collide1D, RunawayGuard) {
  Simulate1DOptions opt;
  opt.max_events_factor = 0;
  EXPECT_THROW(simulate_1d(two_layer_init(4), 1.0, opt), NumericalError);
}

TEST(Collide1D, EventCountsAreStable) {
  EXPECT_EQ(simulate_1d(two_layer_init(4), 1.0).events.size(), 3u);
  EXPECT_EQ(simulate_1d(two_layer_init(200), 1.0).events.size(), 5050u);
  auto six = simulate_1d(three_layer_init(6), 1.0);
  ASSERT_EQ(six.events.size(), 5u);
  EXPECT_EQ(six.events[0].type, CollisionType::triple);
  EXPECT_EQ(six.events[1].type, CollisionType::triple);
  EXPECT_NEAR(six.events[0].time, (1.0 / 3.0) / std::sqrt(6.0), 1e-15);
  for (std::size_t i = 2; i < 5; ++i) EXPECT_EQ(six.events[i].type, CollisionType::binary);
  auto big = simulate_1d(three_layer_init(300), 1.0);
  EXPECT_EQ(big.events.size(), 10050u);
  auto triples = std::count_if(big.events.begin(), big.events.end(),
                               [](const auto& e) { return e.type == CollisionType::triple; });
  EXPECT_EQ(triples, 2550);
}

TEST(Collide1D, FreeTransportEquivalence) {
  EXPECT_EQ(free_transport_equivalence(two_layer_init(200), 0.0), 0.0);
  EXPECT_LT(free_transport_equivalence(two_layer_init(200), 0.7), 1e-10);
  EXPECT_LT(free_transport_equivalence(three_layer_init(300), 0.5), 1e-10);
}

TEST(Collide1DProperty, RandomSystemsConserveAndStayOrdered) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0), gap(0.01, 0.2);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng() % 30);
    std::vector<double> x, v;
    double pos = 0.0;
    for (int i = 0; i < n; ++i) {
      pos += gap(rng);
      x.push_back(pos);
      v.push_back(u(rng));
    }
    System1D s0(x, v);
    Simulate1DOptions opt;
    opt.sample_times = {0.25, 0.5, 1.0, 2.0};
    auto sim = simulate_1d(s0, 2.0, opt);
    auto sorted0 = v;
    std::sort(sorted0.begin(), sorted0.end());
    for (const auto& s : sim.snapshots) {
      auto p = s.positions();
      EXPECT_TRUE(std::is_sorted(p.begin(), p.end()));
      auto vs = s.velocities();
      std::sort(vs.begin(), vs.end());
      EXPECT_EQ(vs, sorted0);
      EXPECT_LT(free_transport_discrepancy(s, s0), 1e-10);
    }
  }
}

TEST(Collide1D, ClosedFormFields) {
  auto a = layer_fields_closed_form(LayerKind::two, 0.25, 0.5);
  EXPECT_NEAR(a.rho, 1.0, 1e-15);
  EXPECT_NEAR(a.u, 0.0, 1e-15);
  EXPECT_NEAR(a.e, 0.5, 1e-15);
  auto b = layer_fields_closed_form(LayerKind::two, 0.75, 0.9);
  EXPECT_NEAR(b.rho, 0.5, 1e-15);
  EXPECT_NEAR(b.u, 1.0, 1e-15);
  EXPECT_NEAR(b.e, 0.0, 1e-15);
  auto c = layer_fields_closed_form(LayerKind::three, 0.4, 0.2);
  EXPECT_NEAR(c.rho, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.u, -std::sqrt(6.0) / 4, 1e-15);
  EXPECT_NEAR(c.e, 3.0 / 16.0, 1e-15);
  auto vac = layer_fields_closed_form(LayerKind::three, 0.4, 5.0);
  EXPECT_EQ(vac.rho, 0.0);
  EXPECT_EQ(vac.u, 0.0);
  EXPECT_EQ(vac.e, 0.0);
}

TEST(Collide1D, InitialFieldsAgree) {
  for (double x = -0.5; x < 1.5; x += 0.01) {
    auto a = layer_fields_closed_form(LayerKind::two, 0.0, x);
    auto b = layer_fields_closed_form(LayerKind::three, 0.0, x);
    EXPECT_NEAR(a.rho, b.rho, 1e-15);
    EXPECT_NEAR(a.u, b.u, 1e-15);
    EXPECT_NEAR(a.e, b.e, 1e-15);
  }
}

TEST(Collide1D, BinnedFieldsMatchClosedForms) {
  for (auto [kind, N] : {std::pair{LayerKind::two, 200}, std::pair{LayerKind::three, 300}}) {
    System1D s0 = kind == LayerKind::two ? two_layer_init(N) : three_layer_init(N);
    Simulate1DOptions opt;
    opt.sample_times = {0.4};
    auto sim = simulate_1d(s0, 1.0, opt);
    auto bins = layer_bins(kind, N, -1.5, 2.5);
    auto cmp = compare_layer_fields(kind, measure_of(sim.snapshots[0]), 0.4, bins);
    EXPECT_LT(cmp.max_rho_error, 5.0 / N);
    EXPECT_LT(cmp.max_u_error, 5.0 / N);
    EXPECT_LT(cmp.max_e_error, 5.0 / N);
    EXPECT_LT(cmp.max_abs_xi3, 5.0 / N);
    EXPECT_GT(cmp.bins_compared, 0u);
  }
}

TEST(Collide1D, NonuniquenessReport) {
  auto r = nonuniqueness_report(200, 300, {0.0, 0.25, 0.5, 0.75, 1.0});
  ASSERT_EQ(r.rows.size(), 5u);
  EXPECT_TRUE(r.coincide_at_zero);
  EXPECT_TRUE(r.separated_later);
  EXPECT_EQ(r.rows[0].sup_rho, 0.0);
  EXPECT_NEAR(r.rows[2].sup_rho, 1.0 / 3.0, 1e-12);
  EXPECT_GE(r.rows[2].sup_rho, 1.0 / 6.0);
  EXPECT_NEAR(r.rows[2].sup_e, 0.1875, 1e-12);
  EXPECT_NEAR(r.rows[4].sup_rho, 0.5, 1e-12);
  EXPECT_LT(r.two_layer_euler.max_abs_residual, 1e-4);
  EXPECT_LT(r.three_layer_euler.max_abs_residual, 1e-4);
}
