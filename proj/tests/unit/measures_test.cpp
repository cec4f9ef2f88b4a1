#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/measures.hpp"
#include "oracles.hpp"

using namespace hydrolimit;

namespace {

// W1 on the line via the CDF formula; atoms sit on the x axis with v = 0.
double w1_line(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < a.size(); ++i) pts.push_back({a.x[i].x, a.w[i]});
  for (std::size_t i = 0; i < b.size(); ++i) pts.push_back({b.x[i].x, -b.w[i]});
  std::sort(pts.begin(), pts.end());
  double cdf = 0.0, total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    cdf += pts[i].second;
    total += std::abs(cdf) * (pts[i + 1].first - pts[i].first);
  }
  return total;
}

EmpiricalMeasure line_measure(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EmpiricalMeasure m;
  m.dim = 1;
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) sum += (x = 0.1 + u(rng));
  for (int i = 0; i < n; ++i) m.add({3 * u(rng), 0}, {0, 0}, w[i] / sum);
  return m;
}

}  // namespace

TEST(Measures, ValidateRejectsBadWeights) {
  EmpiricalMeasure m;
  m.add({0, 0}, {0, 0}, 0.5);
  EXPECT_THROW(m.validate(), DomainError);
  m.add({1, 0}, {0, 0}, 0.5);
  EXPECT_NO_THROW(m.validate());
  m.x[0].x = std::nan("");
  EXPECT_THROW(m.validate(), DomainError);
}

TEST(Measures, PushForwardFree) {
  EmpiricalMeasure m;
  m.add({1, 2}, {0.5, -1}, 1.0);
  auto p = push_forward_free(m, 2.0);
  EXPECT_EQ(p.x[0], (Vec2{2, 0}));
  EXPECT_EQ(p.v[0], m.v[0]);
}

TEST(Measures, RestrictRenormalises) {
  EmpiricalMeasure m;
  for (int i = 0; i < 4; ++i) m.add({double(i), 0}, {0, 0}, 0.25);
  auto r = restrict_to(m, {1, 3});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_NEAR(r.mass(), 1.0, 1e-15);
  EXPECT_EQ(r.x[1].x, 3.0);
}

TEST(Measures, SingleAtomDistance) {
  EmpiricalMeasure a, b;
  a.add({0, 0}, {0, 0}, 1.0);
  b.add({3, 0}, {0, 4}, 1.0);
  EXPECT_NEAR(w1_exact(a, b), 5.0, 1e-12);
  EXPECT_NEAR(w1_sliced(a, b), 5.0, 0.5);
}

TEST(MeasuresProperty, ExactMatchesBruteForce) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + static_cast<int>(rng() % 6);
    auto a = oracle::random_measure(rng, n, 2, true);
    auto b = oracle::random_measure(rng, n, 2, true);
    EXPECT_NEAR(w1_exact(a, b), oracle::brute_force_w1(a, b), 1e-10);
  }
}

TEST(MeasuresProperty, ExactMatchesLineFormulaForUnequalWeights) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    auto a = line_measure(rng, 1 + static_cast<int>(rng() % 9));
    auto b = line_measure(rng, 1 + static_cast<int>(rng() % 9));
    EXPECT_NEAR(w1_exact(a, b), w1_line(a, b), 1e-10);
  }
}

TEST(MeasuresProperty, MetricAxioms) {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    auto a = oracle::random_measure(rng, 5, 2, false);
    auto b = oracle::random_measure(rng, 7, 2, false);
    auto c = oracle::random_measure(rng, 4, 2, false);
    double ab = w1_exact(a, b), ba = w1_exact(b, a);
    EXPECT_NEAR(w1_exact(a, a), 0.0, 1e-12);
    EXPECT_NEAR(ab, ba, 1e-10);
    EXPECT_LE(ab, w1_exact(a, c) + w1_exact(c, b) + 1e-10);
  }
}

TEST(MeasuresProperty, SlicedIsDeterministicAndComparable) {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = oracle::random_measure(rng, 30, 2, true);
    auto b = oracle::random_measure(rng, 30, 2, true);
    double s1 = w1_sliced(a, b), s2 = w1_sliced(a, b);
    EXPECT_EQ(s1, s2);
    double e = w1_exact(a, b);
    EXPECT_GT(s1, 0.0);
    EXPECT_LT(s1, 2.0 * e);
  }
}

TEST(Measures, DispatchBySize) {
  std::mt19937_64 rng(5);
  auto a = oracle::random_measure(rng, 10, 2, true);
  auto b = oracle::random_measure(rng, 10, 2, true);
  EXPECT_EQ(w1_distance(a, b).mode, W1Mode::exact);
  auto c = oracle::random_measure(rng, 600, 2, true);
  auto d = oracle::random_measure(rng, 600, 2, true);
  auto r = w1_distance(c, d);
  EXPECT_EQ(r.mode, W1Mode::sliced);
  EXPECT_EQ(r.directions, kSlicedDirections);
  EXPECT_EQ(r.seed, kSlicedSeed);
}

TEST(Measures, DiscretizedLimitHasUnitMass) {
  for (auto sc : {LimitScenario::ghost, LimitScenario::reverse, LimitScenario::transverse,
                  LimitScenario::two_layer, LimitScenario::three_layer}) {
    for (double t : {-0.5, 0.0, 0.5, 1.0}) {
      if ((sc == LimitScenario::two_layer || sc == LimitScenario::three_layer) && t < 0) continue;
      auto m = discretize_limit({sc, t, 64});
      EXPECT_NEAR(m.mass(), 1.0, 1e-12) << scenario_name(sc) << " t=" << t;
      EXPECT_NO_THROW(m.validate());
    }
    EXPECT_EQ(parse_scenario(scenario_name(sc)), sc);
  }
  EXPECT_THROW(parse_scenario("bogus"), DomainError);
}

TEST(Measures, DefaultBinsCoverAtoms) {
  std::mt19937_64 rng(7);
  auto m = oracle::random_measure(rng, 50, 2, true);
  auto bins = default_bins(m);
  double w = 1.0 / std::ceil(std::sqrt(50.0));
  EXPECT_NEAR(bins.x_edges[1] - bins.x_edges[0], w, 1e-12);
  auto f = macro_fields(m, bins);
  EXPECT_NEAR(f.total_mass(), 1.0, 1e-12);
}

TEST(MeasuresProperty, EnergySplitIdentity) {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 40; ++trial) {
    int dim = trial % 2 ? 1 : 2;
    auto m = oracle::random_measure(rng, 40, dim, trial % 3 == 0);
    auto split = energy_split(m, default_bins(m));
    double total = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) total += m.w[i] * norm2(m.v[i]);
    EXPECT_NEAR(split.total, total, 1e-12);
    EXPECT_NEAR(split.macroscopic + split.fluctuation, split.total, 1e-12);
    EXPECT_GE(split.fluctuation, -1e-15);
  }
}

TEST(Measures, MacroFieldsOfSingleVelocityBin) {
  EmpiricalMeasure m;
  m.dim = 1;
  m.add({0.1, 0}, {1, 0}, 0.5);
  m.add({0.2, 0}, {3, 0}, 0.5);
  auto f = macro_fields(m, uniform_bins(0.0, 1.0, 1));
  ASSERT_EQ(f.cells.size(), 1u);
  EXPECT_NEAR(f.cells[0].rho, 1.0, 1e-15);
  EXPECT_NEAR(f.cells[0].u.x, 2.0, 1e-15);
  EXPECT_NEAR(f.cells[0].xi2, 1.0, 1e-15);
  EXPECT_NEAR(f.cells[0].e, 0.5, 1e-15);
  EXPECT_NEAR(f.cells[0].xi3, 0.0, 1e-15);
}
