#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hydrolimit/vec2.hpp"

namespace hydrolimit {

class ParticleSystem2D;

// Weighted atoms in phase space R^d x R^d, d in {1, 2}.  One-dimensional
// measures keep their coordinates in the x components; y components are 0.
struct EmpiricalMeasure {
  int dim = 2;
  std::vector<Vec2> x;
  std::vector<Vec2> v;
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  double mass() const;
  void add(Vec2 position, Vec2 velocity, double weight);
  // Throws DomainError unless weights are positive, sum to 1 within 1e-12 and
  // all coordinates are finite.
  void validate() const;
};

// Uniform weights 1/N on the particles' (position, velocity).
EmpiricalMeasure from_state(const ParticleSystem2D& s);
EmpiricalMeasure from_state_1d(const std::vector<double>& x, const std::vector<double>& v);

// Free transport S_t: (x, v) -> (x + t v, v).
EmpiricalMeasure push_forward_free(const EmpiricalMeasure& m, double t);

// Subset of atoms (by index) renormalised to unit mass.
EmpiricalMeasure restrict_to(const EmpiricalMeasure& m, const std::vector<std::size_t>& idx);

enum class LimitScenario { ghost, reverse, transverse, two_layer, three_layer };

LimitScenario parse_scenario(const std::string& tag);
std::string scenario_name(LimitScenario s);

struct LimitMeasureSpec {
  LimitScenario scenario = LimitScenario::ghost;
  double t = 0.0;
  int atoms = 2;
};

// Stratified discretisation of the closed-form limit measure: each product
// component (uniform on a unit segment) x (Dirac velocity) gets atoms at the
// midpoints of equal sub-segments in proportion to its mass.
EmpiricalMeasure discretize_limit(const LimitMeasureSpec& spec);

enum class W1Mode { exact, sliced };

struct W1Result {
  double value = 0.0;
  W1Mode mode = W1Mode::exact;
  int directions = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kExactW1AtomLimit = 1024;
inline constexpr int kSlicedDirections = 64;
inline constexpr std::uint64_t kSlicedSeed = 0x5eed5eedULL;

// Wasserstein-1 under the Euclidean metric on (x, v).  Exact (min-cost flow)
// when the total atom count is at most kExactW1AtomLimit, sliced otherwise.
W1Result w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
double w1_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
// Mean over unit directions of the 1-D projected distance, divided by
// E|<theta, e_1>| so that two single atoms give their distance.
double w1_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                 int directions = kSlicedDirections, std::uint64_t seed = kSlicedSeed);

// Bins along x, and along y when y_edges is non-empty (2-D grid).
struct Bins {
  std::vector<double> x_edges;
  std::vector<double> y_edges;

  std::size_t count() const;
};

Bins uniform_bins(double lo, double hi, int n);
// Width 1/ceil(sqrt(N)) on both axes (x only for 1-D measures), aligned to
// multiples of the width and covering every atom.
Bins default_bins(const EmpiricalMeasure& m);

struct MacroBin {
  Vec2 center;
  double mass = 0.0;
  double rho = 0.0;  // mass per unit length (1-D or x-only bins) or area
  Vec2 u;
  double xi2 = 0.0;  // mean |v - u|^2
  double xi3 = 0.0;  // mean (v - u)_x^3
  double e = 0.0;    // xi2 / 2
};

struct MacroFields {
  Bins bins;
  std::vector<MacroBin> cells;  // x-major: cell (ix, iy) at ix * ny + iy
  double total_mass() const;
  double max_abs_xi3() const;
};

MacroFields macro_fields(const EmpiricalMeasure& m, const Bins& bins);

struct EnergySplit {
  double macroscopic = 0.0;
  double fluctuation = 0.0;
  double total = 0.0;
};

EnergySplit energy_split(const EmpiricalMeasure& m, const Bins& bins);

}  // namespace hydrolimit
