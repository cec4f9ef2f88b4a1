#include "hydrolimit/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "hydrolimit/dynamics2d.hpp"
#include "hydrolimit/errors.hpp"
#include "transport.hpp"

namespace hydrolimit {

double EmpiricalMeasure::mass() const {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

void EmpiricalMeasure::add(Vec2 position, Vec2 velocity, double weight) {
  x.push_back(position);
  v.push_back(velocity);
  w.push_back(weight);
}

void EmpiricalMeasure::validate() const {
  if (dim != 1 && dim != 2) throw DomainError("measure dimension must be 1 or 2");
  if (x.size() != w.size() || v.size() != w.size()) {
    throw DomainError("measure arrays differ in length");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) throw DomainError("measure weights must be positive");
    if (!std::isfinite(x[i].x) || !std::isfinite(x[i].y) || !std::isfinite(v[i].x) ||
        !std::isfinite(v[i].y)) {
      throw DomainError("measure atoms must be finite");
    }
  }
  if (std::abs(mass() - 1.0) > 1e-12) throw DomainError("measure weights must sum to 1");
}

EmpiricalMeasure from_state(const ParticleSystem2D& s) {
  EmpiricalMeasure m;
  m.dim = 2;
  const double w = 1.0 / static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) m.add(s.position(i), s.velocity(i), w);
  return m;
}

EmpiricalMeasure from_state_1d(const std::vector<double>& x, const std::vector<double>& v) {
  if (x.size() != v.size()) throw DomainError("positions and velocities differ in length");
  EmpiricalMeasure m;
  m.dim = 1;
  const double w = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) m.add({x[i], 0.0}, {v[i], 0.0}, w);
  return m;
}

EmpiricalMeasure push_forward_free(const EmpiricalMeasure& m, double t) {
  EmpiricalMeasure out = m;
  for (std::size_t i = 0; i < out.size(); ++i) out.x[i] += t * out.v[i];
  return out;
}

EmpiricalMeasure restrict_to(const EmpiricalMeasure& m, const std::vector<std::size_t>& idx) {
  EmpiricalMeasure out;
  out.dim = m.dim;
  double total = 0.0;
  for (std::size_t i : idx) total += m.w.at(i);
  if (!(total > 0.0)) throw DomainError("restriction to an empty set of atoms");
  for (std::size_t i : idx) out.add(m.x[i], m.v[i], m.w[i] / total);
  return out;
}

LimitScenario parse_scenario(const std::string& tag) {
  if (tag == "ghost") return LimitScenario::ghost;
  if (tag == "reverse") return LimitScenario::reverse;
  if (tag == "transverse") return LimitScenario::transverse;
  if (tag == "two-layer" || tag == "two") return LimitScenario::two_layer;
  if (tag == "three-layer" || tag == "three") return LimitScenario::three_layer;
  throw DomainError("unknown scenario tag '" + tag + "'");
}

std::string scenario_name(LimitScenario s) {
  switch (s) {
    case LimitScenario::ghost: return "ghost";
    case LimitScenario::reverse: return "reverse";
    case LimitScenario::transverse: return "transverse";
    case LimitScenario::two_layer: return "two-layer";
    case LimitScenario::three_layer: return "three-layer";
  }
  return "?";
}

namespace {

// Uniform on a unit segment starting at `origin` along `axis`, times a Dirac
// velocity, with total mass `mass`.
struct Component {
  Vec2 origin;
  Vec2 axis;
  Vec2 velocity;
  double mass;
};

std::vector<Component> limit_components(const LimitMeasureSpec& spec) {
  const double t = spec.t;
  const Vec2 ex{1.0, 0.0};
  const std::vector<Component> rest{{{0.0, 0.0}, ex, {0.0, 0.0}, 1.0}};
  const std::vector<Component> fronts{{{0.0, t}, ex, {0.0, 1.0}, 0.5},
                                      {{0.0, -t}, ex, {0.0, -1.0}, 0.5}};
  switch (spec.scenario) {
    case LimitScenario::ghost: return t <= 0.0 ? rest : fronts;
    case LimitScenario::reverse: return t < 0.0 ? fronts : rest;
    case LimitScenario::transverse: return fronts;
    case LimitScenario::two_layer:
      return {{{t, 0.0}, ex, {1.0, 0.0}, 0.5}, {{-t, 0.0}, ex, {-1.0, 0.0}, 0.5}};
    case LimitScenario::three_layer: {
      const double s = std::sqrt(6.0) / 2.0;
      return {{{-s * t, 0.0}, ex, {-s, 0.0}, 1.0 / 3.0},
              {{0.0, 0.0}, ex, {0.0, 0.0}, 1.0 / 3.0},
              {{s * t, 0.0}, ex, {s, 0.0}, 1.0 / 3.0}};
    }
  }
  throw DomainError("unknown scenario");
}

}  // namespace

EmpiricalMeasure discretize_limit(const LimitMeasureSpec& spec) {
  if (spec.atoms < 2) throw DomainError("limit discretisation needs at least 2 atoms");
  if (!std::isfinite(spec.t)) throw DomainError("limit time must be finite");
  const auto parts = limit_components(spec);
  EmpiricalMeasure m;
  m.dim = spec.scenario == LimitScenario::two_layer || spec.scenario == LimitScenario::three_layer
              ? 1
              : 2;
  // largest-remainder apportionment of the atom budget
  const int total = spec.atoms;
  std::vector<int> counts(parts.size());
  std::vector<std::pair<double, std::size_t>> rema;
  int used = 0;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    double share = parts[c].mass * total;
    counts[c] = static_cast<int>(std::floor(share + 1e-9));
    used += counts[c];
    rema.push_back({share - counts[c], c});
  }
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < total; ++r, ++used) ++counts[rema[r % rema.size()].second];
  for (std::size_t c = 0; c < parts.size(); ++c) {
    const int k = std::max(counts[c], 1);
    for (int i = 0; i < k; ++i) {
      const double s = (2.0 * i + 1.0) / (2.0 * k);
      m.add(parts[c].origin + s * parts[c].axis, parts[c].velocity, parts[c].mass / k);
    }
  }
  return m;
}

namespace {

double phase_distance(const EmpiricalMeasure& a, std::size_t i, const EmpiricalMeasure& b,
                      std::size_t j) {
  const Vec2 dx = a.x[i] - b.x[j];
  const Vec2 dv = a.v[i] - b.v[j];
  return std::sqrt(norm2(dx) + norm2(dv));
}

void require_same_dim(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.dim != b.dim) throw DomainError("W1 between measures of different dimension");
  if (a.size() == 0 || b.size() == 0) throw DomainError("W1 of an empty measure");
}

// 1-D W1 between weighted point sets: integral of |F_a - F_b|.
double w1_line(std::vector<std::pair<double, double>> pa,
               std::vector<std::pair<double, double>> pb) {
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double last = std::min(pa.front().first, pb.front().first);
  double acc = 0.0;
  while (i < pa.size() || j < pb.size()) {
    double next;
    if (j >= pb.size() || (i < pa.size() && pa[i].first <= pb[j].first)) {
      next = pa[i].first;
    } else {
      next = pb[j].first;
    }
    acc += std::abs(fa - fb) * (next - last);
    last = next;
    while (i < pa.size() && pa[i].first == next) fa += pa[i++].second;
    while (j < pb.size() && pb[j].first == next) fb += pb[j++].second;
  }
  return acc;
}

}  // namespace

double w1_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  require_same_dim(a, b);
  std::vector<double> cost(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) cost[i * b.size() + j] = phase_distance(a, i, b, j);
  }
  // normalise masses so that rounding in the weights cannot unbalance the problem
  std::vector<double> wa = a.w;
  std::vector<double> wb = b.w;
  const double ma = a.mass();
  const double mb = b.mass();
  for (double& x : wa) x /= ma;
  for (double& x : wb) x /= mb;
  return detail::min_cost_transport(wa, wb, cost);
}

double w1_sliced(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int directions,
                 std::uint64_t seed) {
  require_same_dim(a, b);
  if (directions < 1) throw DomainError("sliced W1 needs at least one direction");
  const int D = 2 * a.dim;
  // E|<theta, e_1>| for theta uniform on S^{D-1}
  const double c_d = std::tgamma(D / 2.0) / (std::sqrt(std::numbers::pi) * std::tgamma((D + 1) / 2.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto coords = [&](const EmpiricalMeasure& m, std::size_t i, double* out) {
    if (D == 2) {
      out[0] = m.x[i].x;
      out[1] = m.v[i].x;
    } else {
      out[0] = m.x[i].x;
      out[1] = m.x[i].y;
      out[2] = m.v[i].x;
      out[3] = m.v[i].y;
    }
  };
  double acc = 0.0;
  double theta[4];
  double z[4];
  for (int k = 0; k < directions; ++k) {
    double len = 0.0;
    do {
      len = 0.0;
      for (int d = 0; d < D; ++d) {
        theta[d] = gauss(rng);
        len += theta[d] * theta[d];
      }
    } while (len == 0.0);
    len = std::sqrt(len);
    for (int d = 0; d < D; ++d) theta[d] /= len;
    std::vector<std::pair<double, double>> pa;
    std::vector<std::pair<double, double>> pb;
    pa.reserve(a.size());
    pb.reserve(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      coords(a, i, z);
      double s = 0.0;
      for (int d = 0; d < D; ++d) s += theta[d] * z[d];
      pa.push_back({s, a.w[i]});
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      coords(b, j, z);
      double s = 0.0;
      for (int d = 0; d < D; ++d) s += theta[d] * z[d];
      pb.push_back({s, b.w[j]});
    }
    acc += w1_line(std::move(pa), std::move(pb));
  }
  return acc / directions / c_d;
}

W1Result w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  require_same_dim(a, b);
  W1Result r;
  if (a.size() + b.size() <= kExactW1AtomLimit) {
    r.value = w1_exact(a, b);
    r.mode = W1Mode::exact;
  } else {
    r.value = w1_sliced(a, b);
    r.mode = W1Mode::sliced;
    r.directions = kSlicedDirections;
    r.seed = kSlicedSeed;
  }
  return r;
}

std::size_t Bins::count() const {
  const std::size_t nx = x_edges.size() > 1 ? x_edges.size() - 1 : 0;
  if (y_edges.empty()) return nx;
  const std::size_t ny = y_edges.size() > 1 ? y_edges.size() - 1 : 0;
  return nx * ny;
}

Bins uniform_bins(double lo, double hi, int n) {
  if (!(hi > lo) || n < 1) throw DomainError("bins need hi > lo and n >= 1");
  Bins b;
  for (int i = 0; i <= n; ++i) b.x_edges.push_back(lo + (hi - lo) * i / n);
  b.x_edges.back() = hi;
  return b;
}

namespace {

std::vector<double> aligned_edges(double lo, double hi, double width) {
  double a = std::floor(lo / width);
  double b = std::floor(hi / width) + 1.0;
  std::vector<double> e;
  for (double k = a; k <= b; k += 1.0) e.push_back(k * width);
  return e;
}

// Bin index of `value` in strictly increasing `edges`; the last bin is closed.
long locate(const std::vector<double>& edges, double value) {
  if (!(value >= edges.front() && value <= edges.back())) return -1;
  auto it = std::upper_bound(edges.begin(), edges.end(), value);
  long k = static_cast<long>(it - edges.begin()) - 1;
  return std::min<long>(k, static_cast<long>(edges.size()) - 2);
}

void check_edges(const std::vector<double>& e) {
  if (e.size() < 2) throw DomainError("bins need at least two edges");
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] > e[i - 1])) throw DomainError("bin edges must be strictly increasing");
  }
}

}  // namespace

Bins default_bins(const EmpiricalMeasure& m) {
  if (m.size() == 0) throw DomainError("default bins of an empty measure");
  const double width = 1.0 / std::ceil(std::sqrt(static_cast<double>(m.size())));
  double xlo = m.x[0].x, xhi = xlo, ylo = m.x[0].y, yhi = ylo;
  for (const auto& p : m.x) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  Bins b;
  b.x_edges = aligned_edges(xlo, xhi, width);
  if (m.dim == 2) b.y_edges = aligned_edges(ylo, yhi, width);
  return b;
}

double MacroFields::total_mass() const {
  double s = 0.0;
  for (const auto& c : cells) s += c.mass;
  return s;
}

double MacroFields::max_abs_xi3() const {
  double s = 0.0;
  for (const auto& c : cells) s = std::max(s, std::abs(c.xi3));
  return s;
}

MacroFields macro_fields(const EmpiricalMeasure& m, const Bins& bins) {
  check_edges(bins.x_edges);
  const bool grid = !bins.y_edges.empty();
  if (grid) check_edges(bins.y_edges);
  const std::size_t nx = bins.x_edges.size() - 1;
  const std::size_t ny = grid ? bins.y_edges.size() - 1 : 1;

  MacroFields f;
  f.bins = bins;
  f.cells.assign(nx * ny, MacroBin{});
  std::vector<std::size_t> cell_of(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    long ix = locate(bins.x_edges, m.x[i].x);
    long iy = grid ? locate(bins.y_edges, m.x[i].y) : 0;
    if (ix < 0 || iy < 0) throw DomainError("atom outside the bin cover");
    cell_of[i] = static_cast<std::size_t>(ix) * ny + static_cast<std::size_t>(iy);
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto& c = f.cells[cell_of[i]];
    c.mass += m.w[i];
    c.u += m.w[i] * m.v[i];
  }
  for (auto& c : f.cells) {
    if (c.mass > 0.0) c.u = (1.0 / c.mass) * c.u;
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto& c = f.cells[cell_of[i]];
    const Vec2 d = m.v[i] - c.u;
    c.xi2 += m.w[i] * norm2(d);
    c.xi3 += m.w[i] * d.x * d.x * d.x;
  }
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      auto& c = f.cells[ix * ny + iy];
      const double wx = bins.x_edges[ix + 1] - bins.x_edges[ix];
      const double wy = grid ? bins.y_edges[iy + 1] - bins.y_edges[iy] : 1.0;
      c.center = {0.5 * (bins.x_edges[ix] + bins.x_edges[ix + 1]),
                  grid ? 0.5 * (bins.y_edges[iy] + bins.y_edges[iy + 1]) : 0.0};
      if (c.mass > 0.0) {
        c.rho = c.mass / (wx * wy);
        c.xi2 /= c.mass;
        c.xi3 /= c.mass;
        c.e = 0.5 * c.xi2;
      } else {
        const Vec2 center = c.center;
        c = MacroBin{};
        c.center = center;
      }
    }
  }
  return f;
}

EnergySplit energy_split(const EmpiricalMeasure& m, const Bins& bins) {
  const MacroFields f = macro_fields(m, bins);
  EnergySplit e;
  for (const auto& c : f.cells) {
    e.macroscopic += c.mass * norm2(c.u);
    e.fluctuation += c.mass * c.xi2;
  }
  for (std::size_t i = 0; i < m.size(); ++i) e.total += m.w[i] * norm2(m.v[i]);
  return e;
}

}  // namespace hydrolimit
