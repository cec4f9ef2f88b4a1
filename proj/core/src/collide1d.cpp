#include "hydrolimit/collide1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

System1D::System1D(std::vector<double> positions, std::vector<double> velocities, double time)
    : x_(std::move(positions)), t_(x_.size(), time), v_(std::move(velocities)), time_(time) {
  if (x_.size() != v_.size()) throw DomainError("positions and velocities differ in length");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(v_[i])) throw DomainError("non-finite particle");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw DomainError("positions must increase strictly");
  }
}

std::vector<double> System1D::positions() const {
  std::vector<double> p(size());
  for (std::size_t i = 0; i < size(); ++i) p[i] = position(i);
  return p;
}

void System1D::set_particle(std::size_t i, double x, double v) {
  x_[i] = x;
  t_[i] = time_;
  v_[i] = v;
}

std::vector<CollisionEvent> next_events(const System1D& s) {
  const std::size_t n = s.size();
  std::vector<double> tau(n > 0 ? n - 1 : 0, std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double closing = s.velocity(i) - s.velocity(i + 1);
    if (!(closing > 0.0)) continue;
    const double gap = std::max(0.0, s.position(i + 1) - s.position(i));
    tau[i] = gap / closing;
    best = std::min(best, tau[i]);
  }
  std::vector<CollisionEvent> out;
  if (!std::isfinite(best)) return out;

  std::size_t i = 0;
  while (i + 1 < n) {
    if (!(tau[i] <= best + kSimultaneity)) {
      ++i;
      continue;
    }
    // chain of consecutive simultaneous pairs starting at i
    std::size_t j = i;
    while (j + 2 < n && tau[j + 1] <= best + kSimultaneity) ++j;
    const std::size_t pairs = j - i + 1;
    CollisionEvent e;
    e.time = s.time() + best;
    e.first = i;
    if (pairs == 1) {
      e.count = 2;
      e.type = CollisionType::binary;
    } else if (pairs == 2 && std::abs(s.velocity(i + 1)) <= kSimultaneity) {
      e.count = 3;
      e.type = CollisionType::triple;
    } else {
      throw UnsupportedCollision("collision of " + std::to_string(pairs + 1) +
                                 " particles starting at index " + std::to_string(i));
    }
    out.push_back(e);
    i = j + 2;
  }
  return out;
}

void apply_event(System1D& s, const CollisionEvent& e) {
  if (e.first + e.count > s.size()) throw DomainError("event indices out of range");
  const std::size_t a = e.first;
  const std::size_t b = e.first + e.count - 1;
  if (e.type == CollisionType::binary) {
    if (e.count != 2) throw UnsupportedCollision("binary event must have two participants");
    const double meet = 0.5 * (s.position(a) + s.position(b));
    const double va = s.velocity(a);
    const double vb = s.velocity(b);
    s.set_particle(a, meet, vb);
    s.set_particle(b, meet, va);
  } else {
    if (e.count != 3 || std::abs(s.velocity(a + 1)) > kSimultaneity) {
      throw UnsupportedCollision("triple event needs a resting middle particle");
    }
    const double meet = s.position(a + 1);
    const double va = s.velocity(a);
    const double vb = s.velocity(b);
    s.set_particle(a, meet, vb);
    s.set_particle(a + 1, meet, s.velocity(a + 1));
    s.set_particle(b, meet, va);
  }
}

Simulation1D simulate_1d(const System1D& s0, double T, const Simulate1DOptions& options) {
  if (!(T > s0.time())) throw DomainError("simulate_1d needs T after the initial time");
  std::vector<double> samples = options.sample_times;
  std::sort(samples.begin(), samples.end());
  for (double t : samples) {
    if (t < s0.time() || t > T) throw DomainError("sample time outside the simulated window");
  }
  const double n = static_cast<double>(std::max<std::size_t>(s0.size(), 1));
  const double guard = static_cast<double>(options.max_events_factor) * n * n;

  Simulation1D out;
  System1D s = s0;
  std::size_t next_sample = 0;
  while (true) {
    const auto events = next_events(s);
    const double te = events.empty() ? std::numeric_limits<double>::infinity() : events.front().time;
    while (next_sample < samples.size() && samples[next_sample] <= std::min(te, T)) {
      s.set_time(samples[next_sample++]);
      out.snapshots.push_back(s);
    }
    if (te > T) {
      s.set_time(T);
      break;
    }
    s.set_time(te);
    for (const auto& e : events) {
      apply_event(s, e);
      out.events.push_back(e);
    }
    if (static_cast<double>(out.events.size()) > guard) {
      throw NumericalError("collision count exceeded the runaway guard");
    }
    if (options.snapshot_events) out.snapshots.push_back(s);
  }
  out.final_state = s;
  return out;
}

double free_transport_discrepancy(const System1D& simulated, const System1D& initial) {
  if (simulated.size() != initial.size()) throw NumericalError("atom counts differ");
  const double dt = simulated.time() - initial.time();
  using Atom = std::pair<double, double>;  // (v, x)
  std::vector<Atom> a, b;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    a.emplace_back(simulated.velocity(i), simulated.position(i));
    b.emplace_back(initial.velocity(i), initial.position(i) + dt * initial.velocity(i));
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double worst = 0.0;
  std::size_t start = 0;
  while (start < a.size()) {
    std::size_t end = start + 1;
    while (end < a.size() && a[end].first - a[end - 1].first <= kSimultaneity) ++end;
    // within a velocity class, match by position
    std::vector<double> xa, xb;
    for (std::size_t k = start; k < end; ++k) {
      xa.push_back(a[k].second);
      xb.push_back(b[k].second);
      worst = std::max(worst, std::abs(a[k].first - b[k].first));
    }
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    for (std::size_t k = 0; k < xa.size(); ++k) worst = std::max(worst, std::abs(xa[k] - xb[k]));
    start = end;
  }
  return worst;
}

double free_transport_equivalence(const System1D& s0, double t) {
  if (t == s0.time()) return free_transport_discrepancy(s0, s0);
  return free_transport_discrepancy(simulate_1d(s0, t).final_state, s0);
}

namespace {

constexpr double kThreeLayerSpeed2 = 1.5;  // (sqrt(6)/2)^2

double three_layer_speed() { return std::sqrt(6.0) / 2.0; }

}  // namespace

System1D two_layer_init(int N) {
  if (N < 2 || N % 2 != 0) throw DomainError("two-layer init needs an even N >= 2");
  std::vector<double> x(N), v(N);
  for (int k = 1; k <= N; ++k) {
    x[k - 1] = static_cast<double>(k) / N;
    v[k - 1] = (k % 2 == 1) ? 1.0 : -1.0;
  }
  return System1D(std::move(x), std::move(v));
}

System1D three_layer_init(int N) {
  if (N < 3 || N % 3 != 0) throw DomainError("three-layer init needs N a positive multiple of 3");
  const double s = three_layer_speed();
  std::vector<double> x(N), v(N);
  for (int k = 1; k <= N; ++k) {
    x[k - 1] = static_cast<double>(k) / N;
    v[k - 1] = (k % 3 == 1) ? s : (k % 3 == 2 ? 0.0 : -s);
  }
  return System1D(std::move(x), std::move(v));
}

EmpiricalMeasure measure_of(const System1D& s) {
  return from_state_1d(s.positions(), s.velocities());
}

namespace {

struct Layer {
  double weight;
  double v;
  double v2;
  double lo;
  double hi;
};

std::vector<Layer> layers(LayerKind kind, double t) {
  if (kind == LayerKind::two) {
    return {{0.5, 1.0, 1.0, t, 1.0 + t}, {0.5, -1.0, 1.0, -t, 1.0 - t}};
  }
  const double s = three_layer_speed();
  const double st = s * t;
  const double third = 1.0 / 3.0;
  return {{third, s, kThreeLayerSpeed2, st, 1.0 + st},
          {third, 0.0, 0.0, 0.0, 1.0},
          {third, -s, kThreeLayerSpeed2, -st, 1.0 - st}};
}

}  // namespace

LayerFields layer_fields_closed_form(LayerKind kind, double t, double x) {
  double rho = 0.0, mom = 0.0, en = 0.0;
  for (const auto& l : layers(kind, t)) {
    if (x >= l.lo && x < l.hi) {
      rho += l.weight;
      mom += l.weight * l.v;
      en += l.weight * l.v2;
    }
  }
  if (rho == 0.0) return {};
  const double u = mom / rho;
  return {rho, u, 0.5 * (en / rho - u * u)};
}

std::vector<double> layer_jumps(LayerKind kind, double t) {
  std::vector<double> j;
  for (const auto& l : layers(kind, t)) {
    j.push_back(l.lo);
    j.push_back(l.hi);
  }
  std::sort(j.begin(), j.end());
  j.erase(std::unique(j.begin(), j.end()), j.end());
  return j;
}

double layer_spacing(LayerKind kind, int N) {
  if (N < 1) throw DomainError("N must be positive");
  return (kind == LayerKind::two ? 2.0 : 3.0) / N;
}

Bins layer_bins(LayerKind kind, int N, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("layer bins need hi > lo");
  const double delta = layer_spacing(kind, N);
  const double target = 1.0 / std::ceil(std::sqrt(static_cast<double>(N)));
  const double width = std::max(1.0, std::round(target / delta)) * delta;
  const double offset = 0.25 / N;
  const double k0 = std::floor((lo - offset) / width);
  const double k1 = std::ceil((hi - offset) / width);
  Bins b;
  for (double k = k0; k <= k1; k += 1.0) b.x_edges.push_back(offset + k * width);
  return b;
}

FieldComparison compare_layer_fields(LayerKind kind, const EmpiricalMeasure& m, double t,
                                     const Bins& bins) {
  const MacroFields f = macro_fields(m, bins);
  const auto jumps = layer_jumps(kind, t);
  FieldComparison c;
  const auto& e = bins.x_edges;
  for (std::size_t b = 0; b + 1 < e.size(); ++b) {
    const bool touches = std::any_of(jumps.begin(), jumps.end(), [&](double j) {
      return j >= e[b] - 1e-12 && j <= e[b + 1] + 1e-12;
    });
    if (touches) {
      ++c.bins_excluded;
      continue;
    }
    const MacroBin& cell = f.cells[b];
    const LayerFields lf = layer_fields_closed_form(kind, t, cell.center.x);
    c.max_rho_error = std::max(c.max_rho_error, std::abs(cell.rho - lf.rho));
    c.max_u_error = std::max(c.max_u_error, std::abs(cell.u.x - lf.u));
    c.max_e_error = std::max(c.max_e_error, std::abs(cell.e - lf.e));
    c.max_abs_xi3 = std::max(c.max_abs_xi3, std::abs(cell.xi3));
    ++c.bins_compared;
  }
  return c;
}

EulerFieldsReport layer_euler_check(LayerKind kind, int N, double T, int snapshots) {
  if (snapshots < 2) throw DomainError("need at least two snapshots");
  const System1D s0 = kind == LayerKind::two ? two_layer_init(N) : three_layer_init(N);
  Simulate1DOptions opt;
  for (int i = 0; i < snapshots; ++i) opt.sample_times.push_back(T * i / (snapshots - 1));
  const Simulation1D sim = simulate_1d(s0, T, opt);

  const double reach = (kind == LayerKind::two ? 1.0 : three_layer_speed()) * T;
  const Bins bins = layer_bins(kind, N, -reach - 0.5, 1.0 + reach + 0.5);
  std::vector<FieldSnapshot> family;
  family.reserve(sim.snapshots.size());
  for (const auto& s : sim.snapshots) family.push_back({s.time(), macro_fields(measure_of(s), bins)});
  return euler_1d_fields_check(family, battery_1d(), 5.0 / N);
}

NonuniquenessReport nonuniqueness_report(int N_two, int N_three, const std::vector<double>& times,
                                         int grid_points) {
  if (grid_points < 2) throw DomainError("grid needs at least two points");
  NonuniquenessReport rep;
  for (double t : times) {
    if (t < 0.0 || t > 1.0) throw DomainError("comparison times must lie in [0, 1]");
    NonuniquenessRow row;
    row.t = t;
    const double lo = -1.5, hi = 2.5;
    for (int i = 0; i < grid_points; ++i) {
      const double x = lo + (hi - lo) * i / (grid_points - 1);
      const LayerFields a = layer_fields_closed_form(LayerKind::two, t, x);
      const LayerFields b = layer_fields_closed_form(LayerKind::three, t, x);
      row.sup_rho = std::max(row.sup_rho, std::abs(a.rho - b.rho));
      row.sup_u = std::max(row.sup_u, std::abs(a.u - b.u));
      row.sup_e = std::max(row.sup_e, std::abs(a.e - b.e));
    }
    if (t == 0.0 && (row.sup_rho != 0.0 || row.sup_u != 0.0 || row.sup_e != 0.0)) {
      rep.coincide_at_zero = false;
    }
    if (t >= 0.25 && row.sup_rho < rep.threshold - 1e-12) rep.separated_later = false;
    rep.rows.push_back(row);
  }
  rep.two_layer_euler = layer_euler_check(LayerKind::two, N_two);
  rep.three_layer_euler = layer_euler_check(LayerKind::three, N_three);
  return rep;
}

std::string collision_type_name(CollisionType t) {
  return t == CollisionType::binary ? "binary" : "triple";
}

}  // namespace hydrolimit
