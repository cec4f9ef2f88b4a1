#include "hydrolimit/hydro.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

double bump(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double bump_derivative(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  const double q = 1.0 - s * s;
  return bump(s) * (-2.0 * s / (q * q));
}

TestFunction TestFunction::bump2d(double t0, Vec2 x0, double tau, double ell) {
  if (!(tau > 0.0) || !(ell > 0.0)) throw DomainError("bump scales must be positive");
  TestFunction f;
  f.dim_ = 2;
  f.terms_.push_back({1.0, t0, x0, tau, ell});
  return f;
}

TestFunction TestFunction::bump1d(double t0, double x0, double tau, double ell) {
  TestFunction f = bump2d(t0, {x0, 0.0}, tau, ell);
  f.dim_ = 1;
  return f;
}

double TestFunction::t_min() const {
  double t = 0.0;
  bool first = true;
  for (const auto& k : terms_) {
    t = first ? k.t0 - k.tau : std::min(t, k.t0 - k.tau);
    first = false;
  }
  return t;
}

double TestFunction::t_max() const {
  double t = 0.0;
  bool first = true;
  for (const auto& k : terms_) {
    t = first ? k.t0 + k.tau : std::max(t, k.t0 + k.tau);
    first = false;
  }
  return t;
}

TestFunction::Jet TestFunction::jet(double t, Vec2 x) const {
  Jet j;
  for (const auto& k : terms_) {
    const double st = (t - k.t0) / k.tau;
    const double sx = (x.x - k.x0.x) / k.ell;
    const double T = bump(st);
    const double X = bump(sx);
    if (T == 0.0 || X == 0.0) continue;
    double Y = 1.0, dY = 0.0;
    if (dim_ == 2) {
      const double sy = (x.y - k.x0.y) / k.ell;
      Y = bump(sy);
      if (Y == 0.0) continue;
      dY = bump_derivative(sy) / k.ell;
    }
    const double dT = bump_derivative(st) / k.tau;
    const double dX = bump_derivative(sx) / k.ell;
    j.value += k.coef * T * X * Y;
    j.dt += k.coef * dT * X * Y;
    j.grad.x += k.coef * T * dX * Y;
    j.grad.y += k.coef * T * X * dY;
  }
  return j;
}

double TestFunction::value(double t, Vec2 x) const { return jet(t, x).value; }
double TestFunction::dt(double t, Vec2 x) const { return jet(t, x).dt; }
Vec2 TestFunction::grad(double t, Vec2 x) const { return jet(t, x).grad; }

TestFunction& TestFunction::operator+=(const TestFunction& o) {
  if (terms_.empty()) dim_ = o.dim_;
  if (!o.terms_.empty() && o.dim_ != dim_) throw DomainError("test functions of different dimension");
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

TestFunction& TestFunction::operator*=(double a) {
  for (auto& k : terms_) k.coef *= a;
  return *this;
}

TestFunction operator+(TestFunction a, const TestFunction& b) { return a += b; }
TestFunction operator*(double a, TestFunction f) { return f *= a; }

std::vector<NamedTestFunction> battery_2d() {
  return {
      {"b2d-0", TestFunction::bump2d(0.0, {0.5, 0.0}, 0.4, 0.4)},
      {"b2d-1", TestFunction::bump2d(0.3, {0.3, 0.3}, 0.2, 0.2)},
      {"b2d-2", TestFunction::bump2d(0.3, {0.7, -0.3}, 0.2, 0.2)},
      {"b2d-3", TestFunction::bump2d(-0.3, {0.4, 0.0}, 0.2, 0.2)},
      {"b2d-4", TestFunction::bump2d(0.6, {0.5, 0.5}, 0.4, 0.4)},
  };
}

std::vector<NamedTestFunction> battery_1d() {
  return {
      {"b1d-0", TestFunction::bump1d(0.0, 0.5, 0.4, 0.4)},
      {"b1d-1", TestFunction::bump1d(0.3, 0.2, 0.2, 0.2)},
      {"b1d-2", TestFunction::bump1d(0.5, 0.8, 0.4, 0.4)},
      {"b1d-3", TestFunction::bump1d(0.6, 1.2, 0.2, 0.2)},
      {"b1d-4", TestFunction::bump1d(0.6, -0.2, 0.2, 0.2)},
  };
}

namespace {

// Uniform spacing check shared by the accumulators.
void check_spacing(int count, double t, double t_last, double& h) {
  if (count == 1) {
    h = t - t_last;
    if (!(h > 0.0)) throw DomainError("snapshot times must increase");
    return;
  }
  if (std::abs((t - t_last) - h) > 1e-9 * h + 1e-15) {
    throw DomainError("snapshot times must be uniformly spaced");
  }
}

double trapezoid(double h, double sum, double first, double last) {
  return h * (sum - 0.5 * first - 0.5 * last);
}

}  // namespace

PressurelessAccumulator::PressurelessAccumulator(TestFunction phi) : phi_(std::move(phi)) {
  if (phi_.dim() != 2) throw DomainError("pressureless residual needs a 2-D test function");
}

void PressurelessAccumulator::add(double t, const EmpiricalMeasure& m) {
  if (count_ == 0) t_first_ = t;
  else check_spacing(count_, t, t_last_, h_);
  double mass = 0.0;
  Vec2 mom;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto j = phi_.jet(t, m.x[i]);
    const double f = m.w[i] * (j.dt + dot(j.grad, m.v[i]));
    mass += f;
    mom += f * m.v[i];
  }
  if (count_ == 0) {
    mass_first_ = mass;
    mom_first_ = mom;
  }
  mass_last_ = mass;
  mom_last_ = mom;
  mass_sum_ += mass;
  mom_sum_ += mom;
  t_last_ = t;
  ++count_;
}

PressurelessResidual PressurelessAccumulator::result() const {
  if (count_ < 2) throw DomainError("need at least two snapshots");
  if (t_first_ > phi_.t_min() + 1e-12 || t_last_ < phi_.t_max() - 1e-12) {
    throw DomainError("snapshots do not cover the test function support");
  }
  PressurelessResidual r;
  r.mass = trapezoid(h_, mass_sum_, mass_first_, mass_last_);
  r.momentum = {trapezoid(h_, mom_sum_.x, mom_first_.x, mom_last_.x),
                trapezoid(h_, mom_sum_.y, mom_first_.y, mom_last_.y)};
  r.snapshots = count_;
  r.dt = h_;
  return r;
}

PressurelessResidual residual_pressureless(const std::vector<Snapshot>& snapshots,
                                           const TestFunction& phi) {
  PressurelessAccumulator acc(phi);
  for (const auto& s : snapshots) acc.add(s.t, s.m);
  return acc.result();
}

std::string moment_name(Moment g) {
  switch (g) {
    case Moment::one: return "1";
    case Moment::v: return "v";
    case Moment::half_v2: return "v^2/2";
  }
  return "?";
}

namespace {

double moment_of(Moment g, double v) {
  switch (g) {
    case Moment::one: return 1.0;
    case Moment::v: return v;
    case Moment::half_v2: return 0.5 * v * v;
  }
  return 0.0;
}

}  // namespace

MomentAccumulator::MomentAccumulator(TestFunction phi, Moment g) : phi_(std::move(phi)), g_(g) {
  if (phi_.dim() != 1) throw DomainError("moment residual needs a 1-D test function");
}

void MomentAccumulator::add(double t, const EmpiricalMeasure& m) {
  if (count_ == 0) {
    if (std::abs(t) > 1e-15) throw DomainError("moment residual family must start at t = 0");
  } else {
    check_spacing(count_, t, t_last_, h_);
  }
  double f = 0.0;
  double init = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = m.v[i].x;
    const auto j = phi_.jet(t, {m.x[i].x, 0.0});
    const double gv = moment_of(g_, v);
    f += m.w[i] * (j.dt + j.grad.x * v) * gv;
    if (count_ == 0) init += m.w[i] * j.value * gv;
  }
  if (count_ == 0) {
    initial_ = init;
    first_ = f;
  }
  last_ = f;
  sum_ += f;
  t_last_ = t;
  ++count_;
}

MomentResidual MomentAccumulator::result() const {
  if (count_ < 2) throw DomainError("need at least two snapshots");
  if (t_last_ < phi_.t_max() - 1e-12) {
    throw DomainError("snapshots do not cover the test function support");
  }
  return {trapezoid(h_, sum_, first_, last_) + initial_, count_, h_};
}

MomentResidual residual_moment_1d(const std::vector<Snapshot>& snapshots, const TestFunction& phi,
                                  Moment g) {
  MomentAccumulator acc(phi, g);
  for (const auto& s : snapshots) acc.add(s.t, s.m);
  return acc.result();
}

std::string law_name(EulerLaw l) {
  switch (l) {
    case EulerLaw::mass: return "mass";
    case EulerLaw::momentum: return "momentum";
    case EulerLaw::energy: return "energy";
  }
  return "?";
}

namespace {

constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

struct BinIntegrals {
  double phi = 0.0;     // integral of phi over the bin
  double phi_t = 0.0;   // integral of d/dt phi
  double phi_x = 0.0;   // integral of d/dx phi (exact difference)
};

BinIntegrals integrate_bin(const TestFunction& phi, double t, double a, double b) {
  BinIntegrals r;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
    const auto j = phi.jet(t, {c + h * kGaussNodes[k], 0.0});
    r.phi += kGaussWeights[k] * h * j.value;
    r.phi_t += kGaussWeights[k] * h * j.dt;
  }
  r.phi_x = phi.value(t, {b, 0.0}) - phi.value(t, {a, 0.0});
  return r;
}

struct LawTerms {
  double density[3];
  double flux[3];
};

LawTerms law_terms(const MacroBin& c) {
  LawTerms l{};
  if (c.mass <= 0.0) return l;
  const double rho = c.rho;
  const double u = c.u.x;
  const double p = 2.0 * rho * c.e;
  l.density[0] = rho;
  l.flux[0] = rho * u;
  l.density[1] = rho * u;
  l.flux[1] = rho * u * u + p;
  l.density[2] = 0.5 * rho * u * u + rho * c.e;
  // (1/2 rho u^2 + rho e + p) u + 1/2 rho xi3
  l.flux[2] = (0.5 * rho * u * u + rho * c.e + p) * u + 0.5 * rho * c.xi3;
  return l;
}

}  // namespace

EulerFieldsReport euler_1d_fields_check(const std::vector<FieldSnapshot>& family,
                                        const std::vector<NamedTestFunction>& battery,
                                        double xi3_tolerance) {
  if (family.size() < 2) throw DomainError("need at least two field snapshots");
  if (std::abs(family.front().t) > 1e-15) throw DomainError("field family must start at t = 0");
  double h = 0.0;
  for (std::size_t s = 1; s < family.size(); ++s) {
    check_spacing(static_cast<int>(s), family[s].t, family[s - 1].t, h);
  }
  for (const auto& f : family) {
    if (!f.fields.bins.y_edges.empty()) throw DomainError("euler check needs 1-D fields");
  }

  EulerFieldsReport rep;
  rep.snapshots = static_cast<int>(family.size());
  rep.dt = h;
  for (const auto& f : family) rep.max_abs_xi3 = std::max(rep.max_abs_xi3, f.fields.max_abs_xi3());
  rep.xi3_flagged = rep.max_abs_xi3 > xi3_tolerance;

  for (const auto& named : battery) {
    const TestFunction& phi = named.phi;
    if (phi.dim() != 1) throw DomainError("euler check needs 1-D test functions");
    if (family.back().t < phi.t_max() - 1e-12) {
      throw DomainError("field family does not cover the test function support");
    }
    double initial[3] = {0, 0, 0};
    double sum[3] = {0, 0, 0};
    double first[3] = {0, 0, 0};
    double last[3] = {0, 0, 0};
    for (std::size_t s = 0; s < family.size(); ++s) {
      const auto& fs = family[s];
      const auto& edges = fs.fields.bins.x_edges;
      double f[3] = {0, 0, 0};
      for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        const auto& cell = fs.fields.cells[b];
        if (cell.mass <= 0.0) continue;
        const BinIntegrals in = integrate_bin(phi, fs.t, edges[b], edges[b + 1]);
        const LawTerms lt = law_terms(cell);
        for (int k = 0; k < 3; ++k) {
          f[k] += lt.density[k] * in.phi_t + lt.flux[k] * in.phi_x;
          if (s == 0) initial[k] += lt.density[k] * in.phi;
        }
      }
      for (int k = 0; k < 3; ++k) {
        if (s == 0) first[k] = f[k];
        last[k] = f[k];
        sum[k] += f[k];
      }
    }
    for (int k = 0; k < 3; ++k) {
      LawResidual r;
      r.phi_id = named.id;
      r.law = static_cast<EulerLaw>(k);
      r.residual = trapezoid(h, sum[k], first[k], last[k]) + initial[k];
      rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(r.residual));
      rep.residuals.push_back(r);
    }
  }
  return rep;
}

std::vector<EnergyRow> energy_profile(const std::vector<Snapshot>& snapshots, const Bins& bins) {
  std::vector<EnergyRow> rows;
  rows.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    const EnergySplit e = energy_split(s.m, bins.x_edges.empty() ? default_bins(s.m) : bins);
    rows.push_back({s.t, e.macroscopic, e.fluctuation, e.total});
  }
  return rows;
}

double max_bin_velocity_variance(const EmpiricalMeasure& m, const Bins& bins) {
  const MacroFields f = macro_fields(m, bins);
  double worst = 0.0;
  for (const auto& c : f.cells) {
    if (c.mass > 0.0) worst = std::max(worst, c.xi2);
  }
  return worst;
}

}  // namespace hydrolimit
