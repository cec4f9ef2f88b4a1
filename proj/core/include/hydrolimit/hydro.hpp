#pragma once

#include <string>
#include <vector>

#include "hydrolimit/measures.hpp"
#include "hydrolimit/vec2.hpp"

namespace hydrolimit {

// b(s) = exp(-1/(1 - s^2)) on |s| < 1.
double bump(double s);
double bump_derivative(double s);

// Linear combination of product bumps
//   b((t - t0)/tau) * b((x - x0)/ell) [* b((y - y0)/ell) in 2-D].
class TestFunction {
 public:
  struct Term {
    double coef = 1.0;
    double t0 = 0.0;
    Vec2 x0;
    double tau = 1.0;
    double ell = 1.0;
  };

  TestFunction() = default;
  static TestFunction bump2d(double t0, Vec2 x0, double tau, double ell);
  static TestFunction bump1d(double t0, double x0, double tau, double ell);

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  double t_min() const;
  double t_max() const;

  double value(double t, Vec2 x) const;
  double dt(double t, Vec2 x) const;
  Vec2 grad(double t, Vec2 x) const;

  // Value and both derivatives in one pass.
  struct Jet {
    double value = 0.0;
    double dt = 0.0;
    Vec2 grad;
  };
  Jet jet(double t, Vec2 x) const;

  TestFunction& operator+=(const TestFunction& o);
  TestFunction& operator*=(double a);

 private:
  int dim_ = 2;
  std::vector<Term> terms_;
};

TestFunction operator+(TestFunction a, const TestFunction& b);
TestFunction operator*(double a, TestFunction f);

struct NamedTestFunction {
  std::string id;
  TestFunction phi;
};

// Fixed batteries: five bumps each, scales 0.2 and 0.4.  The 2-D one lives in
// t in [-0.5, 1], the 1-D one in t in [0, 0.9].
std::vector<NamedTestFunction> battery_2d();
std::vector<NamedTestFunction> battery_1d();

struct Snapshot {
  double t = 0.0;
  EmpiricalMeasure m;
};

struct PressurelessResidual {
  double mass = 0.0;
  Vec2 momentum;
  int snapshots = 0;
  double dt = 0.0;
};

// Streaming trapezoid accumulator; snapshots must be added in increasing,
// uniformly spaced times (relative tolerance 1e-9).
class PressurelessAccumulator {
 public:
  explicit PressurelessAccumulator(TestFunction phi);
  void add(double t, const EmpiricalMeasure& m);
  // Throws DomainError when the snapshots do not cover the support of phi.
  PressurelessResidual result() const;

 private:
  TestFunction phi_;
  double t_first_ = 0.0;
  double t_last_ = 0.0;
  double h_ = 0.0;
  int count_ = 0;
  double mass_sum_ = 0.0, mass_first_ = 0.0, mass_last_ = 0.0;
  Vec2 mom_sum_, mom_first_, mom_last_;
};

PressurelessResidual residual_pressureless(const std::vector<Snapshot>& snapshots,
                                           const TestFunction& phi);

enum class Moment { one, v, half_v2 };
std::string moment_name(Moment g);

struct MomentResidual {
  double value = 0.0;
  int snapshots = 0;
  double dt = 0.0;
};

class MomentAccumulator {
 public:
  MomentAccumulator(TestFunction phi, Moment g);
  // The first snapshot must be at t = 0 and supplies the initial term.
  void add(double t, const EmpiricalMeasure& m);
  MomentResidual result() const;

 private:
  TestFunction phi_;
  Moment g_;
  double t_last_ = 0.0;
  double h_ = 0.0;
  int count_ = 0;
  double initial_ = 0.0;
  double sum_ = 0.0, first_ = 0.0, last_ = 0.0;
};

MomentResidual residual_moment_1d(const std::vector<Snapshot>& snapshots, const TestFunction& phi,
                                  Moment g);

// 1-D binned fields at one time.
struct FieldSnapshot {
  double t = 0.0;
  MacroFields fields;
};

enum class EulerLaw { mass, momentum, energy };
std::string law_name(EulerLaw l);

struct LawResidual {
  std::string phi_id;
  EulerLaw law = EulerLaw::mass;
  double residual = 0.0;
};

struct EulerFieldsReport {
  std::vector<LawResidual> residuals;
  double max_abs_residual = 0.0;
  double max_abs_xi3 = 0.0;
  bool xi3_flagged = false;
  int snapshots = 0;
  double dt = 0.0;
};

// Weak residuals of the 1-D Euler system with p = 2 rho e, computed from the
// piecewise-constant binned fields (initial-term form; the family must start
// at t = 0 and be uniformly spaced).  Spatial integrals of phi over each bin
// use 5-point Gauss-Legendre for d/dt phi and exact differences for d/dx phi.
EulerFieldsReport euler_1d_fields_check(const std::vector<FieldSnapshot>& family,
                                        const std::vector<NamedTestFunction>& battery,
                                        double xi3_tolerance);

struct EnergyRow {
  double t = 0.0;
  double macroscopic = 0.0;
  double fluctuation = 0.0;
  double total = 0.0;
};

// Per-snapshot energy_split; empty bins mean default_bins of each snapshot.
std::vector<EnergyRow> energy_profile(const std::vector<Snapshot>& snapshots,
                                      const Bins& bins = {});

// Largest mass-weighted velocity variance (xi2) over non-empty bins.
double max_bin_velocity_variance(const EmpiricalMeasure& m, const Bins& bins);

}  // namespace hydrolimit
