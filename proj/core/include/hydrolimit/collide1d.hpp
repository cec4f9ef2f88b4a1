#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hydrolimit/hydro.hpp"
#include "hydrolimit/measures.hpp"

namespace hydrolimit {

// Point particles on a line with elastic equal-mass collisions.  Each particle
// keeps an anchor (position at anchor time) and moves freely from it, so
// positions carry no accumulated drift between events.
class System1D {
 public:
  System1D() = default;
  System1D(std::vector<double> positions, std::vector<double> velocities, double time = 0.0);

  std::size_t size() const { return v_.size(); }
  double time() const { return time_; }
  double position(std::size_t i) const { return x_[i] + v_[i] * (time_ - t_[i]); }
  double velocity(std::size_t i) const { return v_[i]; }
  std::vector<double> positions() const;
  const std::vector<double>& velocities() const { return v_; }

  // Free flight to time t (no collision handling).
  void set_time(double t) { time_ = t; }
  // Re-anchor particle i at the current time with the given position/velocity.
  void set_particle(std::size_t i, double x, double v);

 private:
  std::vector<double> x_;
  std::vector<double> t_;
  std::vector<double> v_;
  double time_ = 0.0;
};

enum class CollisionType { binary, triple };

struct CollisionEvent {
  double time = 0.0;
  std::size_t first = 0;  // participants first .. first + count - 1
  std::size_t count = 2;
  CollisionType type = CollisionType::binary;
};

inline constexpr double kSimultaneity = 1e-12;

// Earliest group of simultaneous collisions (empty when none will happen).
// Throws UnsupportedCollision for patterns other than binary exchanges and
// triples whose middle particle is at rest.
std::vector<CollisionEvent> next_events(const System1D& s);

// Applies one event at the system's current time (positions are snapped to
// the common meeting point).
void apply_event(System1D& s, const CollisionEvent& e);

struct Simulation1D {
  std::vector<System1D> snapshots;  // at sample times, and at events if requested
  std::vector<CollisionEvent> events;
  System1D final_state;
};

struct Simulate1DOptions {
  std::vector<double> sample_times;
  bool snapshot_events = false;
  // Runaway guard: more than max_events_factor * N^2 events is an error.
  long max_events_factor = 10;
};

Simulation1D simulate_1d(const System1D& s0, double T, const Simulate1DOptions& options = {});

// Largest matched phase-space gap between the simulated state at time t and
// free transport of the initial state.  Atoms are matched within classes of
// equal velocity, ordered by position.
double free_transport_discrepancy(const System1D& simulated, const System1D& initial);
double free_transport_equivalence(const System1D& s0, double t);

System1D two_layer_init(int N);
System1D three_layer_init(int N);

EmpiricalMeasure measure_of(const System1D& s);

enum class LayerKind { two, three };

struct LayerFields {
  double rho = 0.0;
  double u = 0.0;
  double e = 0.0;
};

// Closed-form limit fields; layer intervals are closed on the left and open
// on the right.  Empty points report (0, 0, 0).
LayerFields layer_fields_closed_form(LayerKind kind, double t, double x);
// Discontinuities of the closed-form fields at time t.
std::vector<double> layer_jumps(LayerKind kind, double t);
// Spacing of one velocity layer of the N-particle initial lattice.
double layer_spacing(LayerKind kind, int N);
// Bins of width close to 1/ceil(sqrt N), rounded to a whole number of layer
// spacings and shifted by a quarter lattice step off the initial lattice,
// covering [lo, hi].
Bins layer_bins(LayerKind kind, int N, double lo, double hi);

struct FieldComparison {
  double max_rho_error = 0.0;
  double max_u_error = 0.0;
  double max_e_error = 0.0;
  double max_abs_xi3 = 0.0;
  std::size_t bins_compared = 0;
  std::size_t bins_excluded = 0;
};

// Binned empirical fields vs closed forms, skipping bins that touch a jump
// (closed-form averages over the bin are used elsewhere).
FieldComparison compare_layer_fields(LayerKind kind, const EmpiricalMeasure& m, double t,
                                     const Bins& bins);

struct NonuniquenessRow {
  double t = 0.0;
  double sup_rho = 0.0;
  double sup_u = 0.0;
  double sup_e = 0.0;
};

struct NonuniquenessReport {
  std::vector<NonuniquenessRow> rows;
  bool coincide_at_zero = true;
  bool separated_later = true;  // sup |rho - rho~| >= threshold for t >= 0.25
  double threshold = 1.0 / 6.0;
  EulerFieldsReport two_layer_euler;
  EulerFieldsReport three_layer_euler;
};

// Binned fields of the simulated layer system on [0, T] at `snapshots`
// uniform times (first at t = 0), checked against the 1-D battery.
EulerFieldsReport layer_euler_check(LayerKind kind, int N, double T = 1.0, int snapshots = 1001);

// Sup-norm differences of the two closed forms on a fine x-grid, plus the
// Euler residuals of both simulated systems' binned fields.
NonuniquenessReport nonuniqueness_report(int N_two, int N_three, const std::vector<double>& times,
                                         int grid_points = 20001);

std::string collision_type_name(CollisionType t);

}  // namespace hydrolimit
