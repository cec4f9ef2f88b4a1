#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hydrolimit/lattice.hpp"
#include "hydrolimit/potential.hpp"
#include "hydrolimit/vec2.hpp"

namespace hydrolimit {

class ParticleSystem2D {
 public:
  ParticleSystem2D(PairPotential potential, const std::vector<Vec2>& positions,
                   const std::vector<Vec2>& velocities, double time = 0.0);
  // Construct directly from lattice coordinates (no rounding).
  static ParticleSystem2D exact(PairPotential potential, std::vector<LatticeVec2> positions,
                                std::vector<LatticeVec2> velocities, double time);

  std::size_t size() const { return positions_.size(); }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  const PairPotential& potential() const { return potential_; }
  double sigma() const { return potential_.sigma(); }

  // Weight c in a_k = -c sum_j Phi_sigma'(...), 1/N unless fixed explicitly.
  // A partially assembled system keeps the weight of the finished one.
  double force_weight() const;
  void set_force_weight(double c);

  Vec2 position(std::size_t i) const { return from_lattice(positions_[i]); }
  Vec2 velocity(std::size_t i) const { return from_lattice(velocities_[i]); }
  std::vector<Vec2> positions() const;
  std::vector<Vec2> velocities() const;
  // Separation x_i - x_j formed exactly before rounding to double.
  Vec2 separation(std::size_t i, std::size_t j) const {
    return lattice_difference(positions_[i], positions_[j]);
  }

  const std::vector<LatticeVec2>& lattice_positions() const { return positions_; }
  const std::vector<LatticeVec2>& lattice_velocities() const { return velocities_; }
  std::vector<LatticeVec2>& lattice_positions() { return positions_; }
  std::vector<LatticeVec2>& lattice_velocities() { return velocities_; }

  void add_particle(Vec2 position, Vec2 velocity);

 private:
  ParticleSystem2D(PairPotential potential, std::vector<LatticeVec2> positions,
                   std::vector<LatticeVec2> velocities, double time, int);

  PairPotential potential_;
  std::vector<LatticeVec2> positions_;
  std::vector<LatticeVec2> velocities_;
  double time_ = 0.0;
  std::optional<double> weight_;
};

std::vector<Vec2> accelerations(const ParticleSystem2D& s);
double total_energy(const ParticleSystem2D& s);
Vec2 total_momentum(const ParticleSystem2D& s);
ParticleSystem2D reverse(const ParticleSystem2D& s);

// Pair (i, j), i < j, with distance below sigma on [entry, exit].
struct RangeEvent {
  std::size_t i = 0;
  std::size_t j = 0;
  double entry = 0.0;
  double exit = 0.0;
};

class Integrator;

struct StepPolicy {
  // Uniform step of the time grid.  Zero derives it from the state as the
  // smaller of two fractions, each divided by the largest attainable speed:
  // `resolution` of the closest approach permitted by the total energy, and
  // `range_resolution` of sigma.  The second one dominates the error budget:
  // Phi'' jumps at r = sigma and each range crossing leaves an O(dt^2)
  // energy defect that the symplectic structure does not undo.
  double step = 0.0;
  double resolution = 0.01;
  double range_resolution = 2e-4;
  // 2: leapfrog; 4: symmetric triple-jump composition of leapfrog.  The
  // range kink caps both at second order, so the cheaper one is the default.
  int order = 2;
  double energy_tolerance = 1e-6;
  std::vector<double> sample_times;
  bool keep_samples = true;
  std::function<void(const ParticleSystem2D&)> on_sample;
  // Called after every step taken while some pair is within range.
  std::function<void(const Integrator&)> on_interaction_step;
  std::optional<std::pair<std::size_t, std::size_t>> stop_after_exit;
};

struct Trajectory {
  std::vector<ParticleSystem2D> snapshots;
  std::vector<RangeEvent> events;
  // Pairs still within range at the end: (i, j, entry).
  std::vector<RangeEvent> open_events;
  std::optional<ParticleSystem2D> last;
  double step = 0.0;
  long long steps = 0;
  double energy_drift = 0.0;
  double momentum_drift = 0.0;
  bool stopped_early = false;

  const ParticleSystem2D& final_state() const { return *last; }
};

// Fixed-grid symplectic stepper on the lattice.  Stretches without any pair
// in range are crossed in one jump to just before the next straight-line
// range entry; such jumps reproduce the stepped result exactly.
class Integrator {
 public:
  Integrator(ParticleSystem2D initial, StepPolicy policy);

  double step() const { return dt_; }
  double time() const;
  long long steps_taken() const { return steps_taken_; }
  std::size_t size() const { return state_.size(); }
  const ParticleSystem2D& state() const { return state_; }
  Vec2 position(std::size_t i) const { return state_.position(i); }
  Vec2 velocity(std::size_t i) const { return state_.velocity(i); }
  const std::vector<std::pair<std::size_t, std::size_t>>& inside_pairs() const {
    return inside_;
  }
  const std::vector<RangeEvent>& events() const { return events_; }
  std::vector<RangeEvent> open_events() const;

  // Appends a particle; it must be out of range of every other particle.
  void add_particle(Vec2 position, Vec2 velocity);

  // Advance to the grid point nearest t_end.  Returns true when stopped early
  // by policy.stop_after_exit.
  bool advance_to(double t_end, std::vector<ParticleSystem2D>* samples = nullptr);

  // Sets the pair whose range exit ends the next advance_to call.
  void stop_after_exit(std::optional<std::pair<std::size_t, std::size_t>> pair) {
    policy_.stop_after_exit = pair;
  }

 private:
  struct PairKick {
    std::size_t i, j;
    double ax, ay;
  };

  void rebuild_candidates();
  void compute_kicks();
  void apply_kicks(double h);
  void drift(double h);
  void single_step();
  bool detect_crossings(const std::vector<LatticeVec2>& x0, const std::vector<LatticeVec2>& v0);
  double crossing_time(const std::vector<LatticeVec2>& x0, const std::vector<LatticeVec2>& v0,
                       std::size_t i, std::size_t j) const;
  long long free_steps_available() const;
  void jump(long long m);
  void emit_samples_before(double t_limit, std::vector<ParticleSystem2D>* out);
  ParticleSystem2D extrapolated(double t) const;
  void set_speed_bound();
  double grid_time(long long n) const { return origin_ + static_cast<double>(n) * dt_; }

  ParticleSystem2D state_;
  StepPolicy policy_;
  std::vector<double> substeps_;
  double dt_ = 0.0;
  double origin_ = 0.0;
  long long n_ = 0;
  long long steps_taken_ = 0;
  double coupling_ = 1.0;
  double speed_bound_ = 0.0;

  std::vector<std::pair<std::size_t, std::size_t>> candidates_;
  long long candidates_built_at_ = -1;
  int rebuild_interval_ = 16;
  double candidate_radius_ = 0.0;

  std::vector<PairKick> kicks_;
  bool kicks_valid_ = false;

  std::vector<std::pair<std::size_t, std::size_t>> inside_;
  std::map<std::pair<std::size_t, std::size_t>, double> open_;
  std::vector<RangeEvent> events_;
  bool stop_requested_ = false;

  std::vector<double> pending_samples_;
  std::size_t next_sample_ = 0;
};

// Per-step lattice displacement of free flight under `order`; a jump of m
// steps moves a particle by exactly m times this.
LatticeVec2 free_step_displacement(const LatticeVec2& velocity, double dt, int order);

// Moves every particle by `steps` grid steps of free flight (negative goes
// back) and shifts the time accordingly.  Stepping forward from the result on
// the same grid reproduces `s` bit for bit provided no pair comes within range
// on the way.
ParticleSystem2D shift_free_flight(const ParticleSystem2D& s, long long steps, double dt,
                                   int order);

// The step `integrate` would choose for this state under `policy`.
double derived_step(const ParticleSystem2D& s, const StepPolicy& policy);

// Integrate to t_end (backwards via reverse/forward/reverse when t_end < s.time()).
// Snapshots: the initial state, every requested sample time, and the final
// grid state.  Throws NumericalError when the relative energy drift exceeds
// policy.energy_tolerance.
Trajectory integrate(const ParticleSystem2D& s, double t_end, StepPolicy policy = {});

}  // namespace hydrolimit
