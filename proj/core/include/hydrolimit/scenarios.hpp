#pragma once

#include <vector>

#include "hydrolimit/cascade.hpp"
#include "hydrolimit/dynamics2d.hpp"
#include "hydrolimit/hydro.hpp"
#include "hydrolimit/measures.hpp"

namespace hydrolimit {

// count >= 2 uniformly spaced times from a to b inclusive.
std::vector<double> uniform_times(double a, double b, int count);

struct ScenarioSamples {
  std::vector<Snapshot> snapshots;  // in the order of the requested times
  double energy_drift = 0.0;
  double momentum_drift = 0.0;
  long long steps = 0;
  double step = 0.0;
};

// Empirical measures of the cascade (P and all Q_k, weights 1/(N+1)) at the
// requested times, replayed on the construction grid.
ScenarioSamples ghost_samples(const CascadeBuild& build, const std::vector<double>& times);

// Reverse flow: the cascade state at `horizon` reversed (time -horizon) and
// run forward on the construction grid.  Times must lie in [-horizon, horizon].
ScenarioSamples reverse_samples(const CascadeBuild& build, double horizon,
                                const std::vector<double>& times);

// Transverse flow from transverse_init(N, sigma), which sits at t = 0; times
// before 0 are reached by integrating backwards.
ScenarioSamples transverse_samples(int N, const std::vector<double>& times, double sigma = 0.0);

// Two unit-weight-1/2 particles: P from (-1.5 sigma, impact) with velocity
// (speed, 0) against Q at rest at the origin (coupling 1).
struct TwoBodyEncounter {
  bool interacted = false;
  double duration = 0.0;    // range exit - range entry
  double deflection = 0.0;  // |angle| of P's outgoing velocity
  Vec2 p_velocity;
  Vec2 q_velocity;
  double energy_drift = 0.0;
};
TwoBodyEncounter two_body_encounter(double impact, double speed, double sigma,
                                    StepPolicy policy = {});

// Atoms 1..N of a cascade measure (the Q subsystem), renormalised.
EmpiricalMeasure q_subsystem(const EmpiricalMeasure& cascade);
// Q-subsystem kinetic energy with the cascade's weights 1/(N+1):
// (1/(N+1)) sum_k |v_{Q_k}|^2.
double q_kinetic_energy(const ParticleSystem2D& s);

}  // namespace hydrolimit
