#pragma once

#include "hydrolimit/potential.hpp"

namespace hydrolimit {

// Relative motion of a pair interacting with force weight c is a central-field
// problem in the potential 2c Phi_sigma.  `coupling` is 2c; the default 1
// corresponds to an isolated pair (N = 2, c = 1/2) where E = v^2 / 2.
struct ScatteringQuery {
  double impact = 0.0;
  double speed = 1.0;
  double coupling = 1.0;

  double energy() const { return 0.5 * speed * speed / coupling; }
};

struct ScatteringResult {
  double r_min = 0.0;
  double pericenter_angle = 0.0;
  double deflection = 0.0;
  double time_bound = 0.0;
  double quadrature_error = 0.0;
};

double pericenter_radius(const ScatteringQuery& q, const PairPotential& p);
double pericenter_angle(const ScatteringQuery& q, const PairPotential& p,
                        double* error_estimate = nullptr);
double lab_deflection(const ScatteringQuery& q, const PairPotential& p);
ScatteringResult scatter(const ScatteringQuery& q, const PairPotential& p);

double impact_for_deflection(double theta_target, double speed, const PairPotential& p,
                             double coupling = 1.0);

double interaction_time_bound(double sigma, double speed);

}  // namespace hydrolimit
