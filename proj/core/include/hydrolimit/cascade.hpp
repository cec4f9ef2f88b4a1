#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hydrolimit/dynamics2d.hpp"
#include "hydrolimit/vec2.hpp"

namespace hydrolimit {

// Arrays are indexed by encounter number k = 1..N; slot 0 holds the value
// before the first encounter (phi_0 = 0) or is unused (theta, phi_hat).
struct DeflectionSchedule {
  int N = 0;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> phi_hat;
};

struct ScheduleCheck {
  bool signs = true;     // phi_k < 0 for odd k, > 0 for even k
  bool growth = true;    // |phi_k| < |phi_{k+2}|
  bool bounded = true;   // |phi_k| <= pi/4, and |phi_k| < |theta_k| for k > 1
  bool ok() const { return signs && growth && bounded; }
};

ScheduleCheck check_schedule(const DeflectionSchedule& s);
// Throws ConstructionError if check_schedule fails (it should not for any N).
DeflectionSchedule deflection_schedule(int N);

// 1 / (2 sqrt2 N (N+3)^{3/2}); sigma_for returns half of it.
double sigma_limit(int N);
double sigma_for(int N);

// (4 sigma_N + sqrt2 / N) * sum_{k=2}^{N+1} k^{-1/2}
double tN_bound(int N);

struct Window {
  double entry = 0.0;
  double exit = 0.0;
};

struct CascadePlan {
  int N = 0;
  double sigma = 0.0;
  DeflectionSchedule schedule;
  std::vector<Vec2> centers;     // (x_k, y_k); centers[0] is the origin
  std::vector<double> radii;     // r_0 = 0, r_1 .. r_N
  std::vector<double> offsets;   // y_{Q_k}, filled by build_cascade
  std::vector<Window> windows;   // [t_k', t_k''], filled by build_cascade
  double step = 0.0;
  int order = 2;
  // +1 when Q_k sits on the left of P's ray for a clockwise (negative)
  // deflection.  Filled by build_cascade.
  int side_convention = 0;
};

CascadePlan plan_geometry(int N);

// Margins d(Q_m, Q_n) - 1/N (m < n) and d(Q_m, P_n) - 1/N (m < n) for the
// half-lines Q_k from (x_k, y_k) at angle phi_hat_k and the segments P_k from
// (x_k, y_k) to (x_{k+1}, y_{k+1}) (P_N is a half-line at angle phi_N).
struct SeparationMargin {
  char kind = 'Q';  // 'Q': d(Q_m, Q_n), 'P': d(Q_m, P_n)
  int m = 0;
  int n = 0;
  double margin = 0.0;
};

struct SeparationReport {
  std::vector<SeparationMargin> margins;
  double min_margin = 0.0;
  bool ok = true;
};

SeparationReport separation_check(const CascadePlan& plan);

struct EncounterRecord {
  int k = 0;
  double impact = 0.0;
  double incoming_speed = 0.0;
  double target_deflection = 0.0;  // signed
  double measured_deflection = 0.0;
  int side = 0;
  bool flipped = false;
  Vec2 p_velocity;  // after exit
  Vec2 q_velocity;
  double p_velocity_error = 0.0;  // relative to the closed form
  double q_velocity_error = 0.0;
};

struct CascadeOptions {
  double resolution = 0.01;
  double range_resolution = 2e-4;
  int order = 2;
  double velocity_tolerance = 1e-4;
  // Newton passes correcting the impact parameter on the simulated encounter.
  int refinements = 2;
  // Called after each encounter with a progress record.
  std::function<void(const EncounterRecord&)> on_encounter;
};

struct CascadeBuild {
  CascadePlan plan;
  ParticleSystem2D initial;  // t = 0; index 0 is P, index k is Q_k
  std::vector<EncounterRecord> encounters;
  double energy_drift = 0.0;
  long long steps = 0;
};

// Index 0 is P, index k is Q_k.
CascadeBuild build_cascade(int N, const CascadeOptions& options = {});

// Replays the built cascade on the construction time grid from the grid point
// at or before t_start (which must be <= 0) to t_end.
Trajectory replay_cascade(const CascadeBuild& build, double t_start, double t_end,
                          StepPolicy policy = {});

struct CascadeCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct CascadeVerification {
  std::vector<CascadeCheck> checks;
  std::vector<Window> measured_windows;
  double t_N_measured = 0.0;
  double t_N_bound = 0.0;
  double energy_drift = 0.0;
  double momentum_drift = 0.0;
  double max_q_velocity_error = 0.0;
  double p_speed_error = 0.0;
  double q_energy_before = 0.0;
  double q_energy_after = 0.0;
  double max_total_energy_error = 0.0;
  bool ok() const;
};

// Replay from t = -0.1 to `horizon` (default t_N'' + 1) checking the claims
// of the construction.
CascadeVerification verify_cascade(const CascadeBuild& build, double horizon = -1.0);

// Q_k velocity after its encounter: (sin|phi_k|, (-1)^{k+1} cos phi_k).
Vec2 q_terminal_velocity(const DeflectionSchedule& s, int k);
// P velocity after encounter k: sqrt(N+1-k) (cos phi_k, sin phi_k).
Vec2 p_velocity_after(const DeflectionSchedule& s, int k);

// N even; particles at (j/N, 0) moving up for odd j and down for even j.
ParticleSystem2D transverse_init(int N, double sigma = 0.0);

// Reversed final state of the cascade replayed to `horizon`: the reversed
// cascade unwinds into P leaving the origin at t = 0 with speed sqrt(N+1).
ParticleSystem2D reverse_scenario(const CascadeBuild& build, double horizon);

}  // namespace hydrolimit
