#include "hydrolimit/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/scattering.hpp"

namespace hydrolimit {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_n(int N) {
  if (N < 1) throw DomainError("N must be at least 1");
}

double point_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double len2 = norm2(d);
  double s = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + s * d));
}

double point_ray(Vec2 p, Vec2 a, Vec2 dir) {
  double s = std::max(0.0, dot(p - a, dir));
  return norm(p - (a + s * dir));
}

// Segment or half-line: origin, unit direction, length (infinite for a ray).
struct Piece {
  Vec2 a;
  Vec2 dir;
  double length;
};

double point_piece(Vec2 p, const Piece& q) {
  if (std::isinf(q.length)) return point_ray(p, q.a, q.dir);
  return point_segment(p, q.a, q.a + q.length * q.dir);
}

bool pieces_cross(const Piece& u, const Piece& v) {
  double den = cross(u.dir, v.dir);
  if (den == 0.0) return false;
  Vec2 w = v.a - u.a;
  double s = cross(w, v.dir) / den;
  double t = cross(w, u.dir) / den;
  return s >= 0.0 && t >= 0.0 && s <= u.length && t <= v.length;
}

// In the plane two disjoint convex pieces attain their distance at a finite
// endpoint of one of them.
double piece_distance(const Piece& u, const Piece& v) {
  if (pieces_cross(u, v)) return 0.0;
  double d = std::min(point_piece(u.a, v), point_piece(v.a, u));
  if (std::isfinite(u.length)) d = std::min(d, point_piece(u.a + u.length * u.dir, v));
  if (std::isfinite(v.length)) d = std::min(d, point_piece(v.a + v.length * v.dir, u));
  return d;
}

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

double relative_error(Vec2 got, Vec2 want) {
  double scale = std::max(norm(want), 1e-300);
  return norm(got - want) / scale;
}

// Signed turn from direction a to direction b in (-pi, pi].
double turn(Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); }

double cascade_coupling(int N) { return 2.0 / (N + 1.0); }

}  // namespace

ScheduleCheck check_schedule(const DeflectionSchedule& s) {
  ScheduleCheck c;
  const int N = s.N;
  for (int k = 1; k <= N; ++k) {
    const double phi = s.phi[k];
    if (k % 2 == 1 ? !(phi < 0.0) : !(phi > 0.0)) c.signs = false;
    if (k + 2 <= N && !(std::abs(phi) < std::abs(s.phi[k + 2]))) c.growth = false;
    if (std::abs(phi) > kPi / 4.0 * (1.0 + 1e-15)) c.bounded = false;
    if (k > 1 && !(std::abs(phi) < std::abs(s.theta[k]))) c.bounded = false;
  }
  return c;
}

DeflectionSchedule deflection_schedule(int N) {
  require_positive_n(N);
  DeflectionSchedule s;
  s.N = N;
  s.theta.assign(N + 1, 0.0);
  s.phi.assign(N + 1, 0.0);
  s.phi_hat.assign(N + 1, 0.0);
  for (int k = 1; k <= N; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    s.theta[k] = sign * std::asin(1.0 / std::sqrt(N + 2.0 - k));
    s.phi[k] = s.phi[k - 1] + s.theta[k];
    s.phi_hat[k] = -sign * kPi / 2.0 + s.phi[k];
  }
  if (!check_schedule(s).ok()) {
    throw ConstructionError("deflection schedule violates its sign/growth bounds for N=" +
                            std::to_string(N));
  }
  return s;
}

double sigma_limit(int N) {
  require_positive_n(N);
  return 1.0 / (2.0 * std::numbers::sqrt2 * N * std::pow(N + 3.0, 1.5));
}

double sigma_for(int N) { return 0.5 * sigma_limit(N); }

double tN_bound(int N) {
  require_positive_n(N);
  double sum = 0.0;
  for (int k = 2; k <= N + 1; ++k) sum += 1.0 / std::sqrt(static_cast<double>(k));
  return (4.0 * sigma_for(N) + std::numbers::sqrt2 / N) * sum;
}

Vec2 q_terminal_velocity(const DeflectionSchedule& s, int k) {
  const double phi = s.phi[k];
  return {std::sin(std::abs(phi)), (k % 2 == 1 ? 1.0 : -1.0) * std::cos(phi)};
}

Vec2 p_velocity_after(const DeflectionSchedule& s, int k) {
  return std::sqrt(s.N + 1.0 - k) * unit(s.phi[k]);
}

CascadePlan plan_geometry(int N) {
  CascadePlan plan;
  plan.N = N;
  plan.sigma = sigma_for(N);
  plan.schedule = deflection_schedule(N);
  const auto& phi = plan.schedule.phi;
  plan.centers.assign(N + 1, Vec2{});
  plan.radii.assign(N + 1, 0.0);
  double ysum = 0.0;
  for (int k = 1; k <= N; ++k) {
    ysum += std::tan(phi[k - 1]);
    plan.centers[k] = {static_cast<double>(k) / N, ysum / N};
    plan.radii[k] = (plan.radii[k - 1] + plan.sigma) / std::cos(phi[k - 1]) + 5.0 * plan.sigma;
  }
  plan.offsets.assign(N + 1, 0.0);
  plan.windows.assign(N + 1, Window{});
  return plan;
}

SeparationReport separation_check(const CascadePlan& plan) {
  const int N = plan.N;
  const auto& s = plan.schedule;
  const double inf = std::numeric_limits<double>::infinity();
  auto q_piece = [&](int k) { return Piece{plan.centers[k], unit(s.phi_hat[k]), inf}; };
  auto p_piece = [&](int k) {
    if (k == N) return Piece{plan.centers[k], unit(s.phi[k]), inf};
    Vec2 d = plan.centers[k + 1] - plan.centers[k];
    return Piece{plan.centers[k], (1.0 / norm(d)) * d, norm(d)};
  };
  SeparationReport r;
  r.min_margin = inf;
  for (int m = 1; m <= N; ++m) {
    for (int n = m + 1; n <= N; ++n) {
      double dq = piece_distance(q_piece(m), q_piece(n)) - 1.0 / N;
      double dp = piece_distance(q_piece(m), p_piece(n)) - 1.0 / N;
      r.margins.push_back({'Q', m, n, dq});
      r.margins.push_back({'P', m, n, dp});
      r.min_margin = std::min({r.min_margin, dq, dp});
    }
  }
  r.ok = r.margins.empty() || r.min_margin > 0.0;
  return r;
}

namespace {

// Step fine enough for every planned encounter: a fraction of the closest
// approach and of sigma per unit of relative speed.
double cascade_step(const CascadePlan& plan, const CascadeOptions& o) {
  PairPotential pot(plan.sigma);
  const int N = plan.N;
  double dt = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= N; ++k) {
    const double v = std::sqrt(N + 2.0 - k);
    const double alpha =
        impact_for_deflection(std::abs(plan.schedule.theta[k]), v, pot, cascade_coupling(N));
    const double rmin = pericenter_radius({alpha, v, cascade_coupling(N)}, pot);
    dt = std::min(dt, std::min(o.resolution * rmin, o.range_resolution * plan.sigma) / v);
  }
  return dt;
}

}  // namespace

CascadeBuild build_cascade(int N, const CascadeOptions& options) {
  CascadePlan plan = plan_geometry(N);
  plan.order = options.order;
  plan.step = cascade_step(plan, options);
  const PairPotential pot(plan.sigma);
  const double coupling = cascade_coupling(N);
  const double weight = 1.0 / (N + 1.0);

  ParticleSystem2D start(pot, {{0.0, 0.0}}, {{std::sqrt(N + 1.0), 0.0}}, 0.0);
  start.set_force_weight(weight);
  const double h0 = 0.5 * (N + 1.0);

  StepPolicy policy;
  policy.step = plan.step;
  policy.order = plan.order;
  Integrator integ(start, policy);

  std::vector<LatticeVec2> q_sites;
  std::vector<EncounterRecord> records;
  // first guess: a repulsive kick turns P away from Q, so Q on the left of the
  // ray gives a clockwise turn
  int convention = +1;

  for (int k = 1; k <= N; ++k) {
    const Vec2 xp = integ.position(0);
    const Vec2 vp = integ.velocity(0);
    const double speed = norm(vp);
    const double dir = angle_of(vp);
    if (!(vp.x > 0.0)) {
      throw ConstructionError("P no longer moves towards x = k/N at k=" + std::to_string(k));
    }
    // aim for a unit-speed Q_k given P's actual speed
    const double theta_mag = std::asin(std::min(1.0, 1.0 / speed));
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const double alpha = impact_for_deflection(theta_mag, speed, pot, coupling);
    const double xq = static_cast<double>(k) / N;
    const double y_ray = xp.y + (xq - xp.x) * vp.y / vp.x;

    std::optional<EncounterRecord> done;
    for (int attempt = 0; attempt < 2 && !done; ++attempt) {
      const int side = (sign < 0.0 ? 1 : -1) * convention;
      // The model impact parameter misses the discrete dynamics by roughly
      // the step error; a few Newton corrections with the model slope pin
      // |v_Q| = 1 on the simulated encounter itself.
      double a = alpha;
      Integrator trial = integ;
      bool wrong_side = false;
      for (int pass = 0;; ++pass) {
        const Vec2 q{xq, y_ray + side * a / std::cos(dir)};
        trial = integ;
        trial.add_particle(q, {0.0, 0.0});
        trial.stop_after_exit(std::make_pair(std::size_t{0}, static_cast<std::size_t>(k)));
        const double reach = (xq - xp.x) / vp.x + 8.0 * plan.sigma / speed + 1.0;
        if (!trial.advance_to(trial.time() + reach)) {
          throw ConstructionError("P never met Q_" + std::to_string(k));
        }
        if ((turn(vp, trial.velocity(0)) < 0.0) != (sign < 0.0)) {
          wrong_side = true;
          break;
        }
        const double miss = norm(trial.velocity(k)) - 1.0;
        if (std::abs(miss) < 1e-12 || pass == options.refinements) break;
        const double h = 1e-6 * plan.sigma;
        const double lo = std::max(0.0, a - h);
        const double hi = std::min(plan.sigma, a + h);
        const double slope = speed * std::cos(theta_mag) *
                             (lab_deflection({hi, speed, coupling}, pot) -
                              lab_deflection({lo, speed, coupling}, pot)) /
                             (hi - lo);
        if (!(std::abs(slope) > 0.0)) break;
        a = std::clamp(a - miss / slope, 0.0, plan.sigma);
      }
      if (wrong_side) {
        if (attempt == 0) {
          convention = -convention;
          continue;
        }
        throw ConstructionError("deflection sign mismatch at k=" + std::to_string(k) +
                                " on both sides");
      }
      const Vec2 q{xq, y_ray + side * a / std::cos(dir)};
      const Vec2 vp_after = trial.velocity(0);
      const double measured = turn(vp, vp_after);
      EncounterRecord rec;
      rec.k = k;
      rec.impact = a;
      rec.incoming_speed = speed;
      rec.target_deflection = sign * theta_mag;
      rec.measured_deflection = measured;
      rec.side = side;
      rec.flipped = attempt > 0;
      rec.p_velocity = vp_after;
      rec.q_velocity = trial.velocity(k);
      rec.p_velocity_error = relative_error(vp_after, p_velocity_after(plan.schedule, k));
      rec.q_velocity_error = relative_error(rec.q_velocity, q_terminal_velocity(plan.schedule, k));
      for (const auto& e : trial.events()) {
        if (!(e.i == 0 && e.j <= static_cast<std::size_t>(k))) {
          throw ConstructionError("unplanned interaction between " + std::to_string(e.i) +
                                  " and " + std::to_string(e.j));
        }
      }
      const auto& evs = trial.events();
      const RangeEvent& last = evs.back();
      if (last.j != static_cast<std::size_t>(k)) {
        throw ConstructionError("encounter with Q_" + std::to_string(k) + " was not logged last");
      }
      if (k > 1 && !(last.entry > plan.windows[k - 1].exit)) {
        throw ConstructionError("window of Q_" + std::to_string(k) + " overlaps its predecessor");
      }
      if (rec.p_velocity_error > options.velocity_tolerance ||
          rec.q_velocity_error > options.velocity_tolerance) {
        std::ostringstream msg;
        msg << "post-encounter velocities off at k=" << k << ": P " << rec.p_velocity_error
            << ", Q " << rec.q_velocity_error;
        throw ConstructionError(msg.str());
      }
      plan.windows[k] = {last.entry, last.exit};
      plan.offsets[k] = from_lattice(trial.state().lattice_positions()[k].y);
      q_sites.push_back(to_lattice(q));
      integ = std::move(trial);
      done = rec;
    }
    records.push_back(*done);
    if (options.on_encounter) options.on_encounter(*done);
  }
  plan.side_convention = convention;

  std::vector<LatticeVec2> x0{to_lattice(Vec2{0.0, 0.0})};
  std::vector<LatticeVec2> v0{to_lattice(Vec2{std::sqrt(N + 1.0), 0.0})};
  for (const auto& q : q_sites) {
    x0.push_back(q);
    v0.push_back({0, 0});
  }
  ParticleSystem2D initial = ParticleSystem2D::exact(pot, std::move(x0), std::move(v0), 0.0);
  initial.set_force_weight(weight);

  CascadeBuild out{std::move(plan), std::move(initial), std::move(records), 0.0,
                   integ.steps_taken()};
  out.energy_drift = std::abs(total_energy(integ.state()) - h0) / h0;
  return out;
}

Trajectory replay_cascade(const CascadeBuild& build, double t_start, double t_end,
                          StepPolicy policy) {
  if (t_start > 0.0) throw DomainError("cascade replay must start at or before t = 0");
  const double dt = build.plan.step;
  const long long back = static_cast<long long>(std::ceil(-t_start / dt - 1e-9));
  ParticleSystem2D s = shift_free_flight(build.initial, -back, dt, build.plan.order);
  policy.step = dt;
  policy.order = build.plan.order;
  return integrate(s, t_end, std::move(policy));
}

bool CascadeVerification::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CascadeCheck& c) { return c.pass; });
}

CascadeVerification verify_cascade(const CascadeBuild& build, double horizon) {
  const CascadePlan& plan = build.plan;
  const int N = plan.N;
  if (horizon < 0.0) horizon = plan.windows[N].exit + 1.0;

  CascadeVerification rep;
  bool contained = true;
  bool exclusive = true;
  std::string containment_detail;
  double worst_containment = 0.0;

  StepPolicy policy;
  policy.on_interaction_step = [&](const Integrator& it) {
    for (const auto& [i, j] : it.inside_pairs()) {
      if (i != 0) {
        exclusive = false;
        continue;
      }
      const int k = static_cast<int>(j);
      const Vec2 c = plan.centers[k];
      const double r = plan.radii[k];
      const double excess =
          std::max(norm(it.position(0) - c), norm(it.position(j) - c)) - r;
      worst_containment = std::max(worst_containment, excess + r);
      if (excess > 0.0 && contained) {
        contained = false;
        containment_detail = "k=" + std::to_string(k) + " leaves its disc";
      }
    }
  };

  // snapshots before the first window and after the last one
  const double t_first = plan.windows[1].entry;
  const double t_last = plan.windows[N].exit;
  for (int i = 0; i <= 10; ++i) {
    policy.sample_times.push_back(-0.1 + (t_first + 0.1) * 0.999 * i / 10.0);
    policy.sample_times.push_back(t_last + (horizon - t_last) * (0.001 + 0.999 * i / 10.0));
  }

  Trajectory tr = replay_cascade(build, -0.1, horizon, policy);
  rep.energy_drift = tr.energy_drift;
  rep.momentum_drift = tr.momentum_drift;

  // windows
  bool windows_match = tr.events.size() == static_cast<std::size_t>(N) && tr.open_events.empty();
  double worst_window = 0.0;
  rep.measured_windows.assign(N + 1, Window{});
  for (std::size_t e = 0; e < tr.events.size(); ++e) {
    const auto& ev = tr.events[e];
    if (ev.i != 0 || ev.j != e + 1) {
      windows_match = false;
      continue;
    }
    const int k = static_cast<int>(ev.j);
    rep.measured_windows[k] = {ev.entry, ev.exit};
    worst_window = std::max({worst_window, std::abs(ev.entry - plan.windows[k].entry),
                             std::abs(ev.exit - plan.windows[k].exit)});
  }
  bool ordered = windows_match;
  for (int k = 1; k <= N && ordered; ++k) {
    const auto& w = rep.measured_windows[k];
    if (!(w.entry > 0.0 && w.entry < w.exit)) ordered = false;
    if (k > 1 && !(w.entry > rep.measured_windows[k - 1].exit)) ordered = false;
  }
  rep.checks.push_back({"windows_logged", windows_match, static_cast<double>(tr.events.size()),
                        static_cast<double>(N), "one range event per Q_k, with P, in order"});
  rep.checks.push_back({"windows_ordered", ordered, 0.0, 0.0, "0 < t1' < t1'' < ... < tN''"});
  rep.checks.push_back({"windows_match_plan", windows_match && worst_window <= 1e-6,
                        worst_window, 1e-6, ""});
  rep.checks.push_back({"exclusive_interactions", exclusive, 0.0, 0.0,
                        "only the pair (P, Q_k) is within range during window k"});
  rep.checks.push_back({"disc_containment", contained, worst_containment, 0.0,
                        containment_detail});

  // radii
  double worst_r = 0.0;
  bool radii_ok = true;
  const double r_cap = 2.0 * std::numbers::sqrt2 * std::pow(N + 3.0, 1.5) * plan.sigma;
  for (int k = 1; k <= N; ++k) {
    worst_r = std::max(worst_r, plan.radii[k]);
    if (!(plan.radii[k] < r_cap && plan.radii[k] < 1.0 / N)) radii_ok = false;
  }
  rep.checks.push_back({"radius_bounds", radii_ok, worst_r, std::min(r_cap, 1.0 / N),
                        "r_k < 2 sqrt2 (N+3)^{3/2} sigma_N and r_k < 1/N"});

  // offsets
  bool offsets_ok = true;
  for (int k = 1; k <= N; ++k) {
    if (!(std::abs(plan.offsets[k]) <= std::abs(plan.centers[k].y) + plan.radii[k])) {
      offsets_ok = false;
    }
  }
  rep.checks.push_back({"offset_bounds", offsets_ok, 0.0, 0.0, "|y_Qk| <= |y_k| + r_k"});

  // terminal velocities
  const ParticleSystem2D& fin = tr.final_state();
  for (int k = 1; k <= N; ++k) {
    rep.max_q_velocity_error =
        std::max(rep.max_q_velocity_error,
                 relative_error(fin.velocity(k), q_terminal_velocity(plan.schedule, k)));
  }
  rep.p_speed_error = std::abs(norm(fin.velocity(0)) - 1.0);
  rep.checks.push_back({"q_terminal_velocities", rep.max_q_velocity_error <= 1e-4,
                        rep.max_q_velocity_error, 1e-4, ""});
  rep.checks.push_back({"p_terminal_speed", rep.p_speed_error <= 1e-4, rep.p_speed_error, 1e-4,
                        ""});
  double p_dir_error = relative_error(fin.velocity(0), p_velocity_after(plan.schedule, N));
  rep.checks.push_back({"p_terminal_velocity", p_dir_error <= 1e-4, p_dir_error, 1e-4, ""});

  // cluster separation after the last window: no further range events
  bool separated = windows_match && tr.open_events.empty();
  rep.checks.push_back({"cluster_separation", separated, horizon, 0.0,
                        "no pair within sigma_N after tN'' up to the horizon"});

  rep.t_N_measured = rep.measured_windows[N].exit;
  rep.t_N_bound = tN_bound(N);
  rep.checks.push_back({"tN_below_bound", rep.t_N_measured < rep.t_N_bound, rep.t_N_measured,
                        rep.t_N_bound, ""});

  // energy bookkeeping on snapshots outside the cascade
  const double w = 1.0 / (N + 1.0);
  double q_before = 0.0;
  double q_after_err = 0.0;
  for (const auto& snap : tr.snapshots) {
    double q = 0.0;
    for (int k = 1; k <= N; ++k) q += w * norm2(snap.velocity(k));
    const double total = 2.0 * w * total_energy(snap);
    rep.max_total_energy_error = std::max(rep.max_total_energy_error, std::abs(total - 1.0));
    if (snap.time() < t_first) q_before = std::max(q_before, q);
    if (snap.time() > t_last) {
      q_after_err = std::max(q_after_err, std::abs(q - N * w));
      rep.q_energy_after = q;
    }
  }
  rep.q_energy_before = q_before;
  rep.checks.push_back({"q_energy_before", q_before <= 1e-6, q_before, 1e-6, ""});
  rep.checks.push_back({"q_energy_after", q_after_err <= 1e-6, q_after_err, 1e-6,
                        "(1/(N+1)) sum_Q |v|^2 = N/(N+1)"});
  rep.checks.push_back({"total_energy", rep.max_total_energy_error <= 1e-6,
                        rep.max_total_energy_error, 1e-6, "(1/(N+1)) sum |v|^2 = 1"});
  rep.checks.push_back({"energy_drift", rep.energy_drift < 1e-6, rep.energy_drift, 1e-6, ""});
  rep.checks.push_back({"momentum_drift", rep.momentum_drift < 1e-8, rep.momentum_drift, 1e-8,
                        ""});
  return rep;
}

ParticleSystem2D transverse_init(int N, double sigma) {
  if (N < 2 || N % 2 != 0) throw DomainError("transverse flow needs an even N >= 2");
  if (sigma == 0.0) sigma = sigma_for(N);
  if (!(sigma < 1.0 / N)) throw DomainError("transverse flow needs sigma < 1/N");
  std::vector<Vec2> x;
  std::vector<Vec2> v;
  for (int j = 1; j <= N; ++j) {
    x.push_back({static_cast<double>(j) / N, 0.0});
    v.push_back({0.0, j % 2 == 1 ? 1.0 : -1.0});
  }
  return ParticleSystem2D(PairPotential(sigma), x, v, 0.0);
}

ParticleSystem2D reverse_scenario(const CascadeBuild& build, double horizon) {
  if (!(horizon > build.plan.windows[build.plan.N].exit)) {
    throw DomainError("reverse scenario needs a horizon beyond the last window");
  }
  StepPolicy policy;
  Trajectory tr = replay_cascade(build, 0.0, horizon, policy);
  return reverse(tr.final_state());
}

}  // namespace hydrolimit
