#include "hydrolimit/scenarios.hpp"

#include <algorithm>
#include <numeric>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

std::vector<double> uniform_times(double a, double b, int count) {
  if (count < 2 || !(b > a)) throw DomainError("uniform times need count >= 2 and b > a");
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = a + (b - a) * i / (count - 1);
  t.back() = b;
  return t;
}

namespace {

// Runs `s` forward on the grid of `policy` (sample times set here) and keeps
// the sampled measures in request order.
ScenarioSamples sample_forward(const ParticleSystem2D& s, const std::vector<double>& times,
                               StepPolicy policy, double t_end) {
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });

  std::vector<Snapshot> sorted;
  policy.sample_times = times;
  policy.keep_samples = false;
  policy.on_sample = [&](const ParticleSystem2D& snap) {
    sorted.push_back({snap.time(), from_state(snap)});
  };
  Trajectory tr = integrate(s, t_end, std::move(policy));

  // Duplicated request times were merged by the integrator.
  ScenarioSamples out;
  out.snapshots.resize(times.size());
  std::size_t k = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double t = times[order[r]];
    while (k + 1 < sorted.size() && sorted[k].t < t) ++k;
    if (k >= sorted.size() || sorted[k].t != t) throw NumericalError("missing scenario sample");
    out.snapshots[order[r]] = sorted[k];
  }
  out.energy_drift = tr.energy_drift;
  out.momentum_drift = tr.momentum_drift;
  out.steps = tr.steps;
  out.step = tr.step;
  return out;
}

}  // namespace

ScenarioSamples ghost_samples(const CascadeBuild& build, const std::vector<double>& times) {
  if (times.empty()) return {};
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  const double dt = build.plan.step;
  const double start = std::min(*lo, 0.0) - dt;
  const long long back = static_cast<long long>(std::ceil(-start / dt - 1e-9));
  ParticleSystem2D s = shift_free_flight(build.initial, -back, dt, build.plan.order);
  StepPolicy policy;
  policy.step = dt;
  policy.order = build.plan.order;
  return sample_forward(s, times, std::move(policy), *hi + dt);
}

ScenarioSamples reverse_samples(const CascadeBuild& build, double horizon,
                                const std::vector<double>& times) {
  if (times.empty()) return {};
  const ParticleSystem2D s = reverse_scenario(build, horizon);
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  if (*lo <= s.time()) throw DomainError("reverse samples must come after -horizon");
  StepPolicy policy;
  policy.step = build.plan.step;
  policy.order = build.plan.order;
  return sample_forward(s, times, std::move(policy), *hi + build.plan.step);
}

ScenarioSamples transverse_samples(int N, const std::vector<double>& times, double sigma) {
  if (times.empty()) return {};
  const ParticleSystem2D s0 = transverse_init(N, sigma);
  std::vector<double> before, after;
  for (double t : times) (t < 0.0 ? before : after).push_back(t);

  ScenarioSamples out;
  out.snapshots.resize(times.size());
  auto place = [&](const ScenarioSamples& part, const std::vector<double>& req) {
    for (std::size_t i = 0; i < req.size(); ++i) {
      const auto pos = std::find(times.begin(), times.end(), req[i]) - times.begin();
      for (std::size_t j = static_cast<std::size_t>(pos); j < times.size(); ++j) {
        if (times[j] == req[i]) out.snapshots[j] = part.snapshots[i];
      }
    }
    out.energy_drift = std::max(out.energy_drift, part.energy_drift);
    out.momentum_drift = std::max(out.momentum_drift, part.momentum_drift);
    out.steps += part.steps;
    out.step = part.step;
  };
  if (!after.empty()) {
    // t = 0 itself is the initial state, which the integrator does not sample
    std::vector<double> req;
    for (double t : after) if (t > 0.0) req.push_back(t);
    ScenarioSamples part;
    if (!req.empty()) {
      part = sample_forward(s0, req, {}, *std::max_element(req.begin(), req.end()) + 1e-3);
    }
    place(part, req);
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (times[j] == 0.0) out.snapshots[j] = {0.0, from_state(s0)};
    }
  }
  if (!before.empty()) {
    // mirror: run the reversed state forward to -t and reverse the samples
    std::vector<double> req;
    for (double t : before) req.push_back(-t);
    ScenarioSamples part =
        sample_forward(reverse(s0), req, {}, *std::max_element(req.begin(), req.end()) + 1e-3);
    for (auto& snap : part.snapshots) {
      snap.t = -snap.t;
      for (auto& v : snap.m.v) v = -v;
    }
    place(part, before);
  }
  return out;
}

TwoBodyEncounter two_body_encounter(double impact, double speed, double sigma,
                                    StepPolicy policy) {
  if (!(sigma > 0.0) || !(speed > 0.0) || impact < 0.0) {
    throw DomainError("encounter needs sigma > 0, speed > 0, impact >= 0");
  }
  const ParticleSystem2D s(PairPotential(sigma), {{-1.5 * sigma, impact}, {0.0, 0.0}},
                           {{speed, 0.0}, {0.0, 0.0}});
  policy.stop_after_exit = std::make_pair(std::size_t{0}, std::size_t{1});
  policy.keep_samples = false;
  // straight-line crossing of the range plus the longest admissible stay
  const double t_end = (3.0 * sigma + 4.0 * sigma) / speed;
  const Trajectory tr = integrate(s, t_end, std::move(policy));
  TwoBodyEncounter e;
  for (const auto& ev : tr.events) {
    if (ev.i == 0 && ev.j == 1) {
      e.interacted = true;
      e.duration = ev.exit - ev.entry;
    }
  }
  const ParticleSystem2D& f = tr.final_state();
  e.p_velocity = f.velocity(0);
  e.q_velocity = f.velocity(1);
  e.deflection = std::abs(angle_of(e.p_velocity));
  e.energy_drift = tr.energy_drift;
  return e;
}

EmpiricalMeasure q_subsystem(const EmpiricalMeasure& cascade) {
  if (cascade.size() < 2) throw DomainError("cascade measure needs P and at least one Q");
  std::vector<std::size_t> idx(cascade.size() - 1);
  std::iota(idx.begin(), idx.end(), 1);
  return restrict_to(cascade, idx);
}

double q_kinetic_energy(const ParticleSystem2D& s) {
  if (s.size() < 2) throw DomainError("cascade state needs P and at least one Q");
  double e = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) e += norm2(s.velocity(k));
  return e / static_cast<double>(s.size());
}

}  // namespace hydrolimit
