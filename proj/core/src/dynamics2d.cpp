#include "hydrolimit/dynamics2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

namespace {

constexpr double kCoincidenceGuard = 1e-12;

std::vector<LatticeVec2> to_lattice_all(const std::vector<Vec2>& v) {
  std::vector<LatticeVec2> out;
  out.reserve(v.size());
  for (const auto& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DomainError("particle coordinates must be finite");
    }
    out.push_back(to_lattice(p));
  }
  return out;
}

std::vector<double> composition(int order) {
  if (order == 2) return {1.0};
  if (order == 4) {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    return {w1, 1.0 - 2.0 * w1, w1};
  }
  throw DomainError("integrator order must be 2 or 4");
}

// Smallest pair distance compatible with total energy `energy` when each pair
// carries weight c: c Phi_sigma(r) <= energy.
double closest_admissible_distance(const PairPotential& p, double c, double energy) {
  const double target = energy / c;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (p.profile().value(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo * p.sigma();
}

}  // namespace

ParticleSystem2D::ParticleSystem2D(PairPotential potential, const std::vector<Vec2>& positions,
                                   const std::vector<Vec2>& velocities, double time)
    : ParticleSystem2D(std::move(potential), to_lattice_all(positions), to_lattice_all(velocities),
                       time, 0) {}

ParticleSystem2D ParticleSystem2D::exact(PairPotential potential,
                                         std::vector<LatticeVec2> positions,
                                         std::vector<LatticeVec2> velocities, double time) {
  return ParticleSystem2D(std::move(potential), std::move(positions), std::move(velocities), time,
                          0);
}

ParticleSystem2D::ParticleSystem2D(PairPotential potential, std::vector<LatticeVec2> positions,
                                   std::vector<LatticeVec2> velocities, double time, int)
    : potential_(std::move(potential)),
      positions_(std::move(positions)),
      velocities_(std::move(velocities)),
      time_(time) {
  if (positions_.size() != velocities_.size()) {
    throw DomainError("positions and velocities differ in length");
  }
  if (!std::isfinite(time_)) throw DomainError("time must be finite");
}

double ParticleSystem2D::force_weight() const {
  if (weight_) return *weight_;
  return size() == 0 ? 1.0 : 1.0 / static_cast<double>(size());
}

void ParticleSystem2D::set_force_weight(double c) {
  if (!(c > 0.0)) throw DomainError("force weight must be positive");
  weight_ = c;
}

std::vector<Vec2> ParticleSystem2D::positions() const {
  std::vector<Vec2> out;
  out.reserve(size());
  for (const auto& p : positions_) out.push_back(from_lattice(p));
  return out;
}

std::vector<Vec2> ParticleSystem2D::velocities() const {
  std::vector<Vec2> out;
  out.reserve(size());
  for (const auto& v : velocities_) out.push_back(from_lattice(v));
  return out;
}

void ParticleSystem2D::add_particle(Vec2 position, Vec2 velocity) {
  positions_.push_back(to_lattice_all({position}).front());
  velocities_.push_back(to_lattice_all({velocity}).front());
}

std::vector<Vec2> accelerations(const ParticleSystem2D& s) {
  const std::size_t n = s.size();
  const double c = s.force_weight();
  const double sigma = s.sigma();
  std::vector<Vec2> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Vec2 r = s.separation(i, j);
      double d = norm(r);
      if (d >= sigma) continue;
      if (d < kCoincidenceGuard) {
        throw SingularityError("particles " + std::to_string(i) + " and " + std::to_string(j) +
                               " coincide inside the interaction range");
      }
      Vec2 f = (c * s.potential().force(d) / d) * r;
      a[i] += f;
      a[j] -= f;
    }
  }
  return a;
}

double total_energy(const ParticleSystem2D& s) {
  const std::size_t n = s.size();
  double kinetic = 0.0;
  for (std::size_t i = 0; i < n; ++i) kinetic += 0.5 * norm2(s.velocity(i));
  double pair = 0.0;
  const double sigma = s.sigma();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = norm(s.separation(i, j));
      if (d < sigma) pair += s.potential().value(d);
    }
  }
  return kinetic + s.force_weight() * pair;
}

Vec2 total_momentum(const ParticleSystem2D& s) {
  lattice_t px = 0;
  lattice_t py = 0;
  for (const auto& v : s.lattice_velocities()) {
    px += v.x;
    py += v.y;
  }
  return {from_lattice(px), from_lattice(py)};
}

ParticleSystem2D reverse(const ParticleSystem2D& s) {
  ParticleSystem2D r = s;
  for (auto& v : r.lattice_velocities()) {
    v.x = -v.x;
    v.y = -v.y;
  }
  r.set_time(-s.time());
  return r;
}

double derived_step(const ParticleSystem2D& s, const StepPolicy& policy) {
  if (policy.step > 0.0) return policy.step;
  if (!(policy.resolution > 0.0)) throw DomainError("step resolution must be positive");
  const double energy = total_energy(s);
  if (!(energy > 0.0)) return 1.0;
  const double r_floor = closest_admissible_distance(s.potential(), s.force_weight(), energy);
  if (!(policy.range_resolution > 0.0)) throw DomainError("range resolution must be positive");
  const double dt = std::min(policy.resolution * r_floor, policy.range_resolution * s.sigma()) /
                    std::sqrt(2.0 * energy);
  if (!(dt >= 1e-15)) {
    std::ostringstream msg;
    msg << "step underflow: derived step " << dt << " (closest admissible distance " << r_floor
        << ", energy " << energy << ")";
    throw NumericalError(msg.str());
  }
  return dt;
}

Integrator::Integrator(ParticleSystem2D initial, StepPolicy policy)
    : state_(std::move(initial)), policy_(std::move(policy)) {
  substeps_ = composition(policy_.order);
  dt_ = derived_step(state_, policy_);
  if (!(dt_ >= 1e-15)) throw NumericalError("step underflow: dt below 1e-15");
  origin_ = state_.time();
  coupling_ = state_.force_weight();
  pending_samples_ = policy_.sample_times;
  std::sort(pending_samples_.begin(), pending_samples_.end());
  pending_samples_.erase(
      std::remove_if(pending_samples_.begin(), pending_samples_.end(),
                     [&](double t) { return !(t > origin_); }),
      pending_samples_.end());
  pending_samples_.erase(std::unique(pending_samples_.begin(), pending_samples_.end()),
                         pending_samples_.end());
  set_speed_bound();
  rebuild_candidates();
  // pairs already within range start their interval now
  for (const auto& [i, j] : candidates_) {
    if (norm(state_.separation(i, j)) < state_.sigma()) {
      open_[{i, j}] = origin_;
      inside_.push_back({i, j});
    }
  }
}

double Integrator::time() const { return grid_time(n_); }

void Integrator::set_speed_bound() {
  const double energy = total_energy(state_);
  speed_bound_ = 1.01 * std::sqrt(2.0 * std::max(energy, 0.0)) + 1e-300;
}

void Integrator::add_particle(Vec2 position, Vec2 velocity) {
  state_.add_particle(position, velocity);
  const std::size_t k = state_.size() - 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (norm(state_.separation(i, k)) < state_.sigma()) {
      throw DomainError("added particle is within range of particle " + std::to_string(i));
    }
  }
  set_speed_bound();
  rebuild_candidates();
  kicks_valid_ = false;
}

void Integrator::rebuild_candidates() {
  const std::size_t n = state_.size();
  // path length of a step can exceed dt * v because of the backward substep
  double path = 0.0;
  for (double w : substeps_) path += std::abs(w);
  candidate_radius_ =
      state_.sigma() + 2.0 * speed_bound_ * path * dt_ * static_cast<double>(rebuild_interval_ + 1);
  candidates_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norm(state_.separation(i, j)) < candidate_radius_) candidates_.push_back({i, j});
    }
  }
  candidates_built_at_ = n_;
}

void Integrator::compute_kicks() {
  kicks_.clear();
  const double sigma = state_.sigma();
  for (const auto& [i, j] : candidates_) {
    Vec2 r = state_.separation(i, j);
    double d = norm(r);
    if (d >= sigma) continue;
    if (d < kCoincidenceGuard) {
      throw SingularityError("particles " + std::to_string(i) + " and " + std::to_string(j) +
                             " coincide inside the interaction range");
    }
    double scale = coupling_ * state_.potential().force(d) / d;
    kicks_.push_back({i, j, scale * r.x, scale * r.y});
  }
  kicks_valid_ = true;
}

void Integrator::apply_kicks(double h) {
  auto& v = state_.lattice_velocities();
  for (const auto& k : kicks_) {
    lattice_t jx = lattice_round(h * k.ax * kLatticeScale);
    lattice_t jy = lattice_round(h * k.ay * kLatticeScale);
    v[k.i].x += jx;
    v[k.i].y += jy;
    v[k.j].x -= jx;
    v[k.j].y -= jy;
  }
}

void Integrator::drift(double h) {
  auto& x = state_.lattice_positions();
  const auto& v = state_.lattice_velocities();
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i].x += lattice_round(h * static_cast<double>(v[i].x));
    x[i].y += lattice_round(h * static_cast<double>(v[i].y));
  }
}

void Integrator::single_step() {
  if (!kicks_valid_) compute_kicks();
  for (double w : substeps_) {
    const double h = w * dt_;
    apply_kicks(0.5 * h);
    drift(h);
    compute_kicks();
    apply_kicks(0.5 * h);
  }
}

double Integrator::crossing_time(const std::vector<LatticeVec2>& x0,
                                 const std::vector<LatticeVec2>& v0, std::size_t i,
                                 std::size_t j) const {
  const Vec2 p0 = lattice_difference(x0[i], x0[j]);
  const Vec2 p1 = state_.separation(i, j);
  const Vec2 m0 = dt_ * lattice_difference(v0[i], v0[j]);
  const Vec2 m1 = dt_ * lattice_difference(state_.lattice_velocities()[i],
                                           state_.lattice_velocities()[j]);
  const double s2 = state_.sigma() * state_.sigma();
  auto gap = [&](double u) {
    double u2 = u * u;
    double u3 = u2 * u;
    Vec2 h = (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 +
             (u3 - u2) * m1;
    return norm2(h) - s2;
  };
  double lo = 0.0;
  double hi = 1.0;
  double g_lo = gap(lo);
  if ((g_lo < 0.0) == (gap(hi) < 0.0)) return grid_time(n_);
  // resolve to well below 1e-12 in time
  while ((hi - lo) * dt_ > 1e-14) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double g = gap(mid);
    if ((g < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
    }
  }
  return grid_time(n_ - 1) + 0.5 * (lo + hi) * dt_;
}

bool Integrator::detect_crossings(const std::vector<LatticeVec2>& x0,
                                  const std::vector<LatticeVec2>& v0) {
  const double sigma = state_.sigma();
  bool changed = false;
  inside_.clear();
  for (const auto& pr : candidates_) {
    const auto [i, j] = pr;
    const bool now_inside = norm(state_.separation(i, j)) < sigma;
    auto it = open_.find(pr);
    if (now_inside) inside_.push_back(pr);
    if (now_inside && it == open_.end()) {
      open_[pr] = crossing_time(x0, v0, i, j);
      changed = true;
    } else if (!now_inside && it != open_.end()) {
      double exit = crossing_time(x0, v0, i, j);
      events_.push_back({i, j, it->second, std::max(exit, it->second)});
      open_.erase(it);
      changed = true;
      if (policy_.stop_after_exit && *policy_.stop_after_exit == pr) stop_requested_ = true;
    }
  }
  return changed;
}

long long Integrator::free_steps_available() const {
  const std::size_t n = state_.size();
  const double sigma = state_.sigma();
  double earliest = std::numeric_limits<double>::infinity();
  double reach = 0.0;
  for (double w : substeps_) reach += std::abs(w);
  reach *= dt_;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Vec2 r = state_.separation(i, j);
      Vec2 w = lattice_difference(state_.lattice_velocities()[i], state_.lattice_velocities()[j]);
      double b = dot(r, w);
      if (b >= 0.0) {
        // Substeps of a composed step may run up to one step backwards in
        // time; a receding pair must be clear of the range over that reach.
        if (norm2(r - reach * w) < sigma * sigma) return 0;
        continue;
      }
      double c = norm2(r) - sigma * sigma;
      if (c <= 0.0) return 0;
      double a = norm2(w);
      double disc = b * b - a * c;
      if (disc < 0.0) continue;
      earliest = std::min(earliest, c / (-b + std::sqrt(disc)));
    }
  }
  if (!std::isfinite(earliest)) return std::numeric_limits<long long>::max();
  double steps = std::floor(earliest / dt_) - 2.0;
  if (steps <= 0.0) return 0;
  if (steps > 9e18) return std::numeric_limits<long long>::max();
  return static_cast<long long>(steps);
}

namespace {

LatticeVec2 step_displacement(const LatticeVec2& v, double dt, const std::vector<double>& sub) {
  LatticeVec2 d;
  for (double w : sub) {
    const double h = w * dt;
    d.x += lattice_round(h * static_cast<double>(v.x));
    d.y += lattice_round(h * static_cast<double>(v.y));
  }
  return d;
}

}  // namespace

LatticeVec2 free_step_displacement(const LatticeVec2& velocity, double dt, int order) {
  return step_displacement(velocity, dt, composition(order));
}

ParticleSystem2D shift_free_flight(const ParticleSystem2D& s, long long steps, double dt,
                                   int order) {
  const auto sub = composition(order);
  ParticleSystem2D out = s;
  auto& x = out.lattice_positions();
  const auto& v = out.lattice_velocities();
  const lattice_t count = steps;
  for (std::size_t i = 0; i < x.size(); ++i) {
    LatticeVec2 d = step_displacement(v[i], dt, sub);
    x[i].x += count * d.x;
    x[i].y += count * d.y;
  }
  out.set_time(s.time() + static_cast<double>(steps) * dt);
  return out;
}

void Integrator::jump(long long m) {
  auto& x = state_.lattice_positions();
  const auto& v = state_.lattice_velocities();
  const lattice_t count = m;
  for (std::size_t i = 0; i < x.size(); ++i) {
    LatticeVec2 d = step_displacement(v[i], dt_, substeps_);
    x[i].x += count * d.x;
    x[i].y += count * d.y;
  }
  n_ += m;
  state_.set_time(grid_time(n_));
  kicks_valid_ = false;
  rebuild_candidates();
}

ParticleSystem2D Integrator::extrapolated(double t) const {
  const double offset = t - grid_time(n_);
  std::vector<Vec2> x = state_.positions();
  std::vector<Vec2> v = state_.velocities();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += offset * v[i];
  ParticleSystem2D out(state_.potential(), x, v, t);
  out.set_force_weight(coupling_);
  return out;
}

void Integrator::emit_samples_before(double t_limit, std::vector<ParticleSystem2D>* out) {
  while (next_sample_ < pending_samples_.size() && pending_samples_[next_sample_] < t_limit) {
    ParticleSystem2D snap = extrapolated(pending_samples_[next_sample_]);
    if (policy_.on_sample) policy_.on_sample(snap);
    if (out && policy_.keep_samples) out->push_back(std::move(snap));
    ++next_sample_;
  }
}

std::vector<RangeEvent> Integrator::open_events() const {
  std::vector<RangeEvent> out;
  for (const auto& [pr, entry] : open_) {
    out.push_back({pr.first, pr.second, entry, std::numeric_limits<double>::infinity()});
  }
  return out;
}

bool Integrator::advance_to(double t_end, std::vector<ParticleSystem2D>* samples) {
  const double span = (t_end - origin_) / dt_;
  if (!std::isfinite(span) || span > 9e18) throw DomainError("integration horizon out of range");
  const long long target = std::llround(span);
  if (target < n_) throw DomainError("advance_to cannot move backwards in time");
  stop_requested_ = false;
  std::vector<LatticeVec2> x0;
  std::vector<LatticeVec2> v0;
  while (n_ < target) {
    if (open_.empty()) {
      long long m = std::min(free_steps_available(), target - n_);
      if (m >= 1) {
        emit_samples_before(grid_time(n_ + m), samples);
        jump(m);
        continue;
      }
    }
    emit_samples_before(grid_time(n_ + 1), samples);
    if (n_ - candidates_built_at_ >= rebuild_interval_) rebuild_candidates();
    x0 = state_.lattice_positions();
    v0 = state_.lattice_velocities();
    single_step();
    ++n_;
    ++steps_taken_;
    state_.set_time(grid_time(n_));
    const bool changed = detect_crossings(x0, v0);
    if (policy_.on_interaction_step && (changed || !inside_.empty())) {
      policy_.on_interaction_step(*this);
    }
    if (stop_requested_) return true;
  }
  emit_samples_before(t_end + 0.5 * dt_, samples);
  return false;
}

Trajectory integrate(const ParticleSystem2D& s, double t_end, StepPolicy policy) {
  if (t_end < s.time()) {
    for (double& t : policy.sample_times) t = -t;
    if (policy.stop_after_exit) throw DomainError("stop_after_exit needs forward integration");
    auto fwd = integrate(reverse(s), -t_end, std::move(policy));
    Trajectory out;
    for (auto it = fwd.snapshots.rbegin(); it != fwd.snapshots.rend(); ++it) {
      out.snapshots.push_back(reverse(*it));
    }
    for (const auto& e : fwd.events) out.events.push_back({e.i, e.j, -e.exit, -e.entry});
    std::sort(out.events.begin(), out.events.end(),
              [](const RangeEvent& a, const RangeEvent& b) { return a.entry < b.entry; });
    for (const auto& e : fwd.open_events) {
      out.open_events.push_back({e.i, e.j, -e.entry, std::numeric_limits<double>::infinity()});
    }
    out.last = reverse(*fwd.last);
    out.step = fwd.step;
    out.steps = fwd.steps;
    out.energy_drift = fwd.energy_drift;
    out.momentum_drift = fwd.momentum_drift;
    return out;
  }

  const double h0 = total_energy(s);
  const Vec2 p0 = total_momentum(s);
  const double tolerance = policy.energy_tolerance;
  Integrator stepper(s, std::move(policy));
  Trajectory out;
  out.step = stepper.step();
  out.snapshots.push_back(s);
  std::vector<ParticleSystem2D> samples;
  out.stopped_early = stepper.advance_to(t_end, &samples);
  for (auto& snap : samples) out.snapshots.push_back(std::move(snap));
  out.last = stepper.state();
  if (out.last->time() > out.snapshots.back().time()) out.snapshots.push_back(*out.last);
  out.events = stepper.events();
  out.open_events = stepper.open_events();
  out.steps = stepper.steps_taken();

  const double h1 = total_energy(*out.last);
  out.energy_drift = h0 != 0.0 ? std::abs(h1 - h0) / std::abs(h0) : std::abs(h1 - h0);
  out.momentum_drift = norm(total_momentum(*out.last) - p0);
  if (out.energy_drift > tolerance) {
    std::ostringstream msg;
    msg << "energy drift " << out.energy_drift << " exceeds tolerance " << tolerance
        << " (H0=" << h0 << ", H1=" << h1 << ", step=" << out.step << ", steps=" << out.steps
        << ", t=" << out.last->time() << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace hydrolimit
