#include "hydrolimit/potential.hpp"

#include <cmath>
#include <string>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

double ReciprocalProfile::value(double u) const {
  if (u >= 1.0) return 0.0;
  return 1.0 / u + u - 2.0;
}

double ReciprocalProfile::slope(double u) const {
  if (u >= 1.0) return 0.0;
  return 1.0 - 1.0 / (u * u);
}

double ReciprocalProfile::curvature(double u) const {
  if (u >= 1.0) return 0.0;
  return 2.0 / (u * u * u);
}

double ReciprocalProfile::drop(double lo, double gap) const {
  if (lo >= 1.0) return 0.0;
  double hi = lo + gap;
  if (hi >= 1.0) return value(lo);
  // 1/lo - 1/hi + lo - hi, grouped so that small gaps stay accurate
  return gap * (1.0 / (lo * hi) - 1.0);
}

std::shared_ptr<const Profile> default_profile() {
  static const auto profile = std::make_shared<const ReciprocalProfile>();
  return profile;
}

PairPotential::PairPotential(double sigma) : PairPotential(sigma, default_profile()) {}

PairPotential::PairPotential(double sigma, std::shared_ptr<const Profile> profile)
    : sigma_(sigma), profile_(std::move(profile)) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("potential range must be positive, got " + std::to_string(sigma));
  }
  if (!profile_) throw DomainError("potential profile is null");
}

namespace {
void require_positive_distance(double r) {
  if (!(r > 0.0)) throw DomainError("pair distance must be positive, got " + std::to_string(r));
}
}  // namespace

double PairPotential::value(double r) const {
  require_positive_distance(r);
  return profile_->value(r / sigma_);
}

double PairPotential::force(double r) const {
  require_positive_distance(r);
  return -profile_->slope(r / sigma_) / sigma_;
}

double PairPotential::drop(double r, double gap) const {
  require_positive_distance(r);
  return profile_->drop(r / sigma_, gap / sigma_);
}

double potential_value(double r, double sigma) { return PairPotential(sigma).value(r); }

double force_magnitude(double r, double sigma) { return PairPotential(sigma).force(r); }

ProfileCheck check_profile(const Profile& profile, int grid_points) {
  ProfileCheck c;
  c.blows_up_at_origin = profile.value(1e-6) > 1e5;
  c.vanishes_exactly_at_one = profile.value(1.0) == 0.0;
  c.nonincreasing = true;
  c.convex = true;
  for (int i = 1; i <= grid_points; ++i) {
    double u = 2.0 * i / grid_points;
    if (profile.slope(u) > 0.0) c.nonincreasing = false;
    if (profile.curvature(u) < 0.0) c.convex = false;
    if (u < 1.0 && profile.value(u) == 0.0) c.vanishes_exactly_at_one = false;
    if (u >= 1.0 && profile.value(u) != 0.0) c.vanishes_exactly_at_one = false;
  }
  return c;
}

}  // namespace hydrolimit
