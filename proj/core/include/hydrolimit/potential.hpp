#pragma once

#include <memory>
#include <string>

namespace hydrolimit {

// Unscaled repulsive profile Phi on (0, inf), vanishing for u >= 1.
class Profile {
 public:
  virtual ~Profile() = default;
  virtual std::string id() const = 0;
  virtual double value(double u) const = 0;
  virtual double slope(double u) const = 0;
  virtual double curvature(double u) const = 0;
  // Phi(lo) - Phi(lo + gap).  Override when it can be formed without
  // cancellation; the scattering integrand depends on it near pericenter.
  virtual double drop(double lo, double gap) const { return value(lo) - value(lo + gap); }
};

// Phi(u) = 1/u + u - 2 on (0, 1], zero beyond.  C^1 at u = 1.
class ReciprocalProfile final : public Profile {
 public:
  std::string id() const override { return "reciprocal-linear"; }
  double value(double u) const override;
  double slope(double u) const override;
  double curvature(double u) const override;
  double drop(double lo, double gap) const override;
};

class PairPotential {
 public:
  explicit PairPotential(double sigma);
  PairPotential(double sigma, std::shared_ptr<const Profile> profile);

  double sigma() const { return sigma_; }
  const Profile& profile() const { return *profile_; }

  // Phi_sigma(r) = Phi(r / sigma).
  double value(double r) const;
  // -d/dr Phi_sigma(r), nonnegative for a repulsive profile.
  double force(double r) const;
  // Phi_sigma(r) - Phi_sigma(r + gap).
  double drop(double r, double gap) const;

 private:
  double sigma_;
  std::shared_ptr<const Profile> profile_;
};

std::shared_ptr<const Profile> default_profile();

double potential_value(double r, double sigma);
double force_magnitude(double r, double sigma);

struct ProfileCheck {
  bool blows_up_at_origin = false;
  bool nonincreasing = false;
  bool convex = false;
  bool vanishes_exactly_at_one = false;
  bool ok() const {
    return blows_up_at_origin && nonincreasing && convex && vanishes_exactly_at_one;
  }
};

// Grid check of the admissibility conditions on a profile.
ProfileCheck check_profile(const Profile& profile, int grid_points = 2000);

}  // namespace hydrolimit
