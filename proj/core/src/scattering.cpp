#include "hydrolimit/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hydrolimit/errors.hpp"
#include "quadrature.hpp"

namespace hydrolimit {

namespace {

constexpr double kQuadratureTolerance = 1e-10;

void validate(const ScatteringQuery& q, const PairPotential& p) {
  if (!(q.speed > 0.0) || !std::isfinite(q.speed)) {
    throw DomainError("scattering speed must be positive");
  }
  if (!(q.coupling > 0.0)) throw DomainError("scattering coupling must be positive");
  if (!(q.impact >= 0.0) || q.impact > p.sigma()) {
    throw DomainError("impact parameter must lie in [0, sigma]");
  }
}

}  // namespace

double pericenter_radius(const ScatteringQuery& q, const PairPotential& p) {
  validate(q, p);
  const double sigma = p.sigma();
  const double alpha = q.impact;
  if (alpha == sigma) return sigma;
  const double energy = q.energy();
  // strictly decreasing in r, +inf at 0 and alpha^2/sigma^2 - 1 <= 0 at sigma
  auto excess = [&](double r) { return alpha * alpha / (r * r) + p.value(r) / energy - 1.0; };
  double hi = sigma;
  double lo = 0.5 * sigma;
  while (excess(lo) <= 0.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300) throw NumericalError("pericenter bracket collapsed");
  }
  for (int it = 0; it < 2000; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double pericenter_angle(const ScatteringQuery& q, const PairPotential& p, double* error_estimate) {
  validate(q, p);
  if (error_estimate) *error_estimate = 0.0;
  const double sigma = p.sigma();
  const double alpha = q.impact;
  if (alpha == 0.0) return 0.0;
  const double r_min = pericenter_radius(q, p);
  const double y_cut = sigma / r_min;
  // beyond r = sigma the path is straight; the remaining angle is arcsin(alpha/sigma)
  const double tail = std::asin(std::min(1.0, alpha / sigma));
  if (!(y_cut > 1.0)) return tail;

  const double energy = q.energy();
  const double b = alpha / r_min;
  // r = r_min (1 + s^2); the radicand vanishes like s^2 at s = 0, which
  // cancels against the Jacobian 2s
  auto integrand = [&](double s) {
    if (s == 0.0) s = 1e-300;
    const double s2 = s * s;
    const double y = 1.0 + s2;
    const double radicand =
        b * b * s2 * (2.0 + s2) / (y * y) + p.drop(r_min, r_min * s2) / energy;
    if (!(radicand > 0.0)) return 0.0;
    return 2.0 * s * b / (y * y * std::sqrt(radicand));
  };
  const auto head = detail::integrate_adaptive(integrand, 0.0, std::sqrt(y_cut - 1.0),
                                               kQuadratureTolerance);
  if (!head.converged) {
    std::ostringstream msg;
    msg << "pericenter angle quadrature did not converge: alpha=" << alpha
        << " speed=" << q.speed << " sigma=" << sigma << " error=" << head.error
        << " panels=" << head.intervals;
    throw NumericalError(msg.str());
  }
  if (error_estimate) *error_estimate = head.error;
  return std::clamp(head.value + tail, 0.0, std::numbers::pi / 2);
}

double lab_deflection(const ScatteringQuery& q, const PairPotential& p) {
  return std::numbers::pi / 2 - pericenter_angle(q, p);
}

ScatteringResult scatter(const ScatteringQuery& q, const PairPotential& p) {
  ScatteringResult r;
  r.r_min = pericenter_radius(q, p);
  r.pericenter_angle = pericenter_angle(q, p, &r.quadrature_error);
  r.deflection = std::numbers::pi / 2 - r.pericenter_angle;
  r.time_bound = interaction_time_bound(p.sigma(), q.speed);
  return r;
}

double impact_for_deflection(double theta_target, double speed, const PairPotential& p,
                             double coupling) {
  constexpr double half_pi = std::numbers::pi / 2;
  if (!(theta_target >= 0.0) || theta_target > half_pi) {
    throw DomainError("target deflection must lie in [0, pi/2]");
  }
  const double sigma = p.sigma();
  if (theta_target == 0.0) return sigma;
  if (theta_target == half_pi) return 0.0;
  auto gap = [&](double alpha) {
    return lab_deflection({alpha, speed, coupling}, p) - theta_target;
  };

  // deflection runs from pi/2 at alpha = 0 down to 0 at alpha = sigma;
  // take the first sign change on a uniform scan
  constexpr int scan = 64;
  double lo = 0.0;
  double hi = sigma;
  double g_lo = half_pi - theta_target;
  bool bracketed = false;
  for (int i = 1; i <= scan; ++i) {
    double a = (i == scan) ? sigma : sigma * i / scan;
    double g = gap(a);
    if (g <= 0.0) {
      hi = a;
      bracketed = true;
      if (g == 0.0) return a;
      break;
    }
    lo = a;
    g_lo = g;
  }
  if (!bracketed) throw NumericalError("impact parameter bracket not found");

  double best = lo;
  double best_gap = std::abs(g_lo);
  for (int it = 0; it < 300; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double g = gap(mid);
    if (std::abs(g) < best_gap) {
      best = mid;
      best_gap = std::abs(g);
    }
    if (g > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (best_gap < 1e-13) break;
  }
  if (best_gap > 1e-10) {
    std::ostringstream msg;
    msg << "impact parameter inversion stalled at |residual|=" << best_gap;
    throw NumericalError(msg.str());
  }
  return best;
}

double interaction_time_bound(double sigma, double speed) {
  if (!(sigma > 0.0) || !(speed > 0.0)) {
    throw DomainError("interaction time bound needs positive sigma and speed");
  }
  return 4.0 * sigma / speed;
}

}  // namespace hydrolimit
