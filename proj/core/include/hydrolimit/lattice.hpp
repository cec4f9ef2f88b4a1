#pragma once

#include <cmath>
#include <cstdint>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/vec2.hpp"

namespace hydrolimit {

// Phase-space coordinates are stored as signed 128-bit multiples of 2^-100.
// Every update is an integer increment computed by a sign-symmetric rounding,
// which makes the stepper an exact involution under velocity reversal and
// lets replays reproduce a trajectory bit for bit.
using lattice_t = __int128;

inline constexpr double kLatticeQuantum = 0x1p-100;
inline constexpr double kLatticeScale = 0x1p100;
inline constexpr double kLatticeLimit = 0x1p125;

struct LatticeVec2 {
  lattice_t x = 0;
  lattice_t y = 0;
  friend constexpr bool operator==(const LatticeVec2&, const LatticeVec2&) = default;
};

// Nearest integer, ties to even; round(-y) == -round(y).
inline lattice_t lattice_round(double y) {
  double r = std::nearbyint(y);
  if (!(std::abs(r) < kLatticeLimit)) throw NumericalError("lattice coordinate overflow");
  return static_cast<lattice_t>(r);
}

inline lattice_t to_lattice(double v) { return lattice_round(v * kLatticeScale); }
inline double from_lattice(lattice_t v) { return static_cast<double>(v) * kLatticeQuantum; }

inline LatticeVec2 to_lattice(Vec2 v) { return {to_lattice(v.x), to_lattice(v.y)}; }
inline Vec2 from_lattice(const LatticeVec2& v) { return {from_lattice(v.x), from_lattice(v.y)}; }

// Exact difference first, one rounding afterwards.
inline Vec2 lattice_difference(const LatticeVec2& a, const LatticeVec2& b) {
  return {from_lattice(a.x - b.x), from_lattice(a.y - b.y)};
}

}  // namespace hydrolimit
