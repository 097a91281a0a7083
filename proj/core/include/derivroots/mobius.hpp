#pragma once

#include <cstdint>

#include "derivroots/precision.hpp"

namespace derivroots {

// A point of the Riemann sphere.
struct SpherePoint {
  Complex z{};
  bool infinite = false;

  static SpherePoint infinity() { return {Complex{}, true}; }
  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;
};

// z -> (alpha z + beta) / (gamma z + delta).
struct MobiusMap {
  Complex alpha{1.0, 0.0};
  Complex beta{};
  Complex gamma{};
  Complex delta{1.0, 0.0};

  static MobiusMap identity() { return {}; }
};

inline constexpr double kMobiusDetFloor = 1e-9;

// |det| after scaling the largest coefficient to modulus 1.
double normalized_determinant(const MobiusMap& u);

// Throws ValidationError("mobius", ...) when the map is degenerate.
void validate(const MobiusMap& u);

SpherePoint mobius_apply(const MobiusMap& u, SpherePoint z);
inline SpherePoint mobius_apply(const MobiusMap& u, Complex z) { return mobius_apply(u, SpherePoint{z}); }
MobiusMap mobius_inverse(const MobiusMap& u);

struct GeneralizedCircle {
  bool is_line = false;
  Complex center{};
  double radius = 0.0;
};

// u^{-1}(unit circle). Reported as a line when |alpha|^2 - |gamma|^2 is
// negligible against |alpha|^2 + |gamma|^2.
GeneralizedCircle preimage_circle(const MobiusMap& u);

// Independent standard complex Gaussian coefficients, redrawn until the
// normalized determinant is at least 1e-6 and the preimage of the unit
// circle is a circle with radius in [1e-3, 1e3]. Throws
// DegenerateConfigurationError after 100 rejected draws.
MobiusMap sample_mobius(std::uint64_t seed);

}  // namespace derivroots
