#include "derivroots/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "derivroots/errors.hpp"
#include "derivroots/rng.hpp"

namespace derivroots {

double normalized_determinant(const MobiusMap& u) {
  const double scale =
      std::max({std::abs(u.alpha), std::abs(u.beta), std::abs(u.gamma), std::abs(u.delta)});
  if (scale == 0.0 || !std::isfinite(scale)) return 0.0;
  const Complex a = u.alpha / scale, b = u.beta / scale, c = u.gamma / scale, d = u.delta / scale;
  return std::abs(a * d - b * c);
}

void validate(const MobiusMap& u) {
  const double det = normalized_determinant(u);
  if (!(det >= kMobiusDetFloor)) {
    throw ValidationError("mobius", "degenerate map: normalized |alpha delta - beta gamma| = " +
                                        std::to_string(det));
  }
}

SpherePoint mobius_apply(const MobiusMap& u, SpherePoint z) {
  if (z.infinite) {
    if (u.gamma == Complex{}) return SpherePoint::infinity();
    return {u.alpha / u.gamma};
  }
  const Complex den = u.gamma * z.z + u.delta;
  if (den == Complex{}) return SpherePoint::infinity();
  return {(u.alpha * z.z + u.beta) / den};
}

MobiusMap mobius_inverse(const MobiusMap& u) { return {u.delta, -u.beta, -u.gamma, u.alpha}; }

GeneralizedCircle preimage_circle(const MobiusMap& u) {
  // |alpha z + beta| = |gamma z + delta| expands to
  // A |z|^2 + 2 Re(z W) + C = 0.
  const double a2 = std::norm(u.alpha), g2 = std::norm(u.gamma);
  const double A = a2 - g2;
  const Complex W = u.alpha * std::conj(u.beta) - u.gamma * std::conj(u.delta);
  const double C = std::norm(u.beta) - std::norm(u.delta);
  if (std::abs(A) <= 1e-14 * (a2 + g2)) return {true, Complex{}, 0.0};
  const Complex center = -std::conj(W) / A;
  const double r2 = std::norm(W) / (A * A) - C / A;
  return {false, center, std::sqrt(std::max(r2, 0.0))};
}

MobiusMap sample_mobius(std::uint64_t seed) {
  CounterRng rng(derive_seed(seed, "mobius"));
  for (int attempt = 0; attempt < 100; ++attempt) {
    MobiusMap u{rng.complex_normal(), rng.complex_normal(), rng.complex_normal(),
                rng.complex_normal()};
    if (normalized_determinant(u) < 1e-6) continue;
    const GeneralizedCircle c = preimage_circle(u);
    if (c.is_line || !(c.radius >= 1e-3 && c.radius <= 1e3)) continue;
    return u;
  }
  throw DegenerateConfigurationError("sample_mobius rejected 100 consecutive draws");
}

}  // namespace derivroots
