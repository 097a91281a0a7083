#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "derivroots/precision.hpp"

namespace derivroots {

// Points with positive integer multiplicities.
struct RootSet {
  std::vector<Complex> points;
  std::vector<std::size_t> multiplicities;

  static RootSet simple(std::span<const Complex> points);
  // Groups exactly equal values.
  static RootSet from_samples(std::span<const Complex> samples);

  std::size_t degree() const;
  std::size_t size() const { return points.size(); }
  // Each point repeated by its multiplicity.
  std::vector<Complex> expanded() const;
};

void validate(const RootSet& roots);

// Ascending-degree coefficients, leading coefficient nonzero.
template <class C>
struct BasicCoefficients {
  std::vector<C> coeffs;
  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

using Coefficients = BasicCoefficients<Complex>;
using HpCoefficients = BasicCoefficients<HpComplex>;

inline constexpr std::size_t kDefaultDegreeCap = 4096;

// Monic prod (z - xi)^m by balanced divide and conquer. Throws
// EmptyPolynomialError for degree 0 and ScaleError above `cap`.
Coefficients coeffs_from_roots(const RootSet& roots, std::size_t cap = kDefaultDegreeCap);
HpCoefficients coeffs_from_roots_hp(const RootSet& roots, std::size_t cap = kDefaultDegreeCap);

// k-th derivative. Throws EmptyPolynomialError when k > degree.
Coefficients differentiate(const Coefficients& c, std::size_t k);
HpCoefficients differentiate(const HpCoefficients& c, std::size_t k);

HpCoefficients to_hp(const Coefficients& c);

struct AberthOptions {
  std::size_t max_iterations = 400;
  double tolerance = 1e-13;         // on |step| / (1 + |z|)
  double cluster_radius = 1e-6;     // scaled by (1 + |z|)
  unsigned threads = 1;
};

// Collapses points within cluster_radius * (1 + |z|) of each other
// (single linkage) to their centroid with summed multiplicity. Output is
// sorted lexicographically.
RootSet cluster_roots(std::span<const Complex> points, double cluster_radius);

// All roots by Aberth-Ehrlich iteration: a double-precision pass started on
// the Cauchy-bound circle with seeded angular jitter, then a polish in
// 200-bit arithmetic. Multiplicities from post-hoc clustering. Throws
// ConvergenceError if the polish does not converge.
RootSet aberth(const Coefficients& c, std::uint64_t seed, const AberthOptions& options = {});
RootSet aberth(const HpCoefficients& c, std::uint64_t seed, const AberthOptions& options = {});

// Unique positive root of |c_n| x^n = sum_{j<n} |c_j| x^j: every root has
// modulus at most this.
double cauchy_bound(const HpCoefficients& c);

enum class DerivativeMethod { coefficient, ratio };

std::string to_string(DerivativeMethod method);
DerivativeMethod parse_derivative_method(const std::string& name);

struct DerivativeOptions {
  AberthOptions aberth;
  std::size_t degree_cap = kDefaultDegreeCap;  // coefficient method only
  double pole_guard = 1e-12;                   // ratio method step damping
  double stall_tolerance = 1e-9;               // ratio method noise floor
  // Ratio method: reach P^(k) through k first-order steps (zeros of e_1
  // over the previous zero set) instead of iterating on e_k directly. The
  // direct form loses every digit to cancellation in e_k once k is more
  // than a handful, even where the zeros themselves are well conditioned.
  bool chained = true;
};

// Zeros of P^(k) for P = prod (z - xi)^m, total degree n - k. Every point
// with m > k is carried over with multiplicity m - k exactly; the remaining
// zeros come from the chosen method.
RootSet derivative_roots(const RootSet& roots, std::size_t k, DerivativeMethod method,
                         std::uint64_t seed, const DerivativeOptions& options = {});

// Optimal assignment (sum of distances) between the expanded multisets;
// returns the largest matched distance. Sizes must agree.
double matched_distance(const RootSet& a, const RootSet& b);
double matched_distance(std::span<const Complex> a, std::span<const Complex> b);

struct HullCheck {
  bool ok = false;
  // Largest signed distance to the hull boundary: negative inside,
  // positive outside.
  double max_distance = 0.0;
};

HullCheck gauss_lucas_check(const RootSet& parent, const RootSet& child, double tol);

// Convex hull, counter-clockwise, collinear points removed.
std::vector<Complex> convex_hull(std::vector<Complex> points);

// Signed distance from z to the hull (negative inside).
double hull_signed_distance(std::span<const Complex> hull, Complex z);

}  // namespace derivroots
