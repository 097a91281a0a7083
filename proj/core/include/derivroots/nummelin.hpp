#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "derivroots/measures.hpp"
#include "derivroots/rng.hpp"

namespace derivroots {

// Y = 1/(a - xi) dominates c_a * Uniform(D(w_a, r_a)).
struct DoeblinParams {
  double c_a = 0.0;
  Complex w_a;
  double r_a = 0.0;
};

// xi's law dominates c0 * Lebesgue on D(z0, r0).
struct DoeblinSource {
  Complex z0;
  double r0 = 0.0;
  double c0 = 0.0;
};

// Constructive splitting for the inversion map T_a(w) = 1/(a - w).
// With r' = min(r0, |a - z0|/2), T_a maps D(z0, r') onto a disk D_a; the
// returned ball has the same center and half the radius, and
// c_a = c0 * m_a * area, with m_a = (|a - z0| - r')^4 the infimum of the
// inverse Jacobian |a - w|^4 over D(z0, r').
// Throws DegenerateConfigurationError when a == z0, ValidationError when
// r0 <= 0, c0 <= 0, or c0 * pi * r0^2 > 1.
DoeblinParams nummelin_split(Complex z0, double r0, double c0, Complex a);

// The Lebesgue component carried by the first UniformDisk found in the
// spec (scaled by its mixture weight), if any.
std::optional<DoeblinSource> doeblin_source(const MeasureSpec& spec);

using PointSampler = std::function<Complex(CounterRng&)>;

struct SplitDraw {
  bool epsilon = false;
  Complex value;
};

// eps_i ~ Bernoulli(c_a); value ~ Uniform(D(w_a, r_a)) when eps_i = 1, else
// a draw from `residual`. Draw i uses its own stream.
std::vector<SplitDraw> split_sampler(const DoeblinParams& params, const PointSampler& residual,
                                     std::size_t n, std::uint64_t seed);

Complex uniform_in_disk(Complex center, double radius, CounterRng& rng);

// Direct law of Y = 1/(a - xi), xi ~ spec.
PointSampler reciprocal_sampler(const MeasureSpec& spec, Complex a);

// Residual law eta_a = (law(Y) - c_a * Uniform(D(w_a, r_a))) / (1 - c_a),
// sampled by rejection against the density of Y. Requires the params to
// come from nummelin_split for a source found in `spec`.
PointSampler residual_sampler(const MeasureSpec& spec, Complex a, const DoeblinParams& params);

struct DominationCheck {
  std::size_t cells_checked = 0;
  std::size_t violations = 0;
  double min_z_score = 0.0;  // (observed - required) / s.e., minimised over cells
  bool passed = false;
};

// Bins samples of Y on a grid x grid lattice over the bounding square of
// D(w_a, r_a); every cell lying inside the disk must carry empirical mass at
// least c_a * area(cell)/area(disk) minus `sigmas` standard errors.
DominationCheck check_domination(const DoeblinParams& params, std::span<const Complex> y_samples,
                                 int grid = 50, double sigmas = 3.0);

// Max over real and imaginary parts of the two-sample Kolmogorov-Smirnov
// statistic.
double ks_distance_2d(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace derivroots
