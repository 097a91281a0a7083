#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "derivroots/precision.hpp"
#include "derivroots/rng.hpp"

namespace derivroots {

struct Discrete {
  std::vector<Complex> atoms;
  std::vector<double> weights;
};

struct UniformCircle {
  Complex center;
  double radius = 1.0;
};

struct UniformDisk {
  Complex center;
  double radius = 1.0;
};

// Self-similar measure on the segment [start, end]: keep the two outer
// pieces of relative length `ratio`, remove the middle, repeat.
struct CantorSegment {
  Complex start;
  Complex end;
  double ratio = 1.0 / 3.0;
};

struct MixtureComponent;

struct Mixture {
  std::vector<MixtureComponent> components;
};

// Tagged description of a probability measure on C.
struct MeasureSpec {
  std::variant<Discrete, UniformCircle, UniformDisk, CantorSegment, Mixture> law;
};

struct MixtureComponent {
  double weight = 0.0;
  MeasureSpec measure;
};

inline constexpr int kMaxMixtureDepth = 4;
inline constexpr double kWeightSumTolerance = 1e-12;

MeasureSpec make_discrete(std::vector<Complex> atoms, std::vector<double> weights);
MeasureSpec make_circle(Complex center, double radius);
MeasureSpec make_disk(Complex center, double radius);
MeasureSpec make_cantor(Complex start, Complex end, double ratio);
MeasureSpec make_mixture(std::vector<MixtureComponent> components);

// "discrete", "uniform_circle", "uniform_disk", "cantor_segment", "mixture".
std::string type_name(const MeasureSpec& spec);

// Throws ValidationError naming the offending field (dotted path).
void validate(const MeasureSpec& spec);

// Deterministic in (spec, n, seed): sample i comes from its own counter
// stream, so the output does not depend on `threads`.
std::vector<Complex> sample(const MeasureSpec& spec, std::size_t n, std::uint64_t seed,
                            unsigned threads = 1);

Complex sample_one(const MeasureSpec& spec, CounterRng& rng);

struct TaggedSample {
  Complex value;
  bool singular = false;  // drawn from a component with no Lebesgue density
};
TaggedSample sample_tagged(const MeasureSpec& spec, CounterRng& rng);

// Density of the absolutely continuous part with respect to area measure.
double ac_density(const MeasureSpec& spec, Complex z);

// Lower bound on the distance from z to the support (Cantor components use
// their whole segment).
double support_distance(const MeasureSpec& spec, Complex z);

// Closed support membership; Cantor components test the segment.
bool in_support(const MeasureSpec& spec, Complex z, double tol);

// Value with an error estimate (0 for closed forms).
struct Estimate {
  Complex value;
  double error = 0.0;
};

struct QuadratureOptions {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-14;
  // Quadrature and the circle closed form require distance to the support
  // of at least this much.
  double exclusion_tube = 1e-6;
  int max_levels = 22;
};

// E f(U) for U ~ spec by numerical quadrature: exact sums for atoms,
// trapezoid for circles, tensor Gauss-Legendre for disks, adaptive
// self-similar midpoint rule for Cantor segments. Throws AccuracyError on
// non-convergence.
Estimate expectation(const MeasureSpec& spec, const std::function<Complex(Complex)>& f,
                     const QuadratureOptions& options = {});

// g(z) = E 1/(z - U). Closed forms where available, quadrature otherwise.
Estimate cauchy_transform(const MeasureSpec& spec, Complex z,
                          const QuadratureOptions& options = {});

// Same quantity through quadrature only; the independent route used to
// audit the closed forms.
Estimate cauchy_transform_quadrature(const MeasureSpec& spec, Complex z,
                                     const QuadratureOptions& options = {});

// E 1/|a - U|^2; +inf when it diverges (a inside a disk component).
Estimate inverse_square_moment(const MeasureSpec& spec, Complex a,
                               const QuadratureOptions& options = {});

// log 2 / log(1/ratio), the local dimension of a CantorSegment.
double cantor_dimension(double ratio);

struct FrostmanEstimate {
  double radius = 0.0;
  double mass = 0.0;      // empirical mass of the closed disk D(x, r)
  double estimate = 0.0;  // log(mass) / log(r); +inf when mass == 0
};

// Per-radius local dimension estimates. r_grid must be strictly decreasing
// with every entry in (0, 1).
std::vector<FrostmanEstimate> frostman_exponent(std::span<const Complex> samples, Complex x,
                                                std::span<const double> r_grid);

}  // namespace derivroots
