#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "derivroots/measures.hpp"
#include "derivroots/mobius.hpp"
#include "derivroots/precision.hpp"
#include "derivroots/rootfind.hpp"

namespace derivroots {

struct EmpiricalMeasure {
  std::vector<Complex> points;
  std::vector<double> weights;

  // Weight 1/N per point.
  static EmpiricalMeasure uniform(std::span<const Complex> points);
  // Weight multiplicity / degree per distinct point.
  static EmpiricalMeasure from_roots(const RootSet& roots);

  std::size_t size() const { return points.size(); }
};

// Throws ValidationError unless lengths agree, weights are positive, and
// they sum to 1 within 1e-12.
void validate(const EmpiricalMeasure& m);

// Exact 1-Wasserstein distance with Euclidean ground cost. The pair is put
// in a canonical order before solving, so swapping arguments gives the
// bit-identical value. Throws ScaleError past kTransportSupportCap.
double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// max(0, -log x).
double log_minus(double x);

// sum w_i log-|u(p_i)|. Points sent to infinity contribute 0; a point sent
// exactly to 0 makes the result +inf.
double logminus_potential(const EmpiricalMeasure& m, const MobiusMap& u);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Independent Monte Carlo estimate of the integral of log-|u| against the
// measure itself.
MonteCarloEstimate logminus_expectation(const MeasureSpec& spec, const MobiusMap& u,
                                        std::size_t samples, std::uint64_t seed);

struct JensenAudit {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;         // 1e-6 plus the grid refinement gain
  double refinement_delta = 0.0;  // log sup after refinement minus before
  bool passed = false;
};

struct JensenOptions {
  std::size_t grid_points = 4096;
  double coincidence_tolerance = 1e-9;
  std::uint64_t seed = 0;  // for the derivative-zero solver
};

// Checks sum log-|u(rho)| over zeros of P^(k) minus the same sum over
// zeros of P against log sup |S_{k,n}| on u^{-1}(S^1) minus
// log |S_{k,n}(u^{-1}(0))|, both sums with multiplicity. The sup is taken
// over a uniform angular grid, refined four-fold around the best cell once.
// Throws DegenerateConfigurationError when u^{-1}(S^1) is a line, u^{-1}(0)
// is infinite, or u^{-1}(0) lies within the coincidence tolerance of a zero
// of P or P^(k).
JensenAudit jensen_audit(const RootSet& roots, std::size_t k, const MobiusMap& u,
                         const JensenOptions& options = {});

// Overload taking precomputed zeros of P^(k).
JensenAudit jensen_audit(const RootSet& roots, const RootSet& derivative_zeros, std::size_t k,
                         const MobiusMap& u, const JensenOptions& options = {});

}  // namespace derivroots
