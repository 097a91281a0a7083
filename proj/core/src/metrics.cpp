#include "derivroots/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "derivroots/errors.hpp"
#include "derivroots/rng.hpp"
#include "derivroots/sympoly.hpp"
#include "derivroots/transport.hpp"

namespace derivroots {

EmpiricalMeasure EmpiricalMeasure::uniform(std::span<const Complex> points) {
  EmpiricalMeasure m;
  m.points.assign(points.begin(), points.end());
  m.weights.assign(points.size(), 1.0 / static_cast<double>(points.size()));
  return m;
}

EmpiricalMeasure EmpiricalMeasure::from_roots(const RootSet& roots) {
  EmpiricalMeasure m;
  const double total = static_cast<double>(roots.degree());
  m.points = roots.points;
  m.weights.reserve(roots.size());
  for (std::size_t mult : roots.multiplicities) m.weights.push_back(static_cast<double>(mult) / total);
  return m;
}

void validate(const EmpiricalMeasure& m) {
  if (m.points.empty()) throw ValidationError("points", "empirical measure is empty");
  if (m.points.size() != m.weights.size()) {
    throw ValidationError("weights", "points and weights differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    if (!(m.weights[i] > 0.0)) {
      throw ValidationError("weights[" + std::to_string(i) + "]", "weight must be positive");
    }
    total += m.weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("weights", "weights sum to " + std::to_string(total) + ", not 1");
  }
}

namespace {

bool less_complex(Complex a, Complex b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

// Total order on measures used to fix the solver orientation.
int compare(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.points[i] != b.points[i]) return less_complex(a.points[i], b.points[i]) ? -1 : 1;
    if (a.weights[i] != b.weights[i]) return a.weights[i] < b.weights[i] ? -1 : 1;
  }
  return 0;
}

}  // namespace

double w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  validate(a);
  validate(b);
  const std::size_t support = a.size() + b.size();
  if (support > kTransportSupportCap) {
    throw ScaleError("combined support " + std::to_string(support) + " exceeds the exact cap " +
                     std::to_string(kTransportSupportCap) + "; subsample the measures first");
  }
  const int order = compare(a, b);
  if (order == 0) return 0.0;
  const EmpiricalMeasure& s = order < 0 ? a : b;
  const EmpiricalMeasure& t = order < 0 ? b : a;
  std::vector<double> cost(s.size() * t.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) cost[i * t.size() + j] = std::abs(s.points[i] - t.points[j]);
  }
  return transport_cost(s.weights, t.weights, cost);
}

double log_minus(double x) { return x >= 1.0 ? 0.0 : -std::log(x); }

double logminus_potential(const EmpiricalMeasure& m, const MobiusMap& u) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const SpherePoint w = mobius_apply(u, m.points[i]);
    if (w.infinite) continue;
    if (w.z == Complex{}) return std::numeric_limits<double>::infinity();
    total += m.weights[i] * log_minus(std::abs(w.z));
  }
  return total;
}

MonteCarloEstimate logminus_expectation(const MeasureSpec& spec, const MobiusMap& u,
                                        std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw ValidationError("samples", "need at least two samples");
  const std::vector<Complex> xs = sample(spec, samples, seed);
  double sum = 0.0, sum2 = 0.0;
  for (Complex x : xs) {
    const SpherePoint w = mobius_apply(u, x);
    const double v = w.infinite ? 0.0 : log_minus(std::abs(w.z));
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

namespace {

double weighted_logminus(const RootSet& roots, const MobiusMap& u) {
  double total = 0.0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const SpherePoint w = mobius_apply(u, roots.points[i]);
    if (w.infinite) continue;
    total += static_cast<double>(roots.multiplicities[i]) * log_minus(std::abs(w.z));
  }
  return total;
}

void check_clear(const RootSet& set, Complex z0, double tol, const char* what) {
  for (Complex p : set.points) {
    if (std::abs(p - z0) <= tol) {
      throw DegenerateConfigurationError(std::string("u^{-1}(0) coincides with a zero of ") + what);
    }
  }
}

}  // namespace

JensenAudit jensen_audit(const RootSet& roots, std::size_t k, const MobiusMap& u,
                         const JensenOptions& options) {
  validate(roots);
  const RootSet zeros = derivative_roots(roots, k, DerivativeMethod::ratio, options.seed);
  return jensen_audit(roots, zeros, k, u, options);
}

JensenAudit jensen_audit(const RootSet& roots, const RootSet& derivative_zeros, std::size_t k,
                         const MobiusMap& u, const JensenOptions& options) {
  validate(u);
  if (options.grid_points < 8) throw ValidationError("grid_points", "need at least 8 grid points");
  const GeneralizedCircle circle = preimage_circle(u);
  if (circle.is_line) throw DegenerateConfigurationError("u^{-1}(S^1) is a line");
  const SpherePoint pre_zero = mobius_apply(mobius_inverse(u), Complex{});
  if (pre_zero.infinite) throw DegenerateConfigurationError("u^{-1}(0) is the point at infinity");
  const Complex z0 = pre_zero.z;
  check_clear(roots, z0, options.coincidence_tolerance, "P");
  check_clear(derivative_zeros, z0, options.coincidence_tolerance, "P^(k)");

  JensenAudit audit;
  audit.lhs = weighted_logminus(derivative_zeros, u) - weighted_logminus(roots, u);

  const std::vector<Complex> expanded = roots.expanded();
  const SymEvaluator eval(expanded);
  const auto log_abs_at = [&](double theta) {
    const Complex z = circle.center + std::polar(circle.radius, theta);
    try {
      return eval.log_abs(z, k);
    } catch (const PoleError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double step = 2.0 * std::numbers::pi / static_cast<double>(options.grid_points);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t j = 0; j < options.grid_points; ++j) {
    const double v = log_abs_at(step * static_cast<double>(j));
    if (v > best) {
      best = v;
      best_index = j;
    }
  }
  double refined = best;
  for (int t = -3; t <= 3; ++t) {
    if (t == 0) continue;
    refined = std::max(refined, log_abs_at(step * (static_cast<double>(best_index) + t / 4.0)));
  }
  audit.refinement_delta = refined - best;
  audit.rhs = refined - eval.log_abs(z0, k);
  audit.slack = audit.rhs - audit.lhs;
  audit.tolerance = 1e-6 + audit.refinement_delta;
  audit.passed = audit.slack >= -audit.tolerance;
  return audit;
}

}  // namespace derivroots
