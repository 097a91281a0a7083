#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "derivroots/errors.hpp"
#include "derivroots/parallel.hpp"
#include "derivroots/rng.hpp"
#include "derivroots/rootfind.hpp"
#include "derivroots/scaled_complex.hpp"

namespace derivroots {

namespace {

constexpr double kWarmTolerance = 1e-10;
constexpr double kWarmStall = 1e-6;

ScaledComplex to_scaled(const HpComplex& c) {
  const BasicScaledComplex<HpReal> s(c.real(), c.imag());
  return ScaledComplex(static_cast<double>(s.re()), static_cast<double>(s.im()), s.exponent());
}

double log_abs_hp(const HpComplex& c) {
  return static_cast<double>(to_scaled(c).log_abs());
}

// Newton displacement p/p' in scaled arithmetic; non-finite when p' = 0 or
// the ratio leaves the double range.
Complex newton_scaled(const std::vector<ScaledComplex>& c, Complex z) {
  const ScaledComplex x(z.real(), z.imag());
  ScaledComplex p = c.back();
  ScaledComplex dp;
  for (std::size_t j = c.size() - 1; j-- > 0;) {
    dp = dp * x + p;
    p = p * x + c[j];
  }
  if (p.is_zero()) return {0.0, 0.0};
  if (dp.is_zero()) return {std::numeric_limits<double>::infinity(), 0.0};
  const ScaledComplex r = p / dp;
  if (r.exponent() > 1000) return {std::numeric_limits<double>::infinity(), 0.0};
  return r.to_complex();
}

HpComplex newton_hp(const std::vector<HpComplex>& c, const HpComplex& z) {
  HpComplex p = c.back();
  HpComplex dp(0);
  for (std::size_t j = c.size() - 1; j-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[j];
  }
  if (p == HpComplex(0)) return HpComplex(0);
  if (dp == HpComplex(0)) return HpComplex(HpReal(std::numeric_limits<double>::infinity()), 0);
  return p / dp;
}

Complex aberth_step(Complex newton, Complex repulsion) {
  if (!std::isfinite(newton.real()) || !std::isfinite(newton.imag())) {
    // p'/p -> 0: the step tends to -1/repulsion.
    return repulsion == Complex(0.0, 0.0) ? Complex(1e-3, 1e-3) : -1.0 / repulsion;
  }
  const Complex denom = 1.0 - newton * repulsion;
  if (denom == Complex(0.0, 0.0)) return newton;
  return newton / denom;
}

// Double-precision pass; returns the approximants, converged or not.
std::vector<Complex> warm_start(const std::vector<ScaledComplex>& c, std::vector<Complex> z,
                                const AberthOptions& options) {
  const std::size_t n = z.size();
  std::vector<char> done(n, 0);
  std::vector<double> previous(n, std::numeric_limits<double>::infinity());
  std::vector<Complex> step(n);
  std::vector<double> newton_size(n);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    parallel_for(n, options.threads, [&](std::size_t i) {
      if (done[i]) {
        step[i] = 0.0;
        return;
      }
      Complex s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) s += 1.0 / (z[i] - z[j]);
      }
      const Complex newton = newton_scaled(c, z[i]);
      newton_size[i] = std::abs(newton);
      step[i] = aberth_step(newton, s);
    });
    bool all = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      z[i] -= step[i];
      // Converge on the Newton correction: the Aberth step alone is tiny
      // whenever two approximants nearly coincide.
      const double size = std::max(std::abs(step[i]), newton_size[i]);
      const double scale = 1.0 + std::abs(z[i]);
      if (size <= kWarmTolerance * scale || (size <= kWarmStall * scale && size >= 0.5 * previous[i])) {
        done[i] = 1;
      } else {
        all = false;
      }
      previous[i] = size;
    }
    if (all) break;
  }
  return z;
}

std::vector<Complex> polish(const std::vector<HpComplex>& c, const std::vector<Complex>& start,
                            const AberthOptions& options) {
  const std::size_t n = start.size();
  std::vector<HpComplex> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = to_hp(start[i]);
  std::vector<char> done(n, 0);
  std::vector<Complex> step(n);
  std::vector<double> newton_size(n);
  double worst = 0.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    parallel_for(n, options.threads, [&](std::size_t i) {
      if (done[i]) {
        step[i] = 0.0;
        return;
      }
      Complex s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const Complex d = to_double(z[i] - z[j]);
        if (d != Complex(0.0, 0.0)) s += 1.0 / d;
      }
      const HpComplex newton = newton_hp(c, z[i]);
      const Complex nd = to_double(newton);
      newton_size[i] = std::abs(nd);
      step[i] = nd == Complex(0.0, 0.0) ? Complex(0.0, 0.0) : aberth_step(nd, s);
    });
    bool all = true;
    worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      z[i] -= to_hp(step[i]);
      const double scale = 1.0 + std::abs(to_double(z[i]));
      const double size = std::max(std::abs(step[i]), newton_size[i]);
      worst = std::max(worst, size / scale);
      if (size <= options.tolerance * scale) {
        done[i] = 1;
      } else {
        all = false;
      }
    }
    if (all) {
      std::vector<Complex> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = to_double(z[i]);
      return out;
    }
  }
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < n; ++i) {
    if (!done[i]) pending.push_back(i);
  }
  throw ConvergenceError("Aberth iteration did not converge in " +
                             std::to_string(options.max_iterations) + " sweeps",
                         worst, pending);
}

}  // namespace

double cauchy_bound(const HpCoefficients& c) {
  const std::size_t n = c.degree();
  if (n == 0) throw EmptyPolynomialError("constant polynomial has no roots");
  const double lead = log_abs_hp(c.coeffs[n]);
  std::vector<std::pair<double, double>> terms;  // (log|c_j/c_n|, n - j)
  for (std::size_t j = 0; j < n; ++j) {
    if (c.coeffs[j] == HpComplex(0)) continue;
    terms.emplace_back(log_abs_hp(c.coeffs[j]) - lead, static_cast<double>(n - j));
  }
  if (terms.empty()) return 0.0;
  // g(t) = sum exp(a_j - (n-j) t) is decreasing; solve g = 1 for t = log x.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const double log_n = std::log(static_cast<double>(n));
  for (const auto& [a, d] : terms) {
    lo = std::max(lo, a / d);
    hi = std::max(hi, (a + log_n) / d);
  }
  const auto g = [&](double t) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& [a, d] : terms) m = std::max(m, a - d * t);
    double s = 0.0;
    for (const auto& [a, d] : terms) s += std::exp(a - d * t - m);
    return m + std::log(s);  // log g(t)
  };
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(hi);
}

RootSet aberth(const HpCoefficients& input, std::uint64_t seed, const AberthOptions& options) {
  if (input.coeffs.empty() || input.degree() == 0) {
    throw EmptyPolynomialError("polynomial of degree 0 has no roots");
  }
  if (input.coeffs.back() == HpComplex(0)) {
    throw ValidationError("coeffs", "leading coefficient is zero");
  }
  // Roots at the origin are exact; strip them first.
  std::size_t zeros = 0;
  while (input.coeffs[zeros] == HpComplex(0)) ++zeros;
  std::vector<HpComplex> c(input.coeffs.begin() + static_cast<std::ptrdiff_t>(zeros),
                           input.coeffs.end());
  const std::size_t n = c.size() - 1;

  std::vector<Complex> found;
  if (n == 1) {
    found.push_back(to_double(-c[0] / c[1]));
  } else if (n > 1) {
    const double radius = cauchy_bound(HpCoefficients{c});
    CounterRng rng(derive_seed(seed, "aberth-init", {n}));
    const double offset = rng.uniform() * 2.0 * std::numbers::pi / static_cast<double>(n);
    std::vector<Complex> z(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double jitter = (rng.uniform() - 0.5) * 0.4 * std::numbers::pi / static_cast<double>(n);
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n) +
                           offset + jitter;
      z[j] = std::polar(radius, theta);
    }
    std::vector<ScaledComplex> scaled(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) scaled[j] = to_scaled(c[j]);
    z = warm_start(scaled, std::move(z), options);
    found = polish(c, z, options);
  }
  found.insert(found.end(), zeros, Complex(0.0, 0.0));
  return cluster_roots(found, options.cluster_radius);
}

RootSet aberth(const Coefficients& c, std::uint64_t seed, const AberthOptions& options) {
  return aberth(to_hp(c), seed, options);
}

}  // namespace derivroots
