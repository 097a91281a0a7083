#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "derivroots/measures.hpp"
#include "derivroots/metrics.hpp"
#include "derivroots/rootfind.hpp"
#include "derivroots/sympoly.hpp"
#include "oracles.hpp"

using namespace derivroots;

namespace {

double angle_gap(double a, double b) {
  const double d = std::remainder(a - b, 2 * std::numbers::pi);
  return std::abs(d);
}

// Uniform in D(0, radius), away from every root by at least `tube`.
Complex query_point(const std::vector<Complex>& roots, double radius, double tube, CounterRng& rng) {
  for (;;) {
    const Complex z = std::polar(radius * std::sqrt(rng.uniform()), 2 * std::numbers::pi * rng.uniform());
    bool ok = true;
    for (Complex r : roots) ok = ok && std::abs(z - r) > tube;
    if (ok) return z;
  }
}

}  // namespace

TEST_CASE("oracle self-check: two routes to e_k") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto roots = sample(make_disk(0.0, 2.0), 10, s);
    const Complex z(1.0, 2.5);
    for (std::size_t k = 1; k <= 5; ++k) {
      const auto brute = oracle::e_k_bruteforce(roots, z, k);
      const auto [log_abs, arg] = oracle::log_S_by_coefficients(roots, z, k);
      CHECK(std::abs(static_cast<double>(std::log(std::abs(brute))) - log_abs) <= 1e-12);
      CHECK(angle_gap(static_cast<double>(std::arg(brute)), arg) <= 1e-12);
    }
  }
}

TEST_CASE("sympoly against the coefficient oracle") {
  CounterRng rng(2718);
  double worst_log = 0.0, worst_arg = 0.0;
  for (std::uint64_t c = 0; c < 100; ++c) {
    const std::size_t n = 2 + c % 49;
    const std::size_t k = std::min<std::size_t>(n, 1 + c % 10);
    const auto roots = sample(make_disk(0.0, 2.0), n, 10000 + c);
    const Complex z = query_point(roots, 3.0, 1e-3, rng);
    const SymTable t = s_table(roots, z, k);
    const auto [log_abs, arg] = oracle::log_S_by_coefficients(roots, z, k);
    worst_log = std::max(worst_log, std::abs(t[k].log_abs() - log_abs) / std::max(1.0, std::abs(log_abs)));
    worst_arg = std::max(worst_arg, angle_gap(t[k].arg(), arg));
  }
  CHECK(worst_log <= 1e-9);
  CHECK(worst_arg <= 1e-9);
}

TEST_CASE("cantor moments from sampling and quadrature") {
  const auto m = oracle::cantor_moments(1.0 / 3.0, 6);
  CHECK(static_cast<double>(m[1]) == doctest::Approx(0.5));
  // Variance of the middle-thirds Cantor measure is 1/8.
  CHECK(static_cast<double>(m[2] - m[1] * m[1]) == doctest::Approx(0.125));
  const MeasureSpec spec = make_cantor(0.0, 1.0, 1.0 / 3.0);
  for (std::size_t j = 1; j < 6; ++j) {
    const Estimate e = expectation(spec, [j](Complex u) { return std::pow(u, static_cast<int>(j)); });
    CHECK(e.value.real() == doctest::Approx(static_cast<double>(m[j])).epsilon(1e-8));
  }
  const auto xs = sample(spec, 200000, 3);
  double mean = 0.0, second = 0.0;
  for (Complex x : xs) mean += x.real(), second += x.real() * x.real();
  mean /= xs.size();
  second /= xs.size();
  CHECK(std::abs(mean - 0.5) <= 4 * std::sqrt(0.125 / xs.size()));
  CHECK(std::abs(second - static_cast<double>(m[2])) <= 0.005);
}

TEST_CASE("cantor transform on a tilted segment") {
  const Complex a(-1.0, 0.5), b(1.0, 1.5);
  const MeasureSpec spec = make_cantor(a, b, 0.25);
  for (Complex z : {Complex(3.0, 0.0), Complex(0.0, 3.0), Complex(-2.0, -1.0)}) {
    const Complex ref = oracle::cantor_cauchy_series(a, b, 0.25, z);
    CHECK(std::abs(cauchy_transform(spec, z).value - ref) <= 1e-7 * std::abs(ref));
  }
}

TEST_CASE("transport against both oracles at larger sizes") {
  CounterRng rng(5);
  std::vector<double> x, y, wa, wb;
  for (int i = 0; i < 300; ++i) x.push_back(rng.normal());
  for (int i = 0; i < 170; ++i) y.push_back(2.0 * rng.uniform());
  wa.assign(x.size(), 1.0 / x.size());
  wb.assign(y.size(), 1.0 / y.size());
  const std::vector<Complex> xc(x.begin(), x.end()), yc(y.begin(), y.end());
  CHECK(std::abs(w1_distance(EmpiricalMeasure::uniform(xc), EmpiricalMeasure::uniform(yc)) -
                 oracle::w1_line(x, wa, y, wb)) <= 1e-12);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = sample(make_circle(0.0, 1.0), 8, 100 + s);
    const auto q = sample(make_disk(0.0, 1.0), 8, 200 + s);
    CHECK(std::abs(w1_distance(EmpiricalMeasure::uniform(p), EmpiricalMeasure::uniform(q)) -
                   oracle::w1_assignment(p, q)) <= 1e-12);
  }
}

TEST_CASE("derivative zeros vanish in the coefficient oracle") {
  const auto roots = sample(make_disk(0.0, 1.0), 40, 8);
  const RootSet zeros = derivative_roots(RootSet::simple(roots), 6, DerivativeMethod::ratio, 1);
  for (Complex z : zeros.points) {
    const double at = oracle::log_S_by_coefficients(roots, z, 6).first;
    const double near = oracle::log_S_by_coefficients(roots, z + 1e-3, 6).first;
    CHECK(at < near - 10.0);
  }
}
