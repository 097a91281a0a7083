#include <array>
#include <cmath>
#include <numbers>
#include <variant>

#include <boost/math/quadrature/gauss.hpp>

#include "derivroots/errors.hpp"
#include "derivroots/measures.hpp"

namespace derivroots {

namespace {

constexpr int kRule = 10;
constexpr int kMaxDepth = 40;

struct Rule {
  std::array<double, kRule> nodes{};    // on [-1, 1]
  std::array<double, kRule> weights{};  // sum to 2
};

const Rule& gauss_rule() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, kRule>;
    Rule r;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    // Even order: abscissa() holds the kRule/2 positive nodes.
    for (int i = 0; i < kRule / 2; ++i) {
      r.nodes[2 * i] = x[i];
      r.weights[2 * i] = w[i];
      r.nodes[2 * i + 1] = -x[i];
      r.weights[2 * i + 1] = w[i];
    }
    return r;
  }();
  return rule;
}

using Integrand = std::function<Complex(Complex)>;

struct Accumulator {
  Complex value = 0.0;
  double error = 0.0;
  bool exhausted = false;
};

// Gauss rule for g over [a, b].
Complex gauss_1d(const std::function<Complex(double)>& g, double a, double b) {
  const Rule& r = gauss_rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  Complex s = 0.0;
  for (int i = 0; i < kRule; ++i) s += r.weights[i] * g(mid + half * r.nodes[i]);
  return half * s;
}

void adaptive_1d(const std::function<Complex(double)>& g, double a, double b, Complex whole,
                 double tol, int depth, Accumulator& acc) {
  const double m = 0.5 * (a + b);
  const Complex left = gauss_1d(g, a, m);
  const Complex right = gauss_1d(g, m, b);
  const double diff = std::abs(left + right - whole);
  if (diff <= tol || depth >= kMaxDepth) {
    if (diff > tol) acc.exhausted = true;
    acc.value += left + right;
    acc.error += diff;
    return;
  }
  adaptive_1d(g, a, m, left, 0.5 * tol, depth + 1, acc);
  adaptive_1d(g, m, b, right, 0.5 * tol, depth + 1, acc);
}

// Tensor rule over the polar rectangle [r0, r1] x [t0, t1] with weight rho.
Complex gauss_polar(const Integrand& f, Complex center, double r0, double r1, double t0,
                    double t1) {
  const Rule& r = gauss_rule();
  const double hr = 0.5 * (r1 - r0), mr = 0.5 * (r0 + r1);
  const double ht = 0.5 * (t1 - t0), mt = 0.5 * (t0 + t1);
  Complex s = 0.0;
  for (int i = 0; i < kRule; ++i) {
    const double rho = mr + hr * r.nodes[i];
    Complex row = 0.0;
    for (int j = 0; j < kRule; ++j) {
      row += r.weights[j] * f(center + std::polar(rho, mt + ht * r.nodes[j]));
    }
    s += r.weights[i] * rho * row;
  }
  return hr * ht * s;
}

void adaptive_polar(const Integrand& f, Complex center, double r0, double r1, double t0,
                    double t1, Complex whole, double tol, int depth, Accumulator& acc) {
  const double rm = 0.5 * (r0 + r1), tm = 0.5 * (t0 + t1);
  const std::array<Complex, 4> parts = {
      gauss_polar(f, center, r0, rm, t0, tm), gauss_polar(f, center, rm, r1, t0, tm),
      gauss_polar(f, center, r0, rm, tm, t1), gauss_polar(f, center, rm, r1, tm, t1)};
  const Complex sum = parts[0] + parts[1] + parts[2] + parts[3];
  const double diff = std::abs(sum - whole);
  if (diff <= tol || depth >= kMaxDepth / 2) {
    if (diff > tol) acc.exhausted = true;
    acc.value += sum;
    acc.error += diff;
    return;
  }
  const double t = 0.25 * tol;
  adaptive_polar(f, center, r0, rm, t0, tm, parts[0], t, depth + 1, acc);
  adaptive_polar(f, center, rm, r1, t0, tm, parts[1], t, depth + 1, acc);
  adaptive_polar(f, center, r0, rm, tm, t1, parts[2], t, depth + 1, acc);
  adaptive_polar(f, center, rm, r1, tm, t1, parts[3], t, depth + 1, acc);
}

// Node of the Cantor construction: parameter interval [s, s + len] of the
// segment carrying mass `mass`; `at_mid` is f at the interval midpoint.
void adaptive_cantor(const Integrand& f, const CantorSegment& c, double s, double len,
                     double mass, Complex at_mid, double tol, int depth, Accumulator& acc) {
  const double child = c.ratio * len;
  const double s_left = s, s_right = s + len - child;
  const auto point = [&](double t) { return c.start + t * (c.end - c.start); };
  const Complex f_left = f(point(s_left + 0.5 * child));
  const Complex f_right = f(point(s_right + 0.5 * child));
  const Complex parent = mass * at_mid;
  const Complex refined = 0.5 * mass * (f_left + f_right);
  const double diff = std::abs(refined - parent);
  if (diff <= tol || depth >= kMaxDepth) {
    if (diff > tol) acc.exhausted = true;
    acc.value += refined;
    acc.error += diff;
    return;
  }
  adaptive_cantor(f, c, s_left, child, 0.5 * mass, f_left, 0.5 * tol, depth + 1, acc);
  adaptive_cantor(f, c, s_right, child, 0.5 * mass, f_right, 0.5 * tol, depth + 1, acc);
}

double target(const QuadratureOptions& o, Complex rough) {
  return std::max(o.relative_tolerance * std::abs(rough), o.absolute_tolerance);
}

Estimate finish(const Accumulator& acc, const char* what) {
  if (acc.exhausted) throw AccuracyError(acc.error, std::string(what) + " quadrature did not converge");
  return {acc.value, acc.error};
}

}  // namespace

Estimate expectation(const MeasureSpec& spec, const Integrand& f,
                     const QuadratureOptions& options) {
  if (const auto* d = std::get_if<Discrete>(&spec.law)) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < d->atoms.size(); ++i) s += d->weights[i] * f(d->atoms[i]);
    return {s, 0.0};
  }
  if (const auto* c = std::get_if<UniformCircle>(&spec.law)) {
    const double two_pi = 2.0 * std::numbers::pi;
    const auto g = [&](double theta) {
      return f(c->center + std::polar(c->radius, theta)) / two_pi;
    };
    Accumulator acc;
    const int pieces = 8;
    Complex rough = 0.0;
    std::array<Complex, pieces> whole{};
    for (int i = 0; i < pieces; ++i) {
      whole[i] = gauss_1d(g, two_pi * i / pieces, two_pi * (i + 1) / pieces);
      rough += whole[i];
    }
    const double tol = target(options, rough) / pieces;
    for (int i = 0; i < pieces; ++i) {
      adaptive_1d(g, two_pi * i / pieces, two_pi * (i + 1) / pieces, whole[i], tol, 0, acc);
    }
    return finish(acc, "circle");
  }
  if (const auto* c = std::get_if<UniformDisk>(&spec.law)) {
    const double norm = 1.0 / (std::numbers::pi * c->radius * c->radius);
    const Integrand g = [&](Complex u) { return norm * f(u); };
    const double two_pi = 2.0 * std::numbers::pi;
    const int pieces = 4;
    std::array<Complex, pieces> whole{};
    Complex rough = 0.0;
    for (int i = 0; i < pieces; ++i) {
      whole[i] = gauss_polar(g, c->center, 0.0, c->radius, two_pi * i / pieces,
                             two_pi * (i + 1) / pieces);
      rough += whole[i];
    }
    const double tol = target(options, rough) / pieces;
    Accumulator acc;
    for (int i = 0; i < pieces; ++i) {
      adaptive_polar(g, c->center, 0.0, c->radius, two_pi * i / pieces,
                     two_pi * (i + 1) / pieces, whole[i], tol, 0, acc);
    }
    return finish(acc, "disk");
  }
  if (const auto* c = std::get_if<CantorSegment>(&spec.law)) {
    const Complex mid = f(c->start + 0.5 * (c->end - c->start));
    // Rough scale from a two-level pass, then the adaptive sweep.
    Accumulator rough_acc;
    adaptive_cantor(f, *c, 0.0, 1.0, 1.0, mid, std::numeric_limits<double>::infinity(), 0,
                    rough_acc);
    Accumulator acc;
    adaptive_cantor(f, *c, 0.0, 1.0, 1.0, mid, target(options, rough_acc.value), 0, acc);
    return finish(acc, "Cantor");
  }
  const auto& m = std::get<Mixture>(spec.law);
  Estimate total{0.0, 0.0};
  for (const auto& comp : m.components) {
    const Estimate part = expectation(comp.measure, f, options);
    total.value += comp.weight * part.value;
    total.error += comp.weight * part.error;
  }
  return total;
}

}  // namespace derivroots
