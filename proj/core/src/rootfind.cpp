#include "derivroots/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "derivroots/errors.hpp"

namespace derivroots {

namespace {

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

template <class C>
std::vector<C> multiply(const std::vector<C>& a, const std::vector<C>& b) {
  std::vector<C> out(a.size() + b.size() - 1, C(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

template <class C>
std::vector<C> product(const std::vector<std::vector<C>>& factors, std::size_t lo,
                       std::size_t hi) {
  if (hi - lo == 1) return factors[lo];
  const std::size_t mid = lo + (hi - lo + 1) / 2;
  return multiply(product(factors, lo, mid), product(factors, mid, hi));
}

// Even positions first, then odd, recursively. Matches the split point of
// product(), so each subtree holds points spread over the whole list.
std::vector<Complex> interleave(const std::vector<Complex>& v) {
  if (v.size() <= 2) return v;
  std::vector<Complex> even, odd;
  for (std::size_t i = 0; i < v.size(); ++i) (i % 2 == 0 ? even : odd).push_back(v[i]);
  std::vector<Complex> out = interleave(even);
  const std::vector<Complex> tail = interleave(odd);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

template <class C>
C make(Complex z) {
  if constexpr (std::is_same_v<C, Complex>) {
    return z;
  } else {
    return to_hp(z);
  }
}

template <class C>
BasicCoefficients<C> build(const RootSet& roots, std::size_t cap) {
  validate(roots);
  const std::size_t n = roots.degree();
  if (n == 0) throw EmptyPolynomialError("polynomial with no roots");
  if (n > cap) {
    throw ScaleError("degree " + std::to_string(n) + " exceeds the coefficient cap " +
                     std::to_string(cap));
  }
  // Sub-products of clustered roots have huge coefficients that cancel in
  // the final product; ordering by angle about the centroid and interleaving
  // keeps every subtree spread out.
  std::vector<Complex> points = roots.expanded();
  Complex centroid = 0.0;
  for (const Complex& z : points) centroid += z;
  centroid /= static_cast<double>(points.size());
  std::stable_sort(points.begin(), points.end(), [&](Complex a, Complex b) {
    const double ta = std::arg(a - centroid), tb = std::arg(b - centroid);
    if (ta != tb) return ta < tb;
    return std::norm(a - centroid) < std::norm(b - centroid);
  });
  points = interleave(points);
  std::vector<std::vector<C>> factors;
  factors.reserve(n);
  for (const Complex& z : points) factors.push_back({-make<C>(z), C(1)});
  return {product(factors, 0, factors.size())};
}

template <class C>
BasicCoefficients<C> derive(const BasicCoefficients<C>& c, std::size_t k) {
  const std::size_t n = c.degree();
  if (c.coeffs.empty() || k > n) {
    throw EmptyPolynomialError("derivative order " + std::to_string(k) + " exceeds degree " +
                               std::to_string(n));
  }
  BasicCoefficients<C> out;
  out.coeffs.resize(n - k + 1);
  for (std::size_t j = 0; j + k <= n; ++j) {
    // (j+k)! / j!
    C factor(1);
    for (std::size_t t = j + 1; t <= j + k; ++t) factor *= C(static_cast<double>(t));
    out.coeffs[j] = c.coeffs[j + k] * factor;
  }
  return out;
}

// Hungarian algorithm with potentials; returns assignment row -> column.
std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

RootSet RootSet::simple(std::span<const Complex> points) {
  RootSet r;
  r.points.assign(points.begin(), points.end());
  r.multiplicities.assign(points.size(), 1);
  return r;
}

RootSet RootSet::from_samples(std::span<const Complex> samples) {
  std::vector<Complex> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(), lex_less);
  RootSet r;
  for (const Complex& z : sorted) {
    if (!r.points.empty() && r.points.back() == z) {
      ++r.multiplicities.back();
    } else {
      r.points.push_back(z);
      r.multiplicities.push_back(1);
    }
  }
  return r;
}

std::size_t RootSet::degree() const {
  return std::accumulate(multiplicities.begin(), multiplicities.end(), std::size_t{0});
}

std::vector<Complex> RootSet::expanded() const {
  std::vector<Complex> out;
  out.reserve(degree());
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.insert(out.end(), multiplicities[i], points[i]);
  }
  return out;
}

void validate(const RootSet& roots) {
  if (roots.points.size() != roots.multiplicities.size()) {
    throw ValidationError("multiplicities", "points and multiplicities differ in length");
  }
  for (std::size_t i = 0; i < roots.points.size(); ++i) {
    if (roots.multiplicities[i] == 0) {
      throw ValidationError("multiplicities[" + std::to_string(i) + "]", "must be positive");
    }
    if (!std::isfinite(roots.points[i].real()) || !std::isfinite(roots.points[i].imag())) {
      throw ValidationError("points[" + std::to_string(i) + "]", "not finite");
    }
  }
}

Coefficients coeffs_from_roots(const RootSet& roots, std::size_t cap) {
  return build<Complex>(roots, cap);
}

HpCoefficients coeffs_from_roots_hp(const RootSet& roots, std::size_t cap) {
  return build<HpComplex>(roots, cap);
}

Coefficients differentiate(const Coefficients& c, std::size_t k) { return derive(c, k); }
HpCoefficients differentiate(const HpCoefficients& c, std::size_t k) { return derive(c, k); }

HpCoefficients to_hp(const Coefficients& c) {
  HpCoefficients out;
  out.coeffs.reserve(c.coeffs.size());
  for (const Complex& z : c.coeffs) out.coeffs.push_back(to_hp(z));
  return out;
}

RootSet cluster_roots(std::span<const Complex> points, double cluster_radius) {
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  // Sort by real part so only nearby candidates are compared.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(points[a], points[b]); });
  double max_scale = 0.0;
  for (const Complex& z : points) max_scale = std::max(max_scale, 1.0 + std::abs(z));
  const double reach = cluster_radius * max_scale;
  for (std::size_t a = 0; a < n; ++a) {
    const Complex za = points[order[a]];
    for (std::size_t b = a + 1; b < n; ++b) {
      const Complex zb = points[order[b]];
      if (zb.real() - za.real() > reach) break;
      const double r = cluster_radius * (1.0 + std::max(std::abs(za), std::abs(zb)));
      if (std::abs(za - zb) <= r) parent[find(order[a])] = find(order[b]);
    }
  }
  std::vector<std::size_t> slot(n, n);
  std::vector<Complex> sums;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(order[i]);
    if (slot[root] == n) {
      slot[root] = sums.size();
      sums.push_back(0.0);
      counts.push_back(0);
    }
    sums[slot[root]] += points[order[i]];
    ++counts[slot[root]];
  }
  std::vector<std::pair<Complex, std::size_t>> clusters;
  for (std::size_t c = 0; c < sums.size(); ++c) {
    clusters.emplace_back(sums[c] / static_cast<double>(counts[c]), counts[c]);
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
  RootSet out;
  for (const auto& [z, m] : clusters) {
    out.points.push_back(z);
    out.multiplicities.push_back(m);
  }
  return out;
}

std::string to_string(DerivativeMethod method) {
  return method == DerivativeMethod::coefficient ? "coefficient" : "ratio";
}

DerivativeMethod parse_derivative_method(const std::string& name) {
  if (name == "coefficient") return DerivativeMethod::coefficient;
  if (name == "ratio") return DerivativeMethod::ratio;
  throw ValidationError("method", "expected \"coefficient\" or \"ratio\", got \"" + name + "\"");
}

double matched_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) {
    throw ValidationError("roots", "matched sets differ in size (" + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = std::abs(a[i] - b[j]);
  }
  const auto assignment = hungarian(cost, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, cost[i * n + assignment[i]]);
  return worst;
}

double matched_distance(const RootSet& a, const RootSet& b) {
  const auto ea = a.expanded();
  const auto eb = b.expanded();
  return matched_distance(ea, eb);
}

}  // namespace derivroots
