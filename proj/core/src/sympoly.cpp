#include "derivroots/sympoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "derivroots/errors.hpp"

namespace derivroots {

namespace {

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

template <class Real>
BasicScaledComplex<Real> reciprocal_of_difference(Complex z, Complex root) {
  const Complex d = z - root;
  if (d == Complex(0.0, 0.0)) {
    throw PoleError(z, "evaluation point coincides with a root");
  }
  if constexpr (std::is_same_v<Real, double>) {
    return BasicScaledComplex<double>(d.real(), d.imag()).reciprocal();
  } else {
    // Exact difference in extended precision.
    const Real re = Real(z.real()) - Real(root.real());
    const Real im = Real(z.imag()) - Real(root.imag());
    return BasicScaledComplex<Real>(re, im).reciprocal();
  }
}

// Plain-double DP on Y scaled by 2^-E so that every |Y| < 2. Power-of-two
// scaling is exact, so this is the renormalized DP with the renormalization
// steps removed; it is used only when a binomial bound rules out overflow,
// and abandoned (returns false) if a result lands near the underflow range.
bool table_fast(const std::vector<std::pair<Complex, std::size_t>>& groups, std::size_t degree,
                Complex z, std::size_t k_max, std::vector<ScaledComplex>& out) {
  const double kk = static_cast<double>(std::min(k_max, degree / 2));
  const double nn = static_cast<double>(degree);
  const double log2_bound =
      (std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1)) / std::numbers::ln2 +
      0.5 * static_cast<double>(k_max) + 2.0;
  if (log2_bound > 1000.0) return false;

  thread_local std::vector<double> yr, yi, er, ei;
  yr.resize(groups.size());
  yi.resize(groups.size());
  double biggest = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Complex d = z - groups[g].first;
    if (d == Complex(0.0, 0.0)) throw PoleError(z, "evaluation point coincides with a root");
    // 1/d without the std::complex NaN-recovery path.
    const double den = d.real() * d.real() + d.imag() * d.imag();
    if (!(den >= 0x1.0p-1000 && den <= 0x1.0p1000)) return false;
    yr[g] = d.real() / den;
    yi[g] = -d.imag() / den;
    biggest = std::max({biggest, std::abs(yr[g]), std::abs(yi[g])});
  }
  const int shift = std::ilogb(biggest) + 1;
  const double scale = detail::pow2(-shift);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    yr[g] *= scale;
    yi[g] *= scale;
  }

  er.assign(k_max + 1, 0.0);
  ei.assign(k_max + 1, 0.0);
  er[0] = 1.0;
  std::size_t folded = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t m = groups[g].second;
    const std::size_t top = std::min(folded + m, k_max);
    const double a = yr[g], b = yi[g];
    if (m == 1) {
      for (std::size_t k = top; k >= 1; --k) {
        const double pr = er[k - 1], pi = ei[k - 1];
        er[k] += a * pr - b * pi;
        ei[k] += a * pi + b * pr;
      }
    } else {
      const std::size_t imax = std::min(m, top);
      std::vector<double> cr(imax + 1), ci(imax + 1);
      cr[0] = 1.0;
      ci[0] = 0.0;
      for (std::size_t i = 1; i <= imax; ++i) {
        const double factor = static_cast<double>(m - i + 1) / static_cast<double>(i);
        const double tr = cr[i - 1] * a - ci[i - 1] * b;
        const double ti = cr[i - 1] * b + ci[i - 1] * a;
        cr[i] = tr * factor;
        ci[i] = ti * factor;
      }
      for (std::size_t k = top; k >= 1; --k) {
        const std::size_t ilim = std::min(k, imax);
        for (std::size_t i = 1; i <= ilim; ++i) {
          er[k] += cr[i] * er[k - i] - ci[i] * ei[k - i];
          ei[k] += cr[i] * ei[k - i] + ci[i] * er[k - i];
        }
      }
    }
    folded += m;
  }
  out.resize(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double big = std::max(std::abs(er[k]), std::abs(ei[k]));
    if (big != 0.0 && !(big >= 0x1.0p-900)) return false;
    if (!std::isfinite(big)) return false;
    out[k] = ScaledComplex(er[k], ei[k], static_cast<std::int64_t>(k) * shift);
  }
  return true;
}

}  // namespace

template <class Real>
BasicSymEvaluator<Real>::BasicSymEvaluator(std::span<const Complex> roots) {
  std::vector<Complex> sorted(roots.begin(), roots.end());
  for (const Complex& r : sorted) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) {
      throw ValidationError("roots", "non-finite root");
    }
  }
  std::sort(sorted.begin(), sorted.end(), lex_less);
  for (const Complex& r : sorted) {
    if (!groups_.empty() && groups_.back().first == r) {
      ++groups_.back().second;
    } else {
      groups_.emplace_back(r, 1);
    }
  }
  degree_ = sorted.size();
}

template <class Real>
BasicSymTable<Real> BasicSymEvaluator<Real>::table(Complex z, std::size_t k_max) const {
  if (k_max > degree_) {
    throw ValidationError("k_max", "k_max = " + std::to_string(k_max) +
                                       " exceeds the number of roots " +
                                       std::to_string(degree_));
  }
  using Value = BasicScaledComplex<Real>;
  BasicSymTable<Real> out;
  out.values.assign(k_max + 1, Value());
  out.values[0] = Value::one();
  out.n = degree_;
  auto& e = out.values;
  if constexpr (std::is_same_v<Real, double>) {
    if (table_fast(groups_, degree_, z, k_max, e)) return out;
    e.assign(k_max + 1, Value());
    e[0] = Value::one();
  }

  std::size_t folded = 0;
  std::vector<Value> powers;
  for (const auto& [root, multiplicity] : groups_) {
    const Value y = reciprocal_of_difference<Real>(z, root);
    const std::size_t top = std::min(folded + multiplicity, k_max);
    if (multiplicity == 1) {
      for (std::size_t k = top; k >= 1; --k) e[k].multiply_add(y, e[k - 1]);
    } else {
      // (1 + y t)^m folded in at once: e_k += sum_{i>=1} C(m,i) y^i e_{k-i}.
      const std::size_t imax = std::min(multiplicity, top);
      powers.assign(imax + 1, Value());
      powers[0] = Value::one();
      for (std::size_t i = 1; i <= imax; ++i) {
        const double factor = static_cast<double>(multiplicity - i + 1) / static_cast<double>(i);
        powers[i] = powers[i - 1] * y * Value(Real(factor), Real(0));
      }
      for (std::size_t k = top; k >= 1; --k) {
        const std::size_t ilim = std::min(k, imax);
        for (std::size_t i = 1; i <= ilim; ++i) e[k].multiply_add(powers[i], e[k - i]);
      }
    }
    folded += multiplicity;
  }
  return out;
}

template <class Real>
Real BasicSymEvaluator<Real>::log_abs(Complex z, std::size_t k) const {
  return table(z, k).values[k].log_abs();
}

template <class Real>
Complex newton_ratio_from(const BasicScaledComplex<Real>& e_k,
                          const BasicScaledComplex<Real>& e_k1, std::size_t k) {
  if (e_k1.is_zero()) {
    throw DerivativeVanishesError("e_{k+1} vanishes: the next derivative is zero here");
  }
  if (e_k.is_zero()) return {0.0, 0.0};
  using Value = BasicScaledComplex<Real>;
  const Value ratio = e_k / (e_k1 * Value(Real(static_cast<double>(k + 1)), Real(0)));
  // 2^996.578 ~ 1e300
  const double log2_mag = static_cast<double>(ratio.log2_abs());
  if (log2_mag >= 996.578428466208) {
    const double re = static_cast<double>(ratio.re());
    const double im = static_cast<double>(ratio.im());
    const double len = std::hypot(re, im);
    throw MagnitudeError(Complex(re / len, im / len), log2_mag);
  }
  return ratio.to_complex();
}

template <class Real>
Complex BasicSymEvaluator<Real>::newton_ratio(Complex z, std::size_t k) const {
  const auto t = table(z, k + 1);
  return newton_ratio_from(t.values[k], t.values[k + 1], k);
}

template class BasicSymEvaluator<double>;
template class BasicSymEvaluator<HpReal>;
template Complex newton_ratio_from<double>(const BasicScaledComplex<double>&,
                                           const BasicScaledComplex<double>&, std::size_t);
template Complex newton_ratio_from<HpReal>(const BasicScaledComplex<HpReal>&,
                                           const BasicScaledComplex<HpReal>&, std::size_t);

SymTable s_table(std::span<const Complex> roots, Complex z, std::size_t k_max) {
  return SymEvaluator(roots).table(z, k_max);
}

double log_abs_S(std::span<const Complex> roots, Complex z, std::size_t k) {
  return SymEvaluator(roots).log_abs(z, k);
}

Complex newton_ratio(std::span<const Complex> roots, Complex z, std::size_t k) {
  return SymEvaluator(roots).newton_ratio(z, k);
}

}  // namespace derivroots
