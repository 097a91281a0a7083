#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "derivroots/precision.hpp"
#include "derivroots/scaled_complex.hpp"

namespace derivroots {

// e_0..e_{k_max} of Y_i = 1/(z - xi_i), i.e. S_{k,n}(z) = P^(k)(z) / (k! P(z)).
template <class Real>
struct BasicSymTable {
  std::vector<BasicScaledComplex<Real>> values;  // values[0] == 1 exactly
  std::size_t n = 0;                             // number of Y folded in

  const BasicScaledComplex<Real>& operator[](std::size_t k) const { return values[k]; }
  std::size_t k_max() const { return values.empty() ? 0 : values.size() - 1; }
};

using SymTable = BasicSymTable<double>;
using HpSymTable = BasicSymTable<HpReal>;

// Evaluates elementary symmetric polynomials of the reciprocals 1/(z - xi)
// for a fixed root multiset at many points z. Roots are sorted
// lexicographically (real, then imaginary) and identical values are folded
// together with binomial weights, so output is bit-identical under any
// permutation of the input.
template <class Real>
class BasicSymEvaluator {
 public:
  using Value = BasicScaledComplex<Real>;

  explicit BasicSymEvaluator(std::span<const Complex> roots);

  std::size_t degree() const noexcept { return degree_; }
  const std::vector<std::pair<Complex, std::size_t>>& groups() const noexcept { return groups_; }

  // Prefix DP e_k <- e_k + Y_m e_{k-1}, descending k within each fold.
  // Throws PoleError if z equals a root exactly, ValidationError if
  // k_max > n.
  BasicSymTable<Real> table(Complex z, std::size_t k_max) const;

  // log|e_k(z)|; -inf when e_k vanishes exactly.
  Real log_abs(Complex z, std::size_t k) const;

  // e_k / ((k+1) e_{k+1}) = P^(k) / P^(k+1), the Newton displacement for
  // the k-th derivative. Throws DerivativeVanishesError when e_{k+1} = 0 and
  // MagnitudeError when |ratio| >= 1e300.
  Complex newton_ratio(Complex z, std::size_t k) const;

 private:
  std::vector<std::pair<Complex, std::size_t>> groups_;
  std::size_t degree_ = 0;
};

using SymEvaluator = BasicSymEvaluator<double>;
using HpSymEvaluator = BasicSymEvaluator<HpReal>;

extern template class BasicSymEvaluator<double>;
extern template class BasicSymEvaluator<HpReal>;

SymTable s_table(std::span<const Complex> roots, Complex z, std::size_t k_max);
double log_abs_S(std::span<const Complex> roots, Complex z, std::size_t k);
Complex newton_ratio(std::span<const Complex> roots, Complex z, std::size_t k);

// Newton displacement from a precomputed table holding e_k and e_{k+1}.
template <class Real>
Complex newton_ratio_from(const BasicScaledComplex<Real>& e_k,
                          const BasicScaledComplex<Real>& e_k1, std::size_t k);

}  // namespace derivroots
