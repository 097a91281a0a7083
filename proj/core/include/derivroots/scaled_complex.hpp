#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <type_traits>

namespace derivroots {

namespace detail {

// 2^e as a double for e in the normal exponent range.
inline double pow2(int e) noexcept {
  return std::bit_cast<double>(static_cast<std::uint64_t>(e + 1023) << 52);
}

}  // namespace detail

// Complex number stored as mantissa * 2^exponent with an unbounded (64-bit)
// exponent. Canonical form: either the zero mantissa with exponent 0, or
// re^2 + im^2 in [1, 4), i.e. |mantissa| in [1, 2).
template <class Real>
class BasicScaledComplex {
 public:
  BasicScaledComplex() = default;

  BasicScaledComplex(Real re, Real im, std::int64_t exponent = 0)
      : re_(std::move(re)), im_(std::move(im)), exponent_(exponent) {
    normalize();
  }

  static BasicScaledComplex one() { return BasicScaledComplex(Real(1), Real(0)); }

  const Real& re() const noexcept { return re_; }
  const Real& im() const noexcept { return im_; }
  std::int64_t exponent() const noexcept { return exponent_; }
  bool is_zero() const { return re_ == 0 && im_ == 0; }
  Real mantissa_norm() const { return re_ * re_ + im_ * im_; }

  // log2 |value|; -inf for zero.
  Real log2_abs() const {
    using std::log;
    if (is_zero()) return -std::numeric_limits<Real>::infinity();
    return log(mantissa_norm()) / (2 * log(Real(2))) + Real(exponent_);
  }

  // log |value|; -inf for zero.
  Real log_abs() const {
    using std::log;
    if (is_zero()) return -std::numeric_limits<Real>::infinity();
    return log(mantissa_norm()) / 2 + Real(exponent_) * log(Real(2));
  }

  Real arg() const {
    using std::atan2;
    return atan2(im_, re_);
  }

  // Nearest double complex; overflows to infinity and underflows to zero.
  std::complex<double> to_complex() const {
    const auto e = static_cast<int>(std::clamp<std::int64_t>(exponent_, -100000, 100000));
    return {std::ldexp(static_cast<double>(re_), e), std::ldexp(static_cast<double>(im_), e)};
  }

  BasicScaledComplex conj() const {
    BasicScaledComplex r = *this;
    r.im_ = -r.im_;
    return r;
  }

  BasicScaledComplex operator-() const {
    BasicScaledComplex r = *this;
    r.re_ = -r.re_;
    r.im_ = -r.im_;
    return r;
  }

  BasicScaledComplex reciprocal() const {
    const Real n = mantissa_norm();
    return from_raw(re_ / n, -im_ / n, -exponent_);
  }

  // Multiplication by 2^shift is exact.
  BasicScaledComplex scaled_by_pow2(std::int64_t shift) const {
    BasicScaledComplex r = *this;
    if (!r.is_zero()) r.exponent_ += shift;
    return r;
  }

  friend BasicScaledComplex operator*(const BasicScaledComplex& a, const BasicScaledComplex& b) {
    return from_raw(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_,
                    a.exponent_ + b.exponent_);
  }

  friend BasicScaledComplex operator/(const BasicScaledComplex& a, const BasicScaledComplex& b) {
    return a * b.reciprocal();
  }

  friend BasicScaledComplex operator+(const BasicScaledComplex& a, const BasicScaledComplex& b) {
    BasicScaledComplex r = a;
    r.add_raw(b.re_, b.im_, b.exponent_);
    r.normalize();
    return r;
  }

  friend BasicScaledComplex operator-(const BasicScaledComplex& a, const BasicScaledComplex& b) {
    return a + (-b);
  }

  BasicScaledComplex& operator+=(const BasicScaledComplex& b) { return *this = *this + b; }
  BasicScaledComplex& operator*=(const BasicScaledComplex& b) { return *this = *this * b; }

  // *this += a * b with a single renormalization.
  void multiply_add(const BasicScaledComplex& a, const BasicScaledComplex& b) {
    if (a.is_zero() || b.is_zero()) return;
    add_raw(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_,
            a.exponent_ + b.exponent_);
    normalize();
  }

  friend bool operator==(const BasicScaledComplex& a, const BasicScaledComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_ && a.exponent_ == b.exponent_;
  }

 private:
  static BasicScaledComplex from_raw(Real re, Real im, std::int64_t exponent) {
    BasicScaledComplex r;
    r.re_ = std::move(re);
    r.im_ = std::move(im);
    r.exponent_ = exponent;
    r.normalize();
    return r;
  }

  // Adds (re, im) * 2^exponent to the unnormalized sum, aligning to the
  // larger exponent. Terms below the working precision are dropped.
  void add_raw(Real re, Real im, std::int64_t exponent) {
    if (re == 0 && im == 0) return;
    if (is_zero()) {
      re_ = std::move(re);
      im_ = std::move(im);
      exponent_ = exponent;
      return;
    }
    constexpr std::int64_t kDrop = std::numeric_limits<Real>::digits + 8;
    std::int64_t d = exponent - exponent_;
    if (d > 0) {
      std::swap(re_, re);
      std::swap(im_, im);
      std::swap(exponent_, exponent);
      d = -d;
    }
    if (d < -kDrop) return;
    if constexpr (std::is_same_v<Real, double>) {
      const double s = detail::pow2(static_cast<int>(d));
      re_ += re * s;
      im_ += im * s;
    } else {
      using std::ldexp;
      re_ += ldexp(re, static_cast<int>(d));
      im_ += ldexp(im, static_cast<int>(d));
    }
  }

  void normalize() {
    using std::abs;
    if (re_ == 0 && im_ == 0) {
      re_ = 0;
      im_ = 0;
      exponent_ = 0;
      return;
    }
    const Real big = std::max(abs(re_), abs(im_));
    if constexpr (std::is_same_v<Real, double>) {
      if (!std::isfinite(big)) return;
      if (big >= std::numeric_limits<double>::min() && big < 0x1.0p1000) {
        const int e = std::ilogb(big);
        const double s = detail::pow2(-e);
        re_ *= s;
        im_ *= s;
        exponent_ += e;
      } else {
        const int e = std::ilogb(big);
        re_ = std::scalbn(re_, -e);
        im_ = std::scalbn(im_, -e);
        exponent_ += e;
      }
    } else {
      using std::frexp;
      using std::ldexp;
      int e = 0;
      (void)frexp(big, &e);
      re_ = ldexp(re_, 1 - e);
      im_ = ldexp(im_, 1 - e);
      exponent_ += e - 1;
    }
    if (re_ * re_ + im_ * im_ >= 4) {
      re_ /= 2;
      im_ /= 2;
      exponent_ += 1;
    }
  }

  Real re_{0};
  Real im_{0};
  std::int64_t exponent_{0};
};

using ScaledComplex = BasicScaledComplex<double>;

}  // namespace derivroots
