#pragma once

#include <complex>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace derivroots {

using Complex = std::complex<double>;

// 200-bit binary mantissa. Used by oracles, the coefficient path, and
// near-degenerate audits; the main path stays in double.
using HpReal = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<200, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;
using HpComplex = boost::multiprecision::number<
    boost::multiprecision::complex_adaptor<
        boost::multiprecision::cpp_bin_float<200, boost::multiprecision::digit_base_2>>,
    boost::multiprecision::et_off>;

inline HpComplex to_hp(Complex z) { return HpComplex(HpReal(z.real()), HpReal(z.imag())); }

inline Complex to_double(const HpComplex& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

}  // namespace derivroots
