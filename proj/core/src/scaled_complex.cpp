#include "derivroots/scaled_complex.hpp"

#include "derivroots/precision.hpp"

namespace derivroots {

template class BasicScaledComplex<double>;
template class BasicScaledComplex<HpReal>;

}  // namespace derivroots
