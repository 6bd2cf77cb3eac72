#pragma once

#include "oamao/field.hpp"

namespace oamao::fft {

// Unitary 2-D DFT pair (1/n scaling per axis in each direction). The forward
// transform uses the negative exponent. Both operate in place and are safe to
// call concurrently; plans are created once per size behind a lock.

void forward(Array2D<Complex>& data);
void inverse(Array2D<Complex>& data);

}  // namespace oamao::fft
