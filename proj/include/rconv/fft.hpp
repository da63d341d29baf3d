#pragma once

#include "rconv/grid.hpp"

namespace rconv {

// In-place multi-dimensional FFT over a row-major N^n array.
// forward: X[m] = sum_j x[j] e^{-2 pi i <j,m>/N}  (unnormalized)
// inverse: x[j] = (1/N^n) sum_m X[m] e^{+2 pi i <j,m>/N}
void fft_forward(CVec& data, const GridSpec& spec);
void fft_inverse(CVec& data, const GridSpec& spec);

} // namespace rconv
