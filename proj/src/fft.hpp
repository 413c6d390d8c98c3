#pragma once

#include <complex>
#include <span>

namespace tw::detail {

/// In-place unnormalized 3-D DFT of an n^3 array. Forward uses exp(-i k.x).
void fft3d(std::span<std::complex<double>> data, int n, bool forward);

}  // namespace tw::detail
