#pragma once

#include <complex>
#include <cstddef>

namespace dmri::detail {

// Unnormalized in-place 2D FFT of one rows x cols row-major frame.
// sign = -1 forward, +1 backward. Thread-safe.
void fft2_inplace(std::complex<double> *frame, std::size_t rows, std::size_t cols, int sign);

} // namespace dmri::detail
