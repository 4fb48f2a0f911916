#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vlab {

using cplx = std::complex<double>;

// Linear convolution c[i] = sum_{j<=i} a[j] b[i-j] for i < n_out.
std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b, std::size_t n_out);

// In-place multi-dimensional DFT, row-major, unnormalized.
// sign = -1: X_k = sum_x x_n e^{-2 pi i k n / N}; sign = +1 the conjugate kernel.
void dft(std::vector<cplx>& data, std::span<const int> dims, int sign);

}  // namespace vlab
