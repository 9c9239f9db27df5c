#pragma once

#include <complex>
#include <vector>

namespace kdv5::detail {

/// In-place unnormalized DFT. sign = -1: sum_j x_j e^{-2pi i jk/n};
/// sign = +1: the conjugate kernel. Plans are cached per (n, sign).
void fft_inplace(std::vector<std::complex<double>>& data, int sign);

/// Smallest 7-smooth integer >= n (fast FFTW length).
int next_fast_size(int n);

/// Smallest power of two >= n.
int next_pow2(int n);

}  // namespace kdv5::detail
