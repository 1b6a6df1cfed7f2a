// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace paragse::dsp {

// In-place iterative radix-2 FFT. Size must be a power of two.
// inverse=true applies the conjugate transform and the 1/N scale.
void fft_inplace(std::vector<std::complex<double>>& x, bool inverse);

// DFT of a real signal zero-padded to fft_size (power of two).
// Returns the fft_size/2 + 1 non-redundant bins.
std::vector<std::complex<double>> rfft(const double* x, size_t n,
                                       size_t fft_size);

size_t next_pow2(size_t n);

}  // namespace paragse::dsp
