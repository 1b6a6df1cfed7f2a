// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "core/errors.hpp"

namespace paragse::dsp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Concatenated per-stage twiddle tables (re, im interleaved) for a given
// transform size: stage len contributes len/2 roots e^(-2*pi*i*k/len).
const std::vector<double>& twiddles_for(size_t n) {
  static std::mutex mutex;
  static std::map<size_t, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> table;
  table.reserve(2 * n);
  for (size_t len = 2; len <= n; len <<= 1) {
    for (size_t k = 0; k < len / 2; ++k) {
      const double ang = -kTwoPi * static_cast<double>(k) /
                         static_cast<double>(len);
      table.push_back(std::cos(ang));
      table.push_back(std::sin(ang));
    }
  }
  return cache.emplace(n, std::move(table)).first->second;
}

// Iterative radix-2 on interleaved (re, im) pairs. Manual complex
// arithmetic: std::complex multiplies lower to libcalls here and this is
// the hottest loop in the analysis path.
void fft_interleaved(double* d, size_t n, bool inverse) {
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(d[2 * i], d[2 * j]);
      std::swap(d[2 * i + 1], d[2 * j + 1]);
    }
  }

  const std::vector<double>& tw = twiddles_for(n);
  const double* stage_tw = tw.data();
  for (size_t len = 2; len <= n; len <<= 1) {
    const double conj = inverse ? -1.0 : 1.0;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        const double cur_r = stage_tw[2 * k];
        const double cur_i = conj * stage_tw[2 * k + 1];
        double* a = d + 2 * (i + k);
        double* b = d + 2 * (i + k + len / 2);
        const double br = b[0] * cur_r - b[1] * cur_i;
        const double bi = b[0] * cur_i + b[1] * cur_r;
        b[0] = a[0] - br;
        b[1] = a[1] - bi;
        a[0] += br;
        a[1] += bi;
      }
    }
    stage_tw += len;  // len/2 complex entries
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < 2 * n; ++i) d[i] *= scale;
  }
}

}  // namespace

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& x, bool inverse) {
  const size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw InvalidInputError("fft: size must be a power of two, got " +
                            std::to_string(n));
  }
  // std::complex<double> is layout-compatible with double[2].
  fft_interleaved(reinterpret_cast<double*>(x.data()), n, inverse);
}

std::vector<std::complex<double>> rfft(const double* x, size_t n,
                                       size_t fft_size) {
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) {
    throw InvalidInputError("rfft: size must be a power of two");
  }
  const size_t half = fft_size / 2;

  // Pack the real signal into a half-size complex transform, then
  // untangle the even/odd spectra.
  std::vector<double> packed(fft_size, 0.0);
  const size_t limit = std::min(n, fft_size);
  for (size_t i = 0; i < limit; ++i) packed[i] = x[i];
  fft_interleaved(packed.data(), half, false);

  std::vector<std::complex<double>> out(half + 1);
  const double re0 = packed[0];
  const double im0 = packed[1];
  out[0] = {re0 + im0, 0.0};
  out[half] = {re0 - im0, 0.0};
  for (size_t k = 1; k < half; ++k) {
    const size_t mk = half - k;
    const double ar = packed[2 * k], ai = packed[2 * k + 1];
    const double br = packed[2 * mk], bi = packed[2 * mk + 1];
    // Even part (spectrum of x[2i]) and odd part (spectrum of x[2i+1]).
    const double er = 0.5 * (ar + br);
    const double ei = 0.5 * (ai - bi);
    const double or_ = 0.5 * (ai + bi);
    const double oi = 0.5 * (br - ar);
    const double ang = -kTwoPi * static_cast<double>(k) /
                       static_cast<double>(fft_size);
    const double tr = std::cos(ang);
    const double ti = std::sin(ang);
    out[k] = {er + or_ * tr - oi * ti, ei + or_ * ti + oi * tr};
  }
  return out;
}

}  // namespace paragse::dsp
