// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "core/audio.hpp"
#include "core/linalg.hpp"

namespace paragse::dsp {

// Lapped MDCT coefficients: one row per frame, W bins per row.
struct MdctSpectrum {
  Matrix coefficients;  // frames x W
  int hop = 0;          // W samples between frames
  std::string window_id = "sine";

  size_t frames() const { return coefficients.rows; }
  size_t bins() const { return coefficients.cols; }
};

// STFT analysis result; amplitude and phase share the frames x bins shape
// with bins = fft_size/2 + 1. Phase is wrapped to (-pi, pi].
struct StftFrames {
  Matrix amplitude;
  Matrix phase;
  int frame_length = 0;
  int frame_shift = 0;
  int fft_size = 0;

  size_t frames() const { return amplitude.rows; }
  size_t bins() const { return amplitude.cols; }
};

// Sine analysis/synthesis window of length 2W; satisfies the
// Princen-Bradley condition w[n]^2 + w[n+W]^2 = 1.
Vector mdct_sine_window(int half_window);

// Periodic Hann window of length n.
Vector hann_periodic_window(int n);

// Lapped transform with 50% overlap, hop = half_window, window length
// 2*half_window. The input is zero-padded by half_window/2 on each side
// (and out to a whole number of hops at the tail), giving exactly
// ceil(len / half_window) frames; together with the boundary handling in
// mdct_inverse the transform is invertible, so round-trips reconstruct
// the signal to machine precision. half_window must be even.
MdctSpectrum mdct_forward(const AudioBuffer& audio, int half_window);

// Windowed overlap-add synthesis. The first and last half_window/2 output
// samples are covered by a single frame whose alias partner lies in the
// known zero padding; they are rescaled by 1/w[n]^2 to complete the
// reconstruction. Returns frames * half_window samples; callers trim when
// the original length was not a multiple of the hop.
AudioBuffer mdct_inverse(const MdctSpectrum& spectrum, int sample_rate);

// Amplitude/phase STFT with periodic Hann window and reflective padding
// of frame_length/2 on each side. fft_size must be a power of two.
StftFrames stft_amp_phase(const AudioBuffer& audio, int frame_length,
                          int frame_shift, int fft_size);

// Windowed-sinc sample rate conversion with anti-aliasing low-pass at
// min(source, target)/2. Same-rate input is returned unchanged.
AudioBuffer resample(const AudioBuffer& audio, int target_rate);

}  // namespace paragse::dsp
