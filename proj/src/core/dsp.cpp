// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/fft.hpp"

namespace paragse::dsp {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

// cos(pi/W * (n + 0.5 + W/2) * (k + 0.5)) for n in [0, 2W), k in [0, W).
Matrix mdct_cos_table(int w) {
  Matrix t(2 * static_cast<size_t>(w), static_cast<size_t>(w));
  for (int n = 0; n < 2 * w; ++n) {
    double a = (kPi / w) * (n + 0.5 + 0.5 * w);
    for (int k = 0; k < w; ++k) t.at(n, k) = std::cos(a * (k + 0.5));
  }
  return t;
}

void check_mdct_window(int half_window) {
  if (half_window < 2 || half_window % 2 != 0) {
    throw InvalidInputError(
        "mdct: half_window must be an even integer >= 2, got " +
        std::to_string(half_window));
  }
}

// Mirror index for reflective padding without repeating the edge sample.
size_t reflect_index(long long t, size_t len) {
  if (t < 0) t = -t;
  long long last = static_cast<long long>(len) - 1;
  if (t > last) t = 2 * last - t;
  return static_cast<size_t>(t);
}

}  // namespace

Vector mdct_sine_window(int half_window) {
  Vector w(2 * static_cast<size_t>(half_window));
  for (size_t n = 0; n < w.size(); ++n) {
    w[n] = std::sin(kPi * (static_cast<double>(n) + 0.5) /
                    (2.0 * half_window));
  }
  return w;
}

Vector hann_periodic_window(int n) {
  Vector w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(kTwoPi * i / static_cast<double>(n));
  }
  return w;
}

MdctSpectrum mdct_forward(const AudioBuffer& audio, int half_window) {
  check_mdct_window(half_window);
  validate_audio(audio, "mdct_forward");
  const int w = half_window;
  const size_t len = audio.length();
  if (len < 2 * static_cast<size_t>(w)) {
    throw InvalidInputError("mdct_forward: audio length " +
                            std::to_string(len) + " is shorter than 2W = " +
                            std::to_string(2 * w));
  }

  const size_t frames = (len + w - 1) / w;
  const size_t head = static_cast<size_t>(w) / 2;
  Vector padded((frames + 1) * w, 0.0);
  std::copy(audio.samples.begin(), audio.samples.end(), padded.begin() + head);

  const Vector win = mdct_sine_window(w);
  const Matrix cos_t = mdct_cos_table(w);

  MdctSpectrum spec;
  spec.hop = w;
  spec.window_id = "sine";
  spec.coefficients = Matrix(frames, static_cast<size_t>(w));
  Vector windowed(2 * static_cast<size_t>(w));
  for (size_t m = 0; m < frames; ++m) {
    const double* seg = padded.data() + m * w;
    for (int n = 0; n < 2 * w; ++n) windowed[n] = seg[n] * win[n];
    double* out = spec.coefficients.row(m);
    for (int k = 0; k < w; ++k) {
      double acc = 0.0;
      for (int n = 0; n < 2 * w; ++n) acc += windowed[n] * cos_t.at(n, k);
      out[k] = acc;
    }
  }
  return spec;
}

AudioBuffer mdct_inverse(const MdctSpectrum& spectrum, int sample_rate) {
  const int w = spectrum.hop;
  check_mdct_window(w);
  if (spectrum.coefficients.rows < 1 ||
      spectrum.coefficients.cols != static_cast<size_t>(w)) {
    throw InvalidInputError("mdct_inverse: malformed spectrum shape");
  }
  for (double c : spectrum.coefficients.data) {
    if (!std::isfinite(c)) {
      throw InvalidInputError("mdct_inverse: non-finite coefficient");
    }
  }

  const size_t frames = spectrum.frames();
  const size_t head = static_cast<size_t>(w) / 2;
  const Vector win = mdct_sine_window(w);
  const Matrix cos_t = mdct_cos_table(w);
  const double scale = 2.0 / w;

  Vector acc((frames + 1) * w, 0.0);
  for (size_t m = 0; m < frames; ++m) {
    const double* coeff = spectrum.coefficients.row(m);
    double* dst = acc.data() + m * w;
    for (int n = 0; n < 2 * w; ++n) {
      double s = 0.0;
      for (int k = 0; k < w; ++k) s += coeff[k] * cos_t.at(n, k);
      dst[n] += scale * win[n] * s;
    }
  }

  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.assign(acc.begin() + head, acc.begin() + head + frames * w);

  // Boundary samples are covered by one frame only; their time-domain
  // alias partner sits in the zero padding, so the overlap-add value is
  // w[n]^2 * x[n] and dividing restores x exactly.
  for (size_t j = 0; j < head; ++j) {
    double wn = win[head + j];
    out.samples[j] /= wn * wn;
  }
  const size_t tail_begin = frames * w - head;
  for (size_t j = tail_begin; j < frames * w; ++j) {
    size_t n = head + j - (frames - 1) * w;  // window index in the last frame
    double wn = win[n];
    out.samples[j] /= wn * wn;
  }
  return out;
}

StftFrames stft_amp_phase(const AudioBuffer& audio, int frame_length,
                          int frame_shift, int fft_size) {
  validate_audio(audio, "stft_amp_phase");
  if (frame_length < 2 || frame_shift < 1) {
    throw InvalidInputError("stft: frame_length/frame_shift out of range");
  }
  if (fft_size < frame_length) {
    throw InvalidInputError("stft: fft_size " + std::to_string(fft_size) +
                            " smaller than frame_length " +
                            std::to_string(frame_length));
  }
  if (frame_shift > frame_length) {
    throw InvalidInputError("stft: frame_shift exceeds frame_length");
  }
  if ((fft_size & (fft_size - 1)) != 0) {
    throw InvalidInputError("stft: fft_size must be a power of two");
  }
  const size_t len = audio.length();
  if (len < static_cast<size_t>(frame_length)) {
    throw InvalidInputError("stft: audio shorter than one frame");
  }

  const size_t half = static_cast<size_t>(frame_length) / 2;
  const size_t padded_len = len + 2 * half;
  const size_t frames =
      (padded_len - frame_length) / static_cast<size_t>(frame_shift) + 1;
  const size_t bins = static_cast<size_t>(fft_size) / 2 + 1;
  const Vector win = hann_periodic_window(frame_length);

  StftFrames out;
  out.frame_length = frame_length;
  out.frame_shift = frame_shift;
  out.fft_size = fft_size;
  out.amplitude = Matrix(frames, bins);
  out.phase = Matrix(frames, bins);

  Vector frame(static_cast<size_t>(frame_length));
  for (size_t f = 0; f < frames; ++f) {
    const long long start =
        static_cast<long long>(f) * frame_shift - static_cast<long long>(half);
    for (int n = 0; n < frame_length; ++n) {
      frame[n] = audio.samples[reflect_index(start + n, len)] * win[n];
    }
    auto spec = rfft(frame.data(), frame.size(), fft_size);
    double* amp = out.amplitude.row(f);
    double* ph = out.phase.row(f);
    for (size_t k = 0; k < bins; ++k) {
      amp[k] = std::abs(spec[k]);
      double p = std::atan2(spec[k].imag(), spec[k].real());
      if (p <= -kPi) p = kPi;  // wrap to (-pi, pi]
      ph[k] = p;
    }
  }
  return out;
}

AudioBuffer resample(const AudioBuffer& audio, int target_rate) {
  validate_audio(audio, "resample");
  if (target_rate <= 0) {
    throw InvalidInputError("resample: target rate must be positive, got " +
                            std::to_string(target_rate));
  }
  if (target_rate == audio.sample_rate) return audio;

  const long long src = audio.sample_rate;
  const long long tgt = target_rate;
  const long long len = static_cast<long long>(audio.length());
  const long long n_out = (len * tgt + src / 2) / src;  // round(len*tgt/src)

  // Anti-alias cutoff as a fraction of the source rate; the Blackman
  // window keeps the stopband below -70 dB and the transition band well
  // inside the new Nyquist interval.
  const double cutoff = 0.445 * static_cast<double>(std::min(src, tgt)) /
                        static_cast<double>(src);
  const int taps = std::max(32, static_cast<int>(std::ceil(29.0 / cutoff)));

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<size_t>(std::max<long long>(n_out, 0)), 0.0);

  const double* x = audio.samples.data();
  for (long long j = 0; j < n_out; ++j) {
    // Exact rational position of output sample j in input coordinates.
    const long long num = j * src;
    const long long k0 = num / tgt;
    const double frac = static_cast<double>(num % tgt) / static_cast<double>(tgt);
    const double t = static_cast<double>(k0) + frac;

    long long k_lo = static_cast<long long>(std::ceil(t)) - taps;
    long long k_hi = static_cast<long long>(std::floor(t)) + taps;
    k_lo = std::max<long long>(k_lo, 0);
    k_hi = std::min<long long>(k_hi, len - 1);

    double acc = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k) {
      const double u = t - static_cast<double>(k);
      const double a = kTwoPi * cutoff * u;
      const double sinc = (std::fabs(a) < 1e-12) ? 1.0 : std::sin(a) / a;
      const double v = u / taps;  // |v| <= 1 by construction of the range
      const double window = 0.42 + 0.5 * std::cos(kPi * v) +
                            0.08 * std::cos(kTwoPi * v);
      acc += x[k] * 2.0 * cutoff * sinc * window;
    }
    out.samples[static_cast<size_t>(j)] = acc;
  }
  return out;
}

}  // namespace paragse::dsp
