// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "core/dsp.hpp"
#include "core/fft.hpp"
#include "core/rng.hpp"

namespace paragse::degrade {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

void validate_rir(const Rir& rir) {
  if (rir.impulse.samples.empty()) {
    throw InvalidInputError("rir: empty impulse response");
  }
  validate_audio(rir.impulse, "rir");
  if (peak_abs(rir.impulse.samples) <= 0.0) {
    throw InvalidInputError("rir: zero impulse response");
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::string format_spec(const DegradationSpec& spec) {
  std::ostringstream os;
  if (spec.stages.empty()) {
    os << "identity";
  } else {
    for (size_t i = 0; i < spec.stages.size(); ++i) {
      if (i) os << ';';
      const auto& st = spec.stages[i];
      switch (st.kind) {
        case StageKind::noise:
          os << "noise(" << st.asset_id << ',' << format_double(st.snr_db)
             << ')';
          break;
        case StageKind::reverb:
          os << "reverb(" << st.asset_id << ')';
          break;
        case StageKind::bandlimit:
          os << "bandlimit(" << st.target_hz << ')';
          break;
      }
    }
  }
  os << ";seed=" << spec.seed;
  return os.str();
}

DegradationSpec parse_spec(const std::string& text) {
  DegradationSpec spec;
  spec.seed = 1;
  std::stringstream ss(text);
  std::string element;
  while (std::getline(ss, element, ';')) {
    if (element.empty() || element == "identity") continue;
    if (element.rfind("seed=", 0) == 0) {
      spec.seed = std::stoull(element.substr(5));
      continue;
    }
    auto open = element.find('(');
    auto close = element.rfind(')');
    if (open == std::string::npos || close == std::string::npos ||
        close < open) {
      throw InvalidInputError("degradation spec: malformed element '" +
                              element + "'");
    }
    std::string name = element.substr(0, open);
    std::string args = element.substr(open + 1, close - open - 1);
    DegradationStage st;
    if (name == "noise") {
      auto comma = args.find(',');
      if (comma == std::string::npos) {
        throw InvalidInputError("degradation spec: noise needs (id,snr_db)");
      }
      st.kind = StageKind::noise;
      st.asset_id = args.substr(0, comma);
      st.snr_db = std::stod(args.substr(comma + 1));
      if (!std::isfinite(st.snr_db)) {
        throw InvalidInputError("degradation spec: non-finite SNR");
      }
    } else if (name == "reverb") {
      st.kind = StageKind::reverb;
      st.asset_id = args;
    } else if (name == "bandlimit") {
      st.kind = StageKind::bandlimit;
      st.target_hz = std::stoi(args);
    } else {
      throw InvalidInputError("degradation spec: unknown stage '" + name + "'");
    }
    spec.stages.push_back(std::move(st));
  }
  return spec;
}

AudioBuffer add_noise(const AudioBuffer& clean, const AudioBuffer& noise,
                      double snr_db, uint64_t seed) {
  validate_audio(clean, "add_noise clean");
  validate_audio(noise, "add_noise noise");
  if (clean.sample_rate != noise.sample_rate) {
    throw InvalidInputError("add_noise: sample rate mismatch");
  }
  if (!std::isfinite(snr_db)) {
    throw InvalidInputError("add_noise: non-finite SNR");
  }
  if (clean.samples.empty() || noise.samples.empty()) {
    throw InvalidInputError("add_noise: empty input");
  }

  // Seeded offset with wrap-around covers both the tiling case and the
  // window-selection case.
  Rng rng(seed);
  const size_t offset = rng.index(noise.samples.size());
  std::vector<double> segment(clean.samples.size());
  for (size_t i = 0; i < segment.size(); ++i) {
    segment[i] = noise.samples[(offset + i) % noise.samples.size()];
  }

  const double p_clean = signal_power(clean.samples);
  const double p_noise = signal_power(segment);
  if (p_clean <= 0.0) throw InvalidInputError("add_noise: zero-power clean");
  if (p_noise <= 0.0) throw InvalidInputError("add_noise: zero-power noise");

  const double alpha =
      std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
  AudioBuffer out;
  out.sample_rate = clean.sample_rate;
  out.samples.resize(clean.samples.size());
  for (size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = clean.samples[i] + alpha * segment[i];
  }
  return out;
}

AudioBuffer convolve_rir(const AudioBuffer& clean, const Rir& rir) {
  validate_audio(clean, "convolve_rir clean");
  validate_rir(rir);
  if (clean.sample_rate != rir.impulse.sample_rate) {
    throw InvalidInputError("convolve_rir: sample rate mismatch");
  }
  const size_t n = clean.samples.size();
  const size_t m = rir.impulse.samples.size();
  if (n == 0) return clean;

  const size_t size = dsp::next_pow2(n + m - 1);
  std::vector<std::complex<double>> a(size), b(size);
  for (size_t i = 0; i < n; ++i) a[i] = {clean.samples[i], 0.0};
  for (size_t i = 0; i < m; ++i) b[i] = {rir.impulse.samples[i], 0.0};
  dsp::fft_inplace(a, false);
  dsp::fft_inplace(b, false);
  for (size_t i = 0; i < size; ++i) a[i] *= b[i];
  dsp::fft_inplace(a, true);

  AudioBuffer out;
  out.sample_rate = clean.sample_rate;
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) out.samples[i] = a[i].real();

  const double peak_in = peak_abs(clean.samples);
  const double peak_out = peak_abs(out.samples);
  if (peak_in > 0.0 && peak_out > 0.0) {
    const double scale = peak_in / peak_out;
    for (double& v : out.samples) v *= scale;
  }
  return out;
}

AudioBuffer band_limit(const AudioBuffer& audio, int target_hz) {
  validate_audio(audio, "band_limit");
  if (target_hz <= 0 || target_hz >= audio.sample_rate) {
    throw InvalidInputError(
        "band_limit: target rate must be in (0, sample_rate), got " +
        std::to_string(target_hz));
  }
  AudioBuffer down = dsp::resample(audio, target_hz);
  AudioBuffer up = dsp::resample(down, audio.sample_rate);
  up.samples.resize(audio.samples.size(), 0.0);  // framing preserved
  return up;
}

std::pair<AudioBuffer, AudioBuffer> apply_spec(const AudioBuffer& clean,
                                               const DegradationSpec& spec,
                                               const Assets& assets) {
  validate_audio(clean, "apply_spec");
  AudioBuffer degraded = clean;
  for (size_t i = 0; i < spec.stages.size(); ++i) {
    const auto& st = spec.stages[i];
    const uint64_t stage_seed = Rng::mix(spec.seed, i);
    switch (st.kind) {
      case StageKind::noise: {
        auto it = assets.noise.find(st.asset_id);
        if (it == assets.noise.end()) {
          throw LookupError("apply_spec: unknown noise source '" +
                            st.asset_id + "'");
        }
        degraded = add_noise(degraded, it->second, st.snr_db, stage_seed);
        break;
      }
      case StageKind::reverb: {
        auto it = assets.rirs.find(st.asset_id);
        if (it == assets.rirs.end()) {
          throw LookupError("apply_spec: unknown RIR '" + st.asset_id + "'");
        }
        degraded = convolve_rir(degraded, it->second);
        break;
      }
      case StageKind::bandlimit:
        degraded = band_limit(degraded, st.target_hz);
        break;
    }
  }
  return {std::move(degraded), clean};
}

AudioBuffer synth_noise(const std::string& kind, size_t length,
                        int sample_rate, uint64_t seed) {
  if (length == 0 || sample_rate <= 0) {
    throw InvalidInputError("synth_noise: bad length or rate");
  }
  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.resize(length);
  Rng rng(seed);

  if (kind == "white") {
    for (double& v : out.samples) v = 0.1 * rng.normal();
    return out;
  }
  if (kind == "pink") {
    // Spectral synthesis: amplitude ~ 1/sqrt(f) gives an exact -3 dB per
    // octave power slope.
    const size_t size = dsp::next_pow2(length);
    std::vector<std::complex<double>> spec(size, {0.0, 0.0});
    for (size_t k = 1; k <= size / 2; ++k) {
      const double amp = 1.0 / std::sqrt(static_cast<double>(k));
      const double phase = rng.uniform(0.0, kTwoPi);
      std::complex<double> v(amp * std::cos(phase), amp * std::sin(phase));
      spec[k] = v;
      if (k < size / 2) spec[size - k] = std::conj(v);
    }
    spec[size / 2] = {spec[size / 2].real(), 0.0};
    dsp::fft_inplace(spec, true);
    double rms = 0.0;
    for (size_t i = 0; i < length; ++i) rms += spec[i].real() * spec[i].real();
    rms = std::sqrt(rms / static_cast<double>(length));
    for (size_t i = 0; i < length; ++i) {
      out.samples[i] = 0.1 * spec[i].real() / rms;
    }
    return out;
  }
  if (kind == "babble") {
    const double dur = static_cast<double>(length) / sample_rate;
    for (int talker = 0; talker < 6; ++talker) {
      AudioBuffer voice =
          synth_speech(dur, sample_rate, Rng::mix(seed, 100 + talker));
      for (size_t i = 0; i < length && i < voice.samples.size(); ++i) {
        out.samples[i] += voice.samples[i];
      }
    }
    double rms = std::sqrt(signal_power(out.samples));
    if (rms > 0) {
      for (double& v : out.samples) v *= 0.1 / rms;
    }
    return out;
  }
  throw InvalidInputError("synth_noise: unknown kind '" + kind + "'");
}

Rir synth_rir(double rt60_seconds, double duration_seconds, int sample_rate,
              uint64_t seed) {
  if (rt60_seconds <= 0 || duration_seconds <= 0 || sample_rate <= 0) {
    throw InvalidInputError("synth_rir: parameters must be positive");
  }
  const size_t taps = std::max<size_t>(
      64, static_cast<size_t>(duration_seconds * sample_rate));
  // Amplitude envelope reaching -60 dB at rt60: exp(-t/tau) with
  // tau = rt60 / (3 ln 10).
  const double tau = rt60_seconds * sample_rate / (3.0 * std::log(10.0));
  Rng rng(seed);
  Rir rir;
  rir.impulse.sample_rate = sample_rate;
  rir.impulse.samples.resize(taps);
  rir.impulse.samples[0] = 1.0;  // direct path
  for (size_t t = 1; t < taps; ++t) {
    rir.impulse.samples[t] =
        0.3 * std::exp(-static_cast<double>(t) / tau) * rng.normal();
  }
  return rir;
}

AudioBuffer synth_speech(double duration_seconds, int sample_rate,
                         uint64_t seed) {
  if (duration_seconds <= 0 || sample_rate <= 0) {
    throw InvalidInputError("synth_speech: parameters must be positive");
  }
  const size_t n = static_cast<size_t>(duration_seconds * sample_rate);
  Rng rng(seed);

  const double f0_base = 95.0 + 140.0 * rng.uniform();
  const double glide_rate = 0.25 + 0.6 * rng.uniform();   // Hz
  const double glide_depth = 0.04 + 0.1 * rng.uniform();
  const double glide_phase = rng.uniform(0.0, kTwoPi);
  const double syllable_rate = 2.2 + 1.6 * rng.uniform();  // Hz
  const double syllable_phase = rng.uniform(0.0, kTwoPi);

  // Harmonics up to ~3 kHz with a decaying, randomly weighted envelope;
  // everything above that is only low-level breath noise.
  const int harmonics = std::max(
      3, static_cast<int>(3000.0 / (f0_base * (1.0 + glide_depth))));
  std::vector<double> amp(harmonics);
  for (int h = 0; h < harmonics; ++h) {
    amp[h] = std::pow(1.0 / (h + 1.0), 0.7) * (0.35 + 0.65 * rng.uniform());
  }
  std::vector<double> phase(harmonics);
  for (int h = 0; h < harmonics; ++h) phase[h] = rng.uniform(0.0, kTwoPi);

  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double f0 =
        f0_base * (1.0 + glide_depth * std::sin(kTwoPi * glide_rate * t +
                                                glide_phase));
    const double env =
        0.2 + 0.8 * (0.5 - 0.5 * std::cos(kTwoPi * syllable_rate * t +
                                          syllable_phase));
    double v = 0.0;
    for (int h = 0; h < harmonics; ++h) {
      phase[h] += kTwoPi * (h + 1) * f0 / sample_rate;
      v += amp[h] * std::sin(phase[h]);
    }
    out.samples[i] = env * v;
  }

  // Low-level breath noise keeps the spectrum nonzero above the
  // harmonic band.
  const double rms = std::sqrt(signal_power(out.samples));
  const double breath = rms * std::pow(10.0, -45.0 / 20.0);
  for (double& v : out.samples) v += breath * rng.normal();

  const double peak = peak_abs(out.samples);
  if (peak > 0) {
    for (double& v : out.samples) v *= 0.5 / peak;
  }
  return out;
}

Assets synth_assets(uint64_t seed, int sample_rate) {
  Assets assets;
  const size_t noise_len = static_cast<size_t>(10 * sample_rate);
  assets.noise["white0"] =
      synth_noise("white", noise_len, sample_rate, Rng::mix(seed, 1));
  assets.noise["white1"] =
      synth_noise("white", noise_len, sample_rate, Rng::mix(seed, 2));
  assets.noise["pink0"] =
      synth_noise("pink", noise_len, sample_rate, Rng::mix(seed, 3));
  assets.noise["pink1"] =
      synth_noise("pink", noise_len, sample_rate, Rng::mix(seed, 4));
  assets.noise["babble0"] =
      synth_noise("babble", noise_len, sample_rate, Rng::mix(seed, 5));
  assets.rirs["rir0"] = synth_rir(0.15, 0.25, sample_rate, Rng::mix(seed, 6));
  assets.rirs["rir1"] = synth_rir(0.30, 0.45, sample_rate, Rng::mix(seed, 7));
  assets.rirs["rir2"] = synth_rir(0.50, 0.75, sample_rate, Rng::mix(seed, 8));
  return assets;
}

}  // namespace paragse::degrade
