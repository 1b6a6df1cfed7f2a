// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/audio.hpp"

namespace paragse::degrade {

// Room impulse response used for reverberation.
struct Rir {
  AudioBuffer impulse;
};

enum class StageKind { noise, reverb, bandlimit };

struct DegradationStage {
  StageKind kind = StageKind::noise;
  std::string asset_id;  // noise source or RIR id
  double snr_db = 0.0;   // noise stages
  int target_hz = 0;     // bandlimit stages
};

// Ordered degradation recipe; an empty stage list is the identity.
struct DegradationSpec {
  std::vector<DegradationStage> stages;
  uint64_t seed = 1;
};

// Text form: stages separated by ';' plus a trailing seed element, e.g.
//   "reverb(rir0);noise(white0,7.5);bandlimit(8000);seed=17"
// An empty stage list renders as "identity;seed=17".
std::string format_spec(const DegradationSpec& spec);
DegradationSpec parse_spec(const std::string& text);

// Named noise sources and impulse responses a spec can reference.
struct Assets {
  std::map<std::string, AudioBuffer> noise;
  std::map<std::string, Rir> rirs;
};

// Mixes `noise` into `clean` scaled so the realized signal-to-noise ratio
// over the mixed segment equals snr_db exactly. Shorter noise is tiled
// from a seeded random offset; longer noise contributes a seeded random
// window.
AudioBuffer add_noise(const AudioBuffer& clean, const AudioBuffer& noise,
                      double snr_db, uint64_t seed);

// Full linear convolution truncated to the clean length and rescaled to
// the clean signal's peak.
AudioBuffer convolve_rir(const AudioBuffer& clean, const Rir& rir);

// Resamples down to target_hz and back, removing content above
// target_hz/2 while preserving length and sample rate.
AudioBuffer band_limit(const AudioBuffer& audio, int target_hz);

// Applies the stages in order; returns (degraded, clean) with equal
// lengths. Deterministic under the spec seed.
std::pair<AudioBuffer, AudioBuffer> apply_spec(const AudioBuffer& clean,
                                               const DegradationSpec& spec,
                                               const Assets& assets);

// Seeded synthetic stand-ins for real corpora: broadband noises
// (white/pink/babble), exponential-decay RIRs, and harmonic speech-like
// clean signals.
AudioBuffer synth_noise(const std::string& kind, size_t length,
                        int sample_rate, uint64_t seed);
Rir synth_rir(double rt60_seconds, double duration_seconds, int sample_rate,
              uint64_t seed);
AudioBuffer synth_speech(double duration_seconds, int sample_rate,
                         uint64_t seed);
Assets synth_assets(uint64_t seed, int sample_rate);

}  // namespace paragse::degrade
