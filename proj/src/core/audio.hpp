// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace paragse {

// Mono sampled waveform, the carrier type for every signal path.
// Samples are dimensionless amplitudes, nominally in [-1, 1]; all
// internal arithmetic is double precision.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t length() const { return samples.size(); }
  double seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

inline void validate_audio(const AudioBuffer& a, const std::string& what) {
  if (a.sample_rate <= 0) {
    throw InvalidInputError(what + ": sample rate must be positive, got " +
                            std::to_string(a.sample_rate));
  }
  for (double s : a.samples) {
    if (!std::isfinite(s)) {
      throw InvalidInputError(what + ": non-finite sample");
    }
  }
}

inline double signal_power(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

inline double peak_abs(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::fabs(v));
  return p;
}

}  // namespace paragse
