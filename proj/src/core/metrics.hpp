// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/audio.hpp"
#include "core/codec.hpp"

namespace paragse::metrics {

// Log-spectral distance in dB between two equal-length signals:
// frame-mean of the per-frame RMS of 20*log10((|S_ref|+eps)/(|S_test|+eps))
// over bins. Analysis is fixed at frame 1024 / shift 256 / Hann with
// eps = 1e-8 so values are comparable across runs.
double lsd(const AudioBuffer& reference, const AudioBuffer& test);

// 10*log10(P_clean / P_residual) with residual = noisy - clean.
double measure_snr(const AudioBuffer& clean, const AudioBuffer& noisy);

struct TokenAccuracy {
  std::vector<double> per_branch;
  double overall = 0.0;
};

TokenAccuracy token_accuracy(const codec::TokenSequence& predicted,
                             const codec::TokenSequence& target);

// Wall-clock efficiency of an enhancement pipeline relative to real time.
struct RtfReport {
  double wall_seconds = 0.0;   // median over the timed repeats
  double audio_seconds = 0.0;
  double rtf = 0.0;            // wall / audio
  double speedup_vs_realtime = 0.0;  // 1 / rtf
  int workers = 1;
  std::string pipeline;
  std::string hardware;
  std::vector<double> run_seconds;  // all timed repeats, for spread reporting
};

// One warm-up run (untimed) followed by `repeats` timed runs; the report
// carries the median. Requires repeats >= 3 and at least 10 s of audio.
RtfReport bench_rtf(const std::function<void(const AudioBuffer&)>& pipeline,
                    const AudioBuffer& audio, int workers, int repeats,
                    const std::string& pipeline_name);

}  // namespace paragse::metrics
