// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "core/dsp.hpp"

namespace paragse::metrics {

namespace {

constexpr int kLsdFrame = 1024;
constexpr int kLsdShift = 256;
constexpr double kLsdEps = 1e-8;

std::string hardware_note() {
  std::string model = "unknown-cpu";
  std::ifstream is("/proc/cpuinfo");
  std::string line;
  while (std::getline(is, line)) {
    auto pos = line.find("model name");
    if (pos != std::string::npos) {
      auto colon = line.find(':');
      if (colon != std::string::npos && colon + 2 <= line.size()) {
        model = line.substr(colon + 1);
        while (!model.empty() && model.front() == ' ') model.erase(0, 1);
      }
      break;
    }
  }
  return model + " (" + std::to_string(std::thread::hardware_concurrency()) +
         " hw threads)";
}

}  // namespace

double lsd(const AudioBuffer& reference, const AudioBuffer& test) {
  validate_audio(reference, "lsd reference");
  validate_audio(test, "lsd test");
  if (reference.samples.size() != test.samples.size() ||
      reference.sample_rate != test.sample_rate) {
    throw InvalidInputError("lsd: signals must share length and rate");
  }
  if (reference.samples.size() < static_cast<size_t>(kLsdFrame)) {
    throw InvalidInputError("lsd: signals shorter than one analysis frame");
  }

  auto ref = dsp::stft_amp_phase(reference, kLsdFrame, kLsdShift, kLsdFrame);
  auto tst = dsp::stft_amp_phase(test, kLsdFrame, kLsdShift, kLsdFrame);

  double frame_sum = 0.0;
  for (size_t f = 0; f < ref.frames(); ++f) {
    const double* a = ref.amplitude.row(f);
    const double* b = tst.amplitude.row(f);
    double bin_sum = 0.0;
    for (size_t k = 0; k < ref.bins(); ++k) {
      double d = 20.0 * std::log10((a[k] + kLsdEps) / (b[k] + kLsdEps));
      bin_sum += d * d;
    }
    frame_sum += std::sqrt(bin_sum / static_cast<double>(ref.bins()));
  }
  return frame_sum / static_cast<double>(ref.frames());
}

double measure_snr(const AudioBuffer& clean, const AudioBuffer& noisy) {
  validate_audio(clean, "measure_snr clean");
  validate_audio(noisy, "measure_snr noisy");
  if (clean.samples.size() != noisy.samples.size()) {
    throw InvalidInputError("measure_snr: length mismatch");
  }
  double p_clean = 0.0;
  double p_res = 0.0;
  for (size_t i = 0; i < clean.samples.size(); ++i) {
    double r = noisy.samples[i] - clean.samples[i];
    p_clean += clean.samples[i] * clean.samples[i];
    p_res += r * r;
  }
  if (p_res <= 0.0) {
    throw DegenerateInputError("measure_snr: zero residual power");
  }
  if (p_clean <= 0.0) {
    throw DegenerateInputError("measure_snr: zero clean power");
  }
  return 10.0 * std::log10(p_clean / p_res);
}

TokenAccuracy token_accuracy(const codec::TokenSequence& predicted,
                             const codec::TokenSequence& target) {
  if (predicted.frames != target.frames ||
      predicted.groups != target.groups || predicted.frames == 0) {
    throw InvalidInputError("token_accuracy: shape mismatch");
  }
  TokenAccuracy acc;
  acc.per_branch.assign(predicted.groups, 0.0);
  size_t total_hits = 0;
  for (size_t g = 0; g < predicted.groups; ++g) {
    size_t hits = 0;
    for (size_t f = 0; f < predicted.frames; ++f) {
      if (predicted.at(f, g) == target.at(f, g)) ++hits;
    }
    acc.per_branch[g] =
        static_cast<double>(hits) / static_cast<double>(predicted.frames);
    total_hits += hits;
  }
  acc.overall = static_cast<double>(total_hits) /
                static_cast<double>(predicted.frames * predicted.groups);
  return acc;
}

RtfReport bench_rtf(const std::function<void(const AudioBuffer&)>& pipeline,
                    const AudioBuffer& audio, int workers, int repeats,
                    const std::string& pipeline_name) {
  if (repeats < 3) throw InvalidInputError("bench_rtf: repeats must be >= 3");
  if (audio.seconds() < 10.0) {
    throw InvalidInputError("bench_rtf: need at least 10 s of audio");
  }

  auto run_once = [&](int run_index) {
    try {
      auto t0 = std::chrono::steady_clock::now();
      pipeline(audio);
      auto t1 = std::chrono::steady_clock::now();
      return std::chrono::duration<double>(t1 - t0).count();
    } catch (const Error& e) {
      throw Error(e.kind(), "bench_rtf: pipeline failed on run " +
                                std::to_string(run_index) + ": " + e.what());
    }
  };

  run_once(-1);  // warm-up, excluded
  RtfReport report;
  report.workers = workers;
  report.pipeline = pipeline_name;
  report.audio_seconds = audio.seconds();
  report.hardware = hardware_note();
  for (int r = 0; r < repeats; ++r) {
    report.run_seconds.push_back(run_once(r));
  }

  std::vector<double> sorted = report.run_seconds;
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  report.wall_seconds = (n % 2 == 1)
                            ? sorted[n / 2]
                            : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  report.rtf = report.wall_seconds / report.audio_seconds;
  report.speedup_vs_realtime = 1.0 / report.rtf;
  return report;
}

}  // namespace paragse::metrics
