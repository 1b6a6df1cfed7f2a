// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Acceptance suite: one check per release criterion, each printing a
// single PASS/FAIL line (SKIP only where a criterion's stated hardware
// precondition is not met). Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "core/codec.hpp"
#include "core/degrade.hpp"
#include "core/enhance.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace paragse;

namespace {

int g_failures = 0;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void report(int criterion, const char* title, bool pass,
            const std::string& detail, bool skipped = false) {
  const char* verdict = skipped ? "SKIP" : (pass ? "PASS" : "FAIL");
  if (!pass && !skipped) ++g_failures;
  std::printf("%s  criterion %2d: %s (%s)\n", verdict, criterion, title,
              detail.c_str());
  std::fflush(stdout);
}

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

Matrix clustered(size_t n, size_t dim, size_t clusters, uint64_t seed) {
  Rng rng(seed);
  Matrix centers(clusters, dim);
  for (auto& v : centers.data) v = rng.normal();
  Matrix data(n, dim);
  for (size_t i = 0; i < n; ++i) {
    size_t c = rng.index(clusters);
    for (size_t k = 0; k < dim; ++k) {
      data.at(i, k) = centers.at(c, k) + 0.05 * rng.normal();
    }
  }
  return data;
}

/* ---------------- criterion 1 ---------------- */
// MDCT perfect reconstruction: 100 random 1 s signals at 16 kHz,
// round-trip max abs error < 1e-6, runtime < 10 s.
void criterion_1() {
  const double t0 = now_seconds();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto a = testutil::noise(16000, 1.0, 1000 + trial);
    auto rec = dsp::mdct_inverse(dsp::mdct_forward(a, 40), 16000);
    worst = std::max(worst, testutil::max_abs_diff(rec.samples, a.samples));
  }
  const double elapsed = now_seconds() - t0;
  report(1, "MDCT perfect reconstruction", worst < 1e-6 && elapsed < 10.0,
         format("max abs err %.2e, %.1f s", worst, elapsed));
}

/* ---------------- criterion 2 ---------------- */
// GVQ oracle equivalence at N=4, M=256, K=32: tokens and quantized
// vectors bit-equal to the exhaustive per-group scan, runtime < 5 s.
void criterion_2() {
  const double t0 = now_seconds();
  codec::GvqQuantizer q;
  Rng rng(21);
  for (int g = 0; g < 4; ++g) {
    codec::Codebook cb;
    cb.entries = Matrix(256, 8);
    for (auto& v : cb.entries.data) v = rng.normal();
    q.codebooks.push_back(std::move(cb));
  }
  size_t mismatches = 0;
  Vector e(32);
  for (int trial = 0; trial < 1000; ++trial) {
    for (auto& x : e) x = rng.normal();
    auto r = codec::gvq_quantize(e, q);
    for (size_t g = 0; g < 4; ++g) {
      uint32_t want = oracle::vq_scan(e.data() + g * 8, q.codebooks[g]);
      if (r.tokens[g] != want) ++mismatches;
      for (size_t k = 0; k < 8; ++k) {
        if (r.quantized[g * 8 + k] != q.codebooks[g].entries.at(want - 1, k)) {
          ++mismatches;
        }
      }
    }
  }
  const double elapsed = now_seconds() - t0;
  report(2, "GVQ oracle equivalence (N=4, M=256, K=32)",
         mismatches == 0 && elapsed < 5.0,
         format("%zu mismatches in 1000 latents, %.1f s", mismatches, elapsed));
}

/* ---------------- criterion 3 ---------------- */
// Grouped quantizer loss equals the double-loop oracle within 1e-12.
void criterion_3() {
  Rng rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Matrix> in, out;
    size_t groups = 1 + rng.index(5);
    size_t batch = 1 + rng.index(8);
    size_t dim = 1 + rng.index(6);
    for (size_t g = 0; g < groups; ++g) {
      in.emplace_back(batch, dim);
      out.emplace_back(batch, dim);
      for (auto& v : in.back().data) v = rng.normal();
      for (auto& v : out.back().data) v = rng.normal();
    }
    worst = std::max(worst, std::fabs(codec::gvq_loss(in, out) -
                                      oracle::gvq_loss_direct(in, out)));
  }
  report(3, "GVQ loss equals the double-loop oracle", worst < 1e-12,
         format("max deviation %.2e over 100 batches", worst));
}

/* ---------------- criterion 4 ---------------- */
// EMA codebook training: non-increasing MSE over 50 iterations (tol
// 1e-10); trained beats randomly picked entries on held-out data in at
// least 95/100 seeded trials; M=256 held-out MSE <= M=16 MSE.
void criterion_4() {
  bool monotone = true;
  double worst_rise = 0.0;
  {
    Matrix data = clustered(2000, 8, 60, 41);
    codec::CodebookTrainConfig cfg;
    cfg.codebook_size = 32;
    cfg.iterations = 50;
    cfg.seed = 5;
    std::vector<codec::CodebookTrainTrace> traces;
    codec::train_codebooks_gvq(data, 2, cfg, &traces);
    for (const auto& tr : traces) {
      for (size_t i = 1; i < tr.mse_per_iteration.size(); ++i) {
        double rise = tr.mse_per_iteration[i] - tr.mse_per_iteration[i - 1];
        worst_rise = std::max(worst_rise, rise);
        if (rise > 1e-10) monotone = false;
      }
    }
  }

  int wins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix train = clustered(600, 6, 24, 4100 + trial);
    Matrix held = clustered(300, 6, 24, 4100 + trial);
    codec::CodebookTrainConfig cfg;
    cfg.codebook_size = 16;
    cfg.iterations = 15;
    cfg.seed = 9 + trial;
    auto trained = codec::train_codebooks_gvq(train, 1, cfg);

    codec::GvqQuantizer random_pick;
    codec::Codebook cb;
    cb.entries = Matrix(16, 6);
    Rng rng(7777 + trial);
    for (size_t m = 0; m < 16; ++m) {
      size_t i = rng.index(train.rows);
      std::copy(train.row(i), train.row(i) + 6, cb.entries.row(m));
    }
    random_pick.codebooks.push_back(std::move(cb));
    if (codec::gvq_mse(held, trained) < codec::gvq_mse(held, random_pick)) {
      ++wins;
    }
  }

  Matrix train = clustered(3000, 8, 512, 43);
  Matrix held = clustered(1000, 8, 512, 43);
  codec::CodebookTrainConfig small_cfg, large_cfg;
  small_cfg.codebook_size = 16;
  small_cfg.iterations = 30;
  small_cfg.seed = 2;
  large_cfg.codebook_size = 256;
  large_cfg.iterations = 30;
  large_cfg.seed = 2;
  double mse16 =
      codec::gvq_mse(held, codec::train_codebooks_gvq(train, 1, small_cfg));
  double mse256 =
      codec::gvq_mse(held, codec::train_codebooks_gvq(train, 1, large_cfg));

  bool pass = monotone && wins >= 95 && mse256 <= mse16;
  report(4, "EMA codebook training quality",
         pass,
         format("worst MSE rise %.1e, trained>random in %d/100, "
                "MSE(M=256)=%.4g <= MSE(M=16)=%.4g",
                worst_rise, wins, mse256, mse16));
}

/* ---------------- criterion 5 ---------------- */
// Analytic gradients of the total cross-entropy loss match central finite
// differences (step 1e-5) with relative error < 1e-4 on a C=8, M=16,
// H=16 configuration; runtime < 30 s.
double gradient_check_worst(bool serial, size_t groups) {
  enhance::ExtractorConfig cfg;
  cfg.frame_length = 8;
  cfg.frame_shift = 4;
  cfg.fft_size = 8;
  cfg.stack_frames = 2;

  auto model = enhance::init_enhancer(groups, 16, 8, 16, serial, cfg, 51);
  Rng rng(52);
  const size_t frames = 5;
  Matrix stacked(frames, cfg.stacked_dim());
  for (auto& v : stacked.data) v = rng.uniform(-2.0, 2.0);
  codec::TokenSequence deg, tgt;
  deg.frames = tgt.frames = frames;
  deg.groups = tgt.groups = groups;
  deg.codebook_size = tgt.codebook_size = 16;
  for (size_t i = 0; i < frames * groups; ++i) {
    deg.tokens.push_back(static_cast<uint32_t>(1 + rng.index(16)));
    tgt.tokens.push_back(static_cast<uint32_t>(1 + rng.index(16)));
  }
  std::vector<size_t> idx(frames);
  std::iota(idx.begin(), idx.end(), 0);

  enhance::Gradients grads = enhance::Gradients::zeros_like(model);
  enhance::enhancer_backprop(model, stacked, deg, tgt, idx, &grads);

  std::vector<std::pair<double*, size_t>> params = {
      {model.extractor.proj.data.data(), model.extractor.proj.data.size()},
      {model.extractor.bias.data(), model.extractor.bias.size()}};
  std::vector<std::pair<double*, size_t>> grad_refs = {
      {grads.proj.data.data(), grads.proj.data.size()},
      {grads.bias.data(), grads.bias.size()}};
  for (size_t n = 0; n < groups; ++n) {
    auto& b = model.branches[n];
    auto& gb = grads.branches[n];
    params.push_back({b.embedding.data.data(), b.embedding.data.size()});
    params.push_back({b.w1.data.data(), b.w1.data.size()});
    params.push_back({b.b1.data(), b.b1.size()});
    params.push_back({b.w2.data.data(), b.w2.data.size()});
    params.push_back({b.b2.data(), b.b2.size()});
    grad_refs.push_back({gb.embedding.data.data(), gb.embedding.data.size()});
    grad_refs.push_back({gb.w1.data.data(), gb.w1.data.size()});
    grad_refs.push_back({gb.b1.data(), gb.b1.size()});
    grad_refs.push_back({gb.w2.data.data(), gb.w2.data.size()});
    grad_refs.push_back({gb.b2.data(), gb.b2.size()});
  }

  const double h = 1e-5;
  double worst = 0.0;
  for (size_t p = 0; p < params.size(); ++p) {
    for (size_t i = 0; i < params[p].second; ++i) {
      double saved = params[p].first[i];
      params[p].first[i] = saved + h;
      double up =
          enhance::enhancer_backprop(model, stacked, deg, tgt, idx, nullptr);
      params[p].first[i] = saved - h;
      double down =
          enhance::enhancer_backprop(model, stacked, deg, tgt, idx, nullptr);
      params[p].first[i] = saved;
      double numeric = (up - down) / (2.0 * h);
      double analytic = grad_refs[p].first[i];
      double rel = std::fabs(analytic - numeric) /
                   std::max(std::fabs(analytic) + std::fabs(numeric), 1e-4);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

void criterion_5() {
  const double t0 = now_seconds();
  double worst = std::max(gradient_check_worst(false, 4),
                          gradient_check_worst(true, 3));
  const double elapsed = now_seconds() - t0;
  report(5, "analytic gradients vs central differences",
         worst < 1e-4 && elapsed < 30.0,
         format("worst relative error %.2e (parallel and serial), %.1f s",
                worst, elapsed));
}

/* ---------------- shared model-building helpers ---------------- */

codec::CodecModel train_codec_on(const std::vector<AudioBuffer>& clean,
                                 size_t latent_dim, size_t groups, size_t m,
                                 size_t iters, uint64_t seed, bool with_rvq) {
  codec::CodecModel model;
  model.linear = codec::fit_linear_codec(clean, latent_dim, 40, 8, 16000);
  Matrix latents(0, latent_dim);
  for (const auto& a : clean) {
    Matrix l = codec::encode(a, model.linear);
    size_t old = latents.rows;
    latents.rows += l.rows;
    latents.data.resize(latents.rows * latents.cols);
    std::copy(l.data.begin(), l.data.end(),
              latents.data.begin() + old * latents.cols);
  }
  codec::CodebookTrainConfig cfg;
  cfg.codebook_size = m;
  cfg.iterations = iters;
  cfg.seed = seed;
  model.gvq = codec::train_codebooks_gvq(latents, groups, cfg);
  if (with_rvq) {
    model.rvq = codec::train_codebooks_rvq(latents, groups, cfg);
  }
  return model;
}

/* ---------------- criterion 6 ---------------- */
// Identity-task learnability: degraded = clean corpus; within 200 epochs
// every branch reaches >= 99% token accuracy on the training data.
void criterion_6() {
  const double t0 = now_seconds();
  std::vector<AudioBuffer> clean;
  for (int i = 0; i < 6; ++i) {
    clean.push_back(degrade::synth_speech(4.0, 16000, 600 + i));
  }
  auto codec_model = train_codec_on(clean, 32, 4, 64, 25, 61, false);

  enhance::ExtractorConfig ex;  // 320/40/1024, R=8
  auto model = enhance::init_enhancer(4, 64, 32, 64, false, ex, 62);

  size_t epochs_used = 0;
  double min_acc = 0.0;
  for (int round = 0; round < 5 && epochs_used < 200; ++round) {
    enhance::TrainConfig tc;
    tc.learning_rate = 0.08;
    tc.epochs = 40;
    tc.batch = 32;
    tc.seed = 63 + round;
    auto rep = enhance::train_enhancer(model, codec_model, clean, clean, tc);
    epochs_used += tc.epochs;
    min_acc = *std::min_element(rep.final_accuracy.begin(),
                                rep.final_accuracy.end());
    if (min_acc >= 0.99) break;
  }
  const double elapsed = now_seconds() - t0;
  report(6, "identity-task learnability",
         min_acc >= 0.99 && epochs_used <= 200,
         format("min branch accuracy %.4f after %zu epochs, %.0f s", min_acc,
                epochs_used, elapsed));
}

/* ---------------- criterion 7 ---------------- */
// Parallel efficiency: with N=4 branches and at least 60 s of audio on a
// machine with >= 4 cores, the parallel pipeline's median wall time is at
// most 0.8x the serial pipeline's; tokens are bit-identical for every
// worker count. Runtime < 5 min.
void criterion_7() {
  const double t0 = now_seconds();
  Rng rng(71);
  codec::CodecModel cm;
  cm.linear.mdct_half_window = 40;
  cm.linear.frames_per_token = 8;
  cm.linear.sample_rate = 16000;
  cm.linear.analysis = Matrix(32, 320);
  cm.linear.synthesis = Matrix(320, 32);
  for (auto& v : cm.linear.analysis.data) v = 0.05 * rng.normal();
  for (auto& v : cm.linear.synthesis.data) v = 0.05 * rng.normal();
  for (int g = 0; g < 4; ++g) {
    codec::Codebook cb;
    cb.entries = Matrix(256, 8);
    for (auto& v : cb.entries.data) v = rng.normal();
    cm.gvq.codebooks.push_back(std::move(cb));
  }
  codec::RvqQuantizer rvq;
  for (int s = 0; s < 4; ++s) {
    codec::Codebook cb;
    cb.entries = Matrix(256, 32);
    for (auto& v : cb.entries.data) v = rng.normal();
    rvq.codebooks.push_back(std::move(cb));
  }
  cm.rvq = std::move(rvq);

  // Benchmark-scale branches: wide enough that clean-token prediction
  // dominates the pipeline, as it does at full scale.
  enhance::ExtractorConfig ex;
  auto parallel = enhance::init_enhancer(4, 256, 64, 2048, false, ex, 72);
  auto serial = enhance::make_serial_variant(parallel);
  auto audio = degrade::synth_speech(60.0, 16000, 73);

  // Functional half: identical tokens for every worker count.
  auto tokens1 = enhance::predict_clean_tokens(parallel, cm, audio, 1);
  bool identical = true;
  for (int workers : {2, 3, 4, 8}) {
    auto t = enhance::predict_clean_tokens(parallel, cm, audio, workers);
    identical = identical && t.tokens == tokens1.tokens;
  }

  const unsigned cores = std::thread::hardware_concurrency();
  const int workers = static_cast<int>(std::min(cores, 4u));
  auto bench = [&](const enhance::EnhancerModel& m, int w) {
    auto pipeline = [&](const AudioBuffer& a) {
      enhance::enhance(m, cm, a, w);
    };
    return metrics::bench_rtf(pipeline, audio, w, 3,
                              m.serial ? "serial" : "parallel");
  };
  auto par = bench(parallel, workers);
  auto ser = bench(serial, 1);
  const double ratio = par.wall_seconds / ser.wall_seconds;
  const double elapsed = now_seconds() - t0;

  std::string detail = format(
      "parallel(%d workers) %.2fs vs serial %.2fs, ratio %.3f, tokens %s, "
      "%.0f s",
      workers, par.wall_seconds, ser.wall_seconds, ratio,
      identical ? "bit-identical" : "DIFFER", elapsed);
  if (cores < 4) {
    // The criterion presumes >= 4 physical cores; this host has fewer, so
    // the timing half cannot be asserted as specified. The measured ratio
    // is still reported, and token determinism is asserted regardless.
    report(7, "parallel efficiency (needs >= 4 cores)", identical,
           detail + format(" [only %u hardware threads]", cores),
           /*skipped=*/identical);
    return;
  }
  report(7, "parallel efficiency",
         identical && ratio <= 0.8 && elapsed < 300.0, detail);
}

/* ---------------- criterion 8 ---------------- */
// Degradation fidelity: exact SNR over both grids, >= 40 dB stopband
// rejection above 4 kHz for the 8 kHz bandlimit, and RIR convolution
// matching the naive oracle within 1e-9.
void criterion_8() {
  auto clean = degrade::synth_speech(2.0, 16000, 81);
  auto noise = degrade::synth_noise("white", 32000, 16000, 82);
  double worst_snr_err = 0.0;
  for (double snr : {0.0, 5.0, 10.0, 15.0, 2.5, 7.5, 12.5, 17.5}) {
    auto noisy = degrade::add_noise(clean, noise, snr, 83);
    worst_snr_err = std::max(
        worst_snr_err, std::fabs(metrics::measure_snr(clean, noisy) - snr));
  }

  auto broadband = degrade::synth_noise("white", 1 << 17, 16000, 84);
  auto limited = degrade::band_limit(broadband, 8000);
  auto band_energy = [](const AudioBuffer& a) {
    auto st = dsp::stft_amp_phase(a, 1024, 512, 1024);
    double hi = 0.0;
    for (size_t f = 0; f < st.frames(); ++f) {
      for (size_t k = 0; k < st.bins(); ++k) {
        double hz = 16000.0 * static_cast<double>(k) / 1024.0;
        if (hz > 4000.0) hi += st.amplitude.at(f, k) * st.amplitude.at(f, k);
      }
    }
    return hi;
  };
  const double rejection_db =
      10.0 * std::log10(band_energy(broadband) / band_energy(limited));

  auto probe = testutil::noise(16000, 0.5, 85, 0.5);
  auto rir = degrade::synth_rir(0.3, 0.45, 16000, 86);
  auto fast = degrade::convolve_rir(probe, rir);
  auto raw = oracle::convolve_direct(probe.samples, rir.impulse.samples);
  double peak_in = peak_abs(probe.samples);
  double peak_raw = peak_abs(raw);
  for (double& v : raw) v *= peak_in / peak_raw;
  const double conv_err = testutil::max_abs_diff(fast.samples, raw);

  bool pass =
      worst_snr_err <= 0.01 && rejection_db >= 40.0 && conv_err < 1e-9;
  report(8, "degradation fidelity", pass,
         format("SNR err %.4f dB, stopband rejection %.1f dB, conv err %.1e",
                worst_snr_err, rejection_db, conv_err));
}

/* ---------------- criterion 9 ---------------- */
// Directional enhancement: on a mild-noise corpus (10 dB SNR), training
// yields mean enhanced LSD below mean degraded LSD in at least 9 of 10
// seeded runs; runtime < 15 min.
void criterion_9() {
  const double t0 = now_seconds();
  int wins = 0;
  std::ostringstream margins;
  for (int run = 0; run < 10; ++run) {
    const uint64_t seed = 900 + 17 * static_cast<uint64_t>(run);
    std::vector<AudioBuffer> clean, degraded;
    auto noise = degrade::synth_noise("white", 160000, 16000, seed + 1);
    for (int i = 0; i < 10; ++i) {
      clean.push_back(degrade::synth_speech(4.0, 16000, seed + 10 + i));
      degraded.push_back(
          degrade::add_noise(clean.back(), noise, 10.0, seed + 50 + i));
    }

    auto codec_model = train_codec_on(clean, 32, 4, 64, 20, seed + 2, false);
    enhance::ExtractorConfig ex;
    auto model = enhance::init_enhancer(4, 64, 32, 64, false, ex, seed + 3);
    enhance::TrainConfig tc;
    tc.learning_rate = 0.05;
    tc.epochs = 12;
    tc.batch = 32;
    tc.seed = seed + 4;
    enhance::train_enhancer(model, codec_model, degraded, clean, tc);

    double lsd_degraded = 0.0, lsd_enhanced = 0.0;
    for (size_t i = 0; i < clean.size(); ++i) {
      AudioBuffer enhanced = enhance::enhance(model, codec_model, degraded[i], 2);
      lsd_degraded += metrics::lsd(clean[i], degraded[i]);
      lsd_enhanced += metrics::lsd(clean[i], enhanced);
    }
    lsd_degraded /= static_cast<double>(clean.size());
    lsd_enhanced /= static_cast<double>(clean.size());
    if (lsd_enhanced < lsd_degraded) ++wins;
    margins << format(" %.1f<%.1f", lsd_enhanced, lsd_degraded);
  }
  const double elapsed = now_seconds() - t0;
  report(9, "directional enhancement at 10 dB SNR",
         wins >= 9 && elapsed < 900.0,
         format("enhanced beats degraded LSD in %d/10 runs,%s; %.0f s", wins,
                margins.str().c_str(), elapsed));
}

/* ---------------- criterion 10 ---------------- */
// LSD metric: exact zero on identity, constant gain within 1e-6, and
// equality with the independent oracle within 1e-9.
void criterion_10() {
  auto a = testutil::noise(16000, 0.3, 101, 0.8);
  const double self = metrics::lsd(a, a);

  auto loud = testutil::noise(16000, 0.4, 102, 10.0);
  AudioBuffer twice = loud;
  for (double& v : twice.samples) v *= 2.0;
  const double gain_err =
      std::fabs(metrics::lsd(loud, twice) - 20.0 * std::log10(2.0));

  // Independent oracle: own padding, own window, naive DFT, double loop.
  auto amplitudes = [](const AudioBuffer& x) {
    const int frame = 1024, shift = 256;
    const size_t len = x.samples.size();
    const size_t half = frame / 2;
    const size_t frames = (len + 2 * half - frame) / shift + 1;
    Matrix out(frames, frame / 2 + 1);
    std::vector<double> windowed(frame);
    for (size_t f = 0; f < frames; ++f) {
      for (int n = 0; n < frame; ++n) {
        long long t = static_cast<long long>(f) * shift -
                      static_cast<long long>(half) + n;
        if (t < 0) t = -t;
        if (t >= static_cast<long long>(len)) {
          t = 2 * (static_cast<long long>(len) - 1) - t;
        }
        double w = 0.5 - 0.5 * std::cos(2.0 * oracle::kPi * n / frame);
        windowed[n] = x.samples[static_cast<size_t>(t)] * w;
      }
      auto spec = oracle::dft(windowed, frame);
      for (size_t k = 0; k < spec.size(); ++k) out.at(f, k) = std::abs(spec[k]);
    }
    return out;
  };
  double worst_oracle = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    AudioBuffer x = testutil::noise(16000, 1.0, 2000 + trial, 0.7);
    AudioBuffer y = testutil::noise(16000, 1.0, 3000 + trial, 0.7);
    x.samples.resize(1792);
    y.samples.resize(1792);
    double fast = metrics::lsd(x, y);
    double slow = oracle::lsd_direct(amplitudes(x), amplitudes(y), 1e-8);
    worst_oracle = std::max(worst_oracle, std::fabs(fast - slow));
  }

  bool pass = self == 0.0 && gain_err < 1e-6 && worst_oracle < 1e-9;
  report(10, "LSD metric correctness", pass,
         format("lsd(a,a)=%.1e, gain err %.1e, oracle dev %.1e", self,
                gain_err, worst_oracle));
}

/* ---------------- criterion 11 ---------------- */
// Determinism: every seeded CLI command produces byte-identical model
// files, manifests, and token dumps across repeated runs.
#ifndef PARAGSE_CLI_PATH
#define PARAGSE_CLI_PATH "paragse"
#endif

bool run_cli(const std::string& args, const std::string& log) {
  std::string cmd = std::string(PARAGSE_CLI_PATH) + " " + args + " > " + log +
                    " 2>&1";
  return std::system(cmd.c_str()) == 0;
}

bool same_bytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::string da((std::istreambuf_iterator<char>(fa)),
                 std::istreambuf_iterator<char>());
  std::string db((std::istreambuf_iterator<char>(fb)),
                 std::istreambuf_iterator<char>());
  return !da.empty() && da == db;
}

void criterion_11() {
  const double t0 = now_seconds();
  namespace fs = std::filesystem;
  const std::string base =
      (fs::temp_directory_path() / "pgse_acceptance").string();
  fs::remove_all(base);
  fs::create_directories(base);

  bool ok = true;
  std::string why = "all artifacts byte-identical";
  for (int rep = 0; rep < 2 && ok; ++rep) {
    const std::string dir = base + "/run" + std::to_string(rep);
    fs::create_directories(dir);
    ok = ok &&
         run_cli("make-corpus --out " + dir + "/corpus --task identity "
                 "--count 8 --seconds 3 --seed 5",
                 dir + "/mc.log") &&
         run_cli("train-codec --corpus " + dir + "/corpus/manifest.txt "
                 "--out " + dir + "/codec.gvqc --codebook-size 64 "
                 "--kmeans-iters 15 --seed 5",
                 dir + "/tc.log") &&
         run_cli("train-enhancer --corpus " + dir + "/corpus/manifest.txt "
                 "--codec " + dir + "/codec.gvqc --out " + dir +
                 "/enh.pgse --feature-dim 16 --hidden-dim 32 --epochs 2 "
                 "--seed 5 --report " + dir + "/report.tsv",
                 dir + "/te.log") &&
         run_cli("enhance --in " + dir + "/corpus/degraded_000.wav --out " +
                 dir + "/out.wav --codec " + dir + "/codec.gvqc --enhancer " +
                 dir + "/enh.pgse --workers 2 --dump-tokens " + dir +
                 "/tokens.txt",
                 dir + "/en.log");
    if (!ok) why = "CLI run " + std::to_string(rep) + " failed";
  }
  if (ok) {
    const std::string a = base + "/run0", b = base + "/run1";
    for (const char* rel :
         {"corpus/manifest.txt", "corpus/clean_000.wav",
          "corpus/degraded_007.wav", "codec.gvqc", "enh.pgse", "report.tsv",
          "out.wav", "tokens.txt"}) {
      if (!same_bytes(a + "/" + rel, b + "/" + rel)) {
        ok = false;
        why = std::string("byte mismatch in ") + rel;
        break;
      }
    }
  }
  const double elapsed = now_seconds() - t0;
  report(11, "seeded CLI commands are byte-deterministic", ok,
         why + format(", %.0f s", elapsed));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%s (%d failing)\n", g_failures == 0 ? "ALL OK" : "FAILURES",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
