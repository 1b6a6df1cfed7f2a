// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "core/degrade.hpp"
#include "core/enhance.hpp"
#include "test_util.hpp"

using namespace paragse;
using doctest::Approx;

namespace {

// Small codec (W=8, R=4, T=32) so enhancement tests stay fast.
enhance::ExtractorConfig micro_extractor() {
  enhance::ExtractorConfig cfg;
  cfg.frame_length = 32;
  cfg.frame_shift = 8;
  cfg.fft_size = 32;
  cfg.stack_frames = 4;
  return cfg;
}

codec::CodecModel micro_codec(uint64_t seed, size_t latent_dim = 16,
                              size_t groups = 4, size_t m = 16) {
  std::vector<AudioBuffer> corpus;
  for (int i = 0; i < 3; ++i) {
    corpus.push_back(degrade::synth_speech(4.0, 16000, seed + i));
  }
  codec::CodecModel model;
  model.linear = codec::fit_linear_codec(corpus, latent_dim, 8, 4, 16000);

  Matrix latents(0, latent_dim);
  for (const auto& a : corpus) {
    Matrix l = codec::encode(a, model.linear);
    size_t old = latents.rows;
    latents.rows += l.rows;
    latents.data.resize(latents.rows * latent_dim);
    std::copy(l.data.begin(), l.data.end(),
              latents.data.begin() + old * latent_dim);
  }
  codec::CodebookTrainConfig cfg;
  cfg.codebook_size = m;
  cfg.iterations = 12;
  cfg.seed = seed;
  model.gvq = codec::train_codebooks_gvq(latents, groups, cfg);
  model.rvq = codec::train_codebooks_rvq(latents, groups, cfg);
  return model;
}

struct ParamRef {
  double* data;
  size_t size;
  const char* name;
};

std::vector<ParamRef> all_params(enhance::EnhancerModel& m) {
  std::vector<ParamRef> refs;
  refs.push_back({m.extractor.proj.data.data(), m.extractor.proj.data.size(),
                  "proj"});
  refs.push_back({m.extractor.bias.data(), m.extractor.bias.size(), "bias"});
  for (auto& b : m.branches) {
    refs.push_back({b.embedding.data.data(), b.embedding.data.size(), "emb"});
    refs.push_back({b.w1.data.data(), b.w1.data.size(), "w1"});
    refs.push_back({b.b1.data(), b.b1.size(), "b1"});
    refs.push_back({b.w2.data.data(), b.w2.data.size(), "w2"});
    refs.push_back({b.b2.data(), b.b2.size(), "b2"});
  }
  return refs;
}

std::vector<ParamRef> all_grads(enhance::Gradients& g) {
  std::vector<ParamRef> refs;
  refs.push_back({g.proj.data.data(), g.proj.data.size(), "proj"});
  refs.push_back({g.bias.data(), g.bias.size(), "bias"});
  for (auto& b : g.branches) {
    refs.push_back({b.embedding.data.data(), b.embedding.data.size(), "emb"});
    refs.push_back({b.w1.data.data(), b.w1.data.size(), "w1"});
    refs.push_back({b.b1.data(), b.b1.size(), "b1"});
    refs.push_back({b.w2.data.data(), b.w2.data.size(), "w2"});
    refs.push_back({b.b2.data(), b.b2.size(), "b2"});
  }
  return refs;
}

// Central-difference check of every trainable parameter.
void run_gradient_check(bool serial, bool context = false) {
  enhance::ExtractorConfig cfg;
  cfg.frame_length = 8;
  cfg.frame_shift = 4;
  cfg.fft_size = 8;
  cfg.stack_frames = 2;  // stacked_dim = 2 * 2 * 5 = 20

  const size_t groups = serial ? 3 : 2;
  const size_t vocab = 16, c = 8, hidden = 16, frames = 5;
  auto model = enhance::init_enhancer(groups, vocab, c, hidden, serial, cfg,
                                      42, context);

  Rng rng(43);
  Matrix stacked(frames, cfg.stacked_dim());
  for (auto& v : stacked.data) v = rng.uniform(-2.0, 2.0);
  codec::TokenSequence deg, tgt;
  deg.frames = tgt.frames = frames;
  deg.groups = tgt.groups = groups;
  deg.codebook_size = tgt.codebook_size = static_cast<uint32_t>(vocab);
  for (size_t i = 0; i < frames * groups; ++i) {
    deg.tokens.push_back(static_cast<uint32_t>(1 + rng.index(vocab)));
    tgt.tokens.push_back(static_cast<uint32_t>(1 + rng.index(vocab)));
  }
  std::vector<size_t> idx(frames);
  std::iota(idx.begin(), idx.end(), 0);

  auto loss_fn = [&]() {
    return enhance::enhancer_backprop(model, stacked, deg, tgt, idx, nullptr);
  };

  enhance::Gradients grads = enhance::Gradients::zeros_like(model);
  enhance::enhancer_backprop(model, stacked, deg, tgt, idx, &grads);

  auto params = all_params(model);
  auto grad_refs = all_grads(grads);
  const double h = 1e-5;
  double worst = 0.0;
  for (size_t p = 0; p < params.size(); ++p) {
    for (size_t i = 0; i < params[p].size; ++i) {
      double saved = params[p].data[i];
      params[p].data[i] = saved + h;
      double up = loss_fn();
      params[p].data[i] = saved - h;
      double down = loss_fn();
      params[p].data[i] = saved;
      double numeric = (up - down) / (2.0 * h);
      double analytic = grad_refs[p].data[i];
      double rel = std::fabs(analytic - numeric) /
                   std::max(std::fabs(analytic) + std::fabs(numeric), 1e-4);
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-4);
}

}  // namespace

TEST_CASE("analytic gradients match central differences (parallel)") {
  run_gradient_check(false);
}

TEST_CASE("analytic gradients match central differences (serial)") {
  run_gradient_check(true);
}

TEST_CASE("analytic gradients match central differences (with context)") {
  run_gradient_check(false, true);
  run_gradient_check(true, true);
}

TEST_CASE("context models consume neighbor features with zero edges") {
  auto model = micro_codec(460);
  std::vector<AudioBuffer> clean{degrade::synth_speech(1.5, 16000, 461)};
  auto enh = enhance::init_enhancer(4, 16, 12, 24, false, micro_extractor(), 6,
                                    /*context=*/true);
  CHECK(enh.branches[0].input_dim() == 4 * 12);

  enhance::TrainConfig tc;
  tc.learning_rate = 0.05;
  tc.epochs = 8;
  tc.seed = 7;
  auto report = enhance::train_enhancer(enh, model, clean, clean, tc);
  CHECK(report.loss.back() < report.loss.front());

  auto probe = degrade::synth_speech(1.0, 16000, 462);
  auto t1 = enhance::predict_clean_tokens(enh, model, probe, 1);
  auto t4 = enhance::predict_clean_tokens(enh, model, probe, 4);
  CHECK(t1.tokens == t4.tokens);

  // Round-trips through the container with the context flag intact.
  std::ostringstream os(std::ios::binary);
  enhance::save_enhancer(enh, os);
  std::istringstream is(os.str());
  auto loaded = enhance::load_enhancer(is);
  CHECK(loaded.context);
  auto t_loaded = enhance::predict_clean_tokens(loaded, model, probe, 2);
  CHECK(t_loaded.tokens == t1.tokens);
}

TEST_CASE("branch with zero classifier weights outputs the uniform law") {
  auto cfg = micro_extractor();
  auto model = enhance::init_enhancer(2, 32, 8, 8, false, cfg, 7);
  auto& b = model.branches[0];
  std::fill(b.w1.data.begin(), b.w1.data.end(), 0.0);
  std::fill(b.b1.begin(), b.b1.end(), 0.0);
  std::fill(b.w2.data.begin(), b.w2.data.end(), 0.0);
  std::fill(b.b2.begin(), b.b2.end(), 0.0);
  Vector feat(8, 0.3);
  Vector p = enhance::branch_forward(b, 5, feat.data(), nullptr);
  for (double v : p) CHECK(v == Approx(1.0 / 32.0).epsilon(1e-12));
}

TEST_CASE("branch distributions are normalized and shift-invariant") {
  auto cfg = micro_extractor();
  auto model = enhance::init_enhancer(1, 24, 8, 12, false, cfg, 8);
  Rng rng(9);
  Vector feat(8);
  for (int trial = 0; trial < 50; ++trial) {
    for (auto& v : feat) v = rng.normal();
    uint32_t tok = static_cast<uint32_t>(1 + rng.index(24));
    Vector logits =
        enhance::branch_logits(model.branches[0], tok, feat.data(), nullptr);
    Vector p = enhance::softmax(logits);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);

    Vector shifted = logits;
    double cshift = rng.uniform(-50.0, 50.0);
    for (auto& v : shifted) v += cshift;
    Vector p2 = enhance::softmax(shifted);
    for (size_t k = 0; k < p.size(); ++k) {
      CHECK(std::fabs(p[k] - p2[k]) < 1e-12);
    }
    CHECK(enhance::sample_token(p) == enhance::sample_token(p2));
  }

  CHECK_THROWS_AS(
      enhance::branch_forward(model.branches[0], 0, feat.data(), nullptr),
      InvalidInputError);
  CHECK_THROWS_AS(
      enhance::branch_forward(model.branches[0], 25, feat.data(), nullptr),
      InvalidInputError);
}

TEST_CASE("sample_token picks the argmax with lowest-index ties") {
  Vector onehot(64, 0.0);
  onehot[41] = 1.0;
  CHECK(enhance::sample_token(onehot) == 42);

  Vector uniform(10, 0.1);
  CHECK(enhance::sample_token(uniform) == 1);

  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    Vector p(17);
    for (auto& v : p) v = rng.uniform();
    size_t best = 0;
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] > p[best]) best = i;
    }
    CHECK(enhance::sample_token(p) == best + 1);
  }

  Vector bad{0.1, std::nan(""), 0.2};
  CHECK_THROWS_AS(enhance::sample_token(bad), InvalidInputError);
}

TEST_CASE("feature frames align with token frames for every length") {
  auto cfg = micro_extractor();  // samples_per_feature = 32
  auto model = micro_codec(300);
  for (size_t len : {32ul, 33ul, 100ul, 320ul, 1000ul, 16000ul, 16013ul}) {
    auto a = testutil::noise(16000, 1.0, 301 + len, 0.4);
    a.samples.resize(std::max(len, 32ul));
    auto stacked = enhance::stack_stft_features(a, cfg);
    auto tokens = codec::tokenize(a, model);
    CHECK(stacked.rows == tokens.frames);
  }
}

TEST_CASE("one second of audio yields 50 feature frames at the full-scale configuration") {
  enhance::ExtractorConfig cfg;  // defaults: 320/40/1024, R=8
  auto a = testutil::noise(16000, 1.0, 77, 0.5);
  auto stacked = enhance::stack_stft_features(a, cfg);
  CHECK(stacked.rows == 50);
  CHECK(stacked.cols == 8 * 2 * 513);
}

TEST_CASE("blockwise feature extraction matches the two-step path exactly") {
  auto cfg = micro_extractor();
  auto model = enhance::init_enhancer(2, 16, 12, 16, false, cfg, 44);
  for (double seconds : {0.25, 1.0, 1.003}) {
    auto a = degrade::synth_speech(seconds, 16000, 45);
    auto fused = enhance::extract_features(a, model.extractor);
    auto two_step = enhance::extract_features_from_stacked(
        model.extractor, enhance::stack_stft_features(a, cfg));
    REQUIRE(fused.rows == two_step.rows);
    for (size_t i = 0; i < fused.data.size(); ++i) {
      CHECK(fused.data[i] == two_step.data[i]);
    }
  }
}

TEST_CASE("zero audio maps to tanh(bias) features") {
  auto cfg = micro_extractor();
  auto model = enhance::init_enhancer(1, 8, 6, 8, false, cfg, 11);
  for (size_t i = 0; i < model.extractor.bias.size(); ++i) {
    model.extractor.bias[i] = 0.1 * static_cast<double>(i + 1);
  }
  AudioBuffer zero;
  zero.samples.assign(320, 0.0);
  auto feats = enhance::extract_features(zero, model.extractor);
  for (size_t f = 0; f < feats.rows; ++f) {
    for (size_t c = 0; c < feats.cols; ++c) {
      CHECK(feats.at(f, c) ==
            Approx(std::tanh(model.extractor.bias[c])).epsilon(1e-12));
    }
  }
}

TEST_CASE("interior feature frames are shift-consistent under concatenation") {
  auto cfg = micro_extractor();
  auto a = testutil::noise(16000, 1.0, 12, 0.5);
  a.samples.resize(640);
  auto b = testutil::noise(16000, 1.0, 13, 0.5);
  b.samples.resize(640);
  AudioBuffer both;
  both.sample_rate = 16000;
  both.samples = a.samples;
  both.samples.insert(both.samples.end(), b.samples.begin(), b.samples.end());

  auto sa = enhance::stack_stft_features(a, cfg);
  auto sb = enhance::stack_stft_features(b, cfg);
  auto sc = enhance::stack_stft_features(both, cfg);
  REQUIRE(sa.rows == 20);
  REQUIRE(sc.rows == 40);
  for (size_t t = 1; t <= 18; ++t) {
    for (size_t k = 0; k < sa.cols; ++k) {
      CHECK(sa.at(t, k) == sc.at(t, k));
      CHECK(sb.at(t, k) == sc.at(t + 20, k));
    }
  }
}

TEST_CASE("training on an identity corpus reaches high token accuracy") {
  auto model = micro_codec(400);
  std::vector<AudioBuffer> clean;
  for (int i = 0; i < 3; ++i) {
    clean.push_back(degrade::synth_speech(2.0, 16000, 401 + i));
  }

  auto enh = enhance::init_enhancer(4, 16, 16, 32, false, micro_extractor(), 5);
  enhance::TrainConfig tc;
  tc.learning_rate = 0.05;
  tc.epochs = 60;
  tc.batch = 32;
  tc.seed = 6;

  uint64_t codec_sum_before = codec::codec_checksum(model);
  auto report = enhance::train_enhancer(enh, model, clean, clean, tc);
  CHECK(codec::codec_checksum(model) == codec_sum_before);  // frozen codec

  REQUIRE(report.loss.size() == 60);
  for (double l : report.loss) CHECK(std::isfinite(l));
  CHECK(report.loss.back() < report.loss.front());
  REQUIRE(report.final_accuracy.size() == 4);
  for (double acc : report.final_accuracy) CHECK(acc >= 0.99);

  // An identity-trained model reproduces the codec tokens of clean audio.
  auto probe = degrade::synth_speech(1.5, 16000, 500);
  auto predicted = enhance::predict_clean_tokens(enh, model, probe, 1);
  auto reference = codec::tokenize(probe, model);
  size_t hits = 0;
  for (size_t i = 0; i < predicted.tokens.size(); ++i) {
    hits += predicted.tokens[i] == reference.tokens[i];
  }
  CHECK(static_cast<double>(hits) >=
        0.98 * static_cast<double>(predicted.tokens.size()));

  // Output tokens are identical for every worker count.
  for (int workers : {2, 4, 7}) {
    auto again = enhance::predict_clean_tokens(enh, model, probe, workers);
    CHECK(again.tokens == predicted.tokens);
  }

  // Enhanced output preserves the input length.
  AudioBuffer odd = probe;
  odd.samples.resize(16013);
  auto out = enhance::enhance(enh, model, odd, 2);
  CHECK(out.samples.size() == odd.samples.size());
  for (double v : out.samples) CHECK(std::isfinite(v));

  // Serialization round-trip is byte-stable and preserves behavior.
  std::ostringstream os1(std::ios::binary);
  enhance::save_enhancer(enh, os1);
  std::istringstream is(os1.str());
  auto loaded = enhance::load_enhancer(is);
  std::ostringstream os2(std::ios::binary);
  enhance::save_enhancer(loaded, os2);
  CHECK(os1.str() == os2.str());
  auto again = enhance::predict_clean_tokens(loaded, model, probe, 1);
  CHECK(again.tokens == predicted.tokens);
}

TEST_CASE("training loss decreases monotonically while overfitting one pair") {
  auto model = micro_codec(410);
  std::vector<AudioBuffer> pair{degrade::synth_speech(1.5, 16000, 411)};

  auto enh = enhance::init_enhancer(4, 16, 12, 24, false, micro_extractor(), 3);
  enhance::TrainConfig tc;
  tc.learning_rate = 0.01;  // library default
  tc.epochs = 10;
  tc.batch = 1u << 20;  // full batch: plain gradient descent
  tc.seed = 4;
  auto report = enhance::train_enhancer(enh, model, pair, pair, tc);
  REQUIRE(report.loss.size() == 10);
  for (size_t e = 1; e < report.loss.size(); ++e) {
    CHECK(report.loss[e] <= report.loss[e - 1]);
  }
}

TEST_CASE("training rejects an empty corpus and reports divergence") {
  auto model = micro_codec(420);
  auto enh = enhance::init_enhancer(4, 16, 12, 24, false, micro_extractor(), 3);
  std::vector<AudioBuffer> empty;
  enhance::TrainConfig tc;
  CHECK_THROWS_AS(enhance::train_enhancer(enh, model, empty, empty, tc),
                  InsufficientDataError);

  // Saturating activations keep huge learning rates finite, so provoke
  // the guard directly: a model that is already non-finite must be
  // reported with the epoch index.
  std::vector<AudioBuffer> pair{degrade::synth_speech(1.0, 16000, 421)};
  enh.branches[0].w2.data[0] = std::nan("");
  tc.epochs = 5;
  try {
    enhance::train_enhancer(enh, model, pair, pair, tc);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("epoch 0") != std::string::npos);
  }
}

TEST_CASE("total loss equals the sum of per-branch cross-entropies") {
  auto cfg = micro_extractor();
  auto model = enhance::init_enhancer(4, 16, 8, 16, false, cfg, 31);
  Rng rng(32);
  Matrix stacked(6, cfg.stacked_dim());
  for (auto& v : stacked.data) v = rng.uniform(-1.0, 1.0);
  codec::TokenSequence deg, tgt;
  deg.frames = tgt.frames = 6;
  deg.groups = tgt.groups = 4;
  deg.codebook_size = tgt.codebook_size = 16;
  for (size_t i = 0; i < 24; ++i) {
    deg.tokens.push_back(static_cast<uint32_t>(1 + rng.index(16)));
    tgt.tokens.push_back(static_cast<uint32_t>(1 + rng.index(16)));
  }
  std::vector<size_t> idx(6);
  std::iota(idx.begin(), idx.end(), 0);
  double total =
      enhance::enhancer_backprop(model, stacked, deg, tgt, idx, nullptr);

  auto features = enhance::extract_features_from_stacked(model.extractor, stacked);
  double manual = 0.0;
  for (size_t f = 0; f < 6; ++f) {
    for (size_t n = 0; n < 4; ++n) {
      Vector p = enhance::branch_forward(model.branches[n], deg.at(f, n),
                                         features.row(f), nullptr);
      manual += -std::log(p[tgt.at(f, n) - 1]);
    }
  }
  CHECK(std::fabs(total - manual) < 1e-12 * std::max(1.0, std::fabs(manual)));
}

TEST_CASE("serial variant with one branch matches the parallel model") {
  auto model = micro_codec(430, 16, 1, 16);  // N = 1
  // Make the single RVQ stage identical to the GVQ codebook so both
  // pipelines see the same degraded tokens.
  model.rvq->codebooks[0] = model.gvq.codebooks[0];

  auto par = enhance::init_enhancer(1, 16, 12, 24, false, micro_extractor(), 9);
  auto ser = enhance::make_serial_variant(par);
  CHECK(ser.serial);
  CHECK(ser.branches[0].input_dim() == 3 * par.branches[0].feature_dim());

  auto probe = degrade::synth_speech(1.0, 16000, 431);
  auto p_tokens = enhance::predict_clean_tokens(par, model, probe, 2);
  auto s_tokens = enhance::predict_clean_tokens(ser, model, probe, 1);
  CHECK(p_tokens.tokens == s_tokens.tokens);
}

TEST_CASE("serial stage two depends on the stage-one prediction") {
  auto cfg = micro_extractor();
  auto model = enhance::init_enhancer(3, 16, 8, 16, true, cfg, 21);
  Rng rng(22);
  Vector feat(8);
  for (auto& v : feat) v = rng.normal();

  // Stage 2 input with stage-1 prediction = 3 vs forced = 7.
  Vector pooled_a(8), pooled_b(8);
  for (size_t k = 0; k < 8; ++k) {
    pooled_a[k] = model.branches[0].embedding.at(2, k);
    pooled_b[k] = model.branches[0].embedding.at(6, k);
  }
  Vector za =
      enhance::branch_logits(model.branches[1], 4, feat.data(), pooled_a.data());
  Vector zb =
      enhance::branch_logits(model.branches[1], 4, feat.data(), pooled_b.data());
  double diff = 0.0;
  for (size_t k = 0; k < za.size(); ++k) diff += std::fabs(za[k] - zb[k]);
  CHECK(diff > 1e-6);
}

TEST_CASE("serial training on an identity corpus learns the task") {
  auto model = micro_codec(440);
  std::vector<AudioBuffer> clean;
  for (int i = 0; i < 2; ++i) {
    clean.push_back(degrade::synth_speech(2.0, 16000, 441 + i));
  }
  auto enh = enhance::init_enhancer(4, 16, 16, 32, true, micro_extractor(), 19);
  enhance::TrainConfig tc;
  tc.learning_rate = 0.05;
  tc.epochs = 60;
  tc.batch = 32;
  tc.seed = 20;
  auto report = enhance::train_enhancer(enh, model, clean, clean, tc);
  for (double acc : report.final_accuracy) CHECK(acc >= 0.98);

  auto probe = clean[0];
  auto predicted = enhance::predict_clean_tokens(enh, model, probe, 1);
  auto reference = codec::tokenize(probe, model, true);
  size_t hits = 0;
  for (size_t i = 0; i < predicted.tokens.size(); ++i) {
    hits += predicted.tokens[i] == reference.tokens[i];
  }
  CHECK(static_cast<double>(hits) >=
        0.95 * static_cast<double>(predicted.tokens.size()));
}

TEST_CASE("an enhancer blob appended to a codec container loads") {
  auto model = micro_codec(470);
  auto enh = enhance::init_enhancer(4, 16, 8, 12, false, micro_extractor(), 3);

  std::ostringstream os(std::ios::binary);
  codec::save_codec(model, os);
  enhance::save_enhancer(enh, os);
  const std::string combined = os.str();

  std::istringstream codec_stream(combined);
  auto codec_back = codec::load_codec(codec_stream);
  CHECK(codec::codec_checksum(codec_back) == codec::codec_checksum(model));

  std::istringstream enhancer_stream(combined);
  auto enh_back = enhance::load_enhancer(enhancer_stream);
  CHECK(enhance::enhancer_checksum(enh_back) == enhance::enhancer_checksum(enh));
}

TEST_CASE("model and codec shape mismatches are configuration errors") {
  auto model = micro_codec(450);
  auto enh = enhance::init_enhancer(3, 16, 12, 24, false, micro_extractor(), 2);
  auto probe = degrade::synth_speech(1.0, 16000, 451);
  CHECK_THROWS_AS(enhance::predict_clean_tokens(enh, model, probe, 1),
                  ConfigError);  // 3 branches vs 4 groups

  auto enh2 = enhance::init_enhancer(4, 32, 12, 24, false, micro_extractor(), 2);
  CHECK_THROWS_AS(enhance::predict_clean_tokens(enh2, model, probe, 1),
                  ConfigError);  // vocab 32 vs M=16

  enhance::ExtractorConfig bad = micro_extractor();
  bad.stack_frames = 2;  // w_s * R != T
  auto enh3 = enhance::init_enhancer(4, 16, 12, 24, false, bad, 2);
  CHECK_THROWS_AS(enhance::predict_clean_tokens(enh3, model, probe, 1),
                  ConfigError);
}
