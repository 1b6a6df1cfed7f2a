// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/audio.hpp"
#include "core/codec.hpp"
#include "core/linalg.hpp"

namespace paragse::enhance {

// STFT analysis and stacking geometry of the feature extractor. One
// feature frame covers frame_shift * stack_frames input samples, matching
// the codec's token framing.
struct ExtractorConfig {
  int frame_length = 320;
  int frame_shift = 40;
  int fft_size = 1024;
  int stack_frames = 8;  // STFT frames per feature frame (R)

  size_t bins() const { return static_cast<size_t>(fft_size) / 2 + 1; }
  size_t stacked_dim() const {
    return static_cast<size_t>(stack_frames) * 2 * bins();
  }
  int samples_per_feature() const { return frame_shift * stack_frames; }
};

// Learned linear projection + tanh over stacked amplitude/phase frames.
struct SpectralFeatureExtractor {
  ExtractorConfig cfg;
  Matrix proj;  // C x stacked_dim
  Vector bias;  // C

  size_t feature_dim() const { return proj.rows; }
};

// Raw conditioning input: amplitude then phase of each of the R frames in
// a feature window, one row per feature frame. Missing tail STFT frames
// are zero (amplitude zero, phase zero convention), which keeps the
// feature frame count equal to the codec token frame count for every
// input length.
Matrix stack_stft_features(const AudioBuffer& audio,
                           const ExtractorConfig& cfg);

Matrix extract_features_from_stacked(const SpectralFeatureExtractor& ex,
                                     const Matrix& stacked);

// One feature vector per samples_per_feature() input samples.
Matrix extract_features(const AudioBuffer& audio,
                        const SpectralFeatureExtractor& ex);

// Per-group clean-token classifier: embedding lookup of the degraded
// token, concatenation with the spectral feature (and, for the serial
// variant, the mean-pooled embeddings of preceding predicted tokens; and,
// with temporal context enabled, the neighboring feature frames), then
// one tanh hidden layer and a softmax output over the M tokens.
struct PredictionBranch {
  Matrix embedding;  // M x C
  Matrix w1;         // H x input_dim
  Vector b1;         // H
  Matrix w2;         // M x H
  Vector b2;         // M

  size_t vocab() const { return embedding.rows; }
  size_t feature_dim() const { return embedding.cols; }
  size_t hidden_dim() const { return w1.rows; }
  size_t input_dim() const { return w1.cols; }
};

Vector softmax(Vector logits);

// Index of the maximum entry, 1-based; ties resolve to the lowest index.
uint32_t sample_token(const Vector& distribution);

// pooled may be null for parallel branches; for serial branches it must
// point at feature_dim() values. `feature` points at the branch's whole
// feature block: C values normally, 3C (previous, current, next frame)
// when the model uses temporal context.
Vector branch_logits(const PredictionBranch& branch, uint32_t token,
                     const double* feature, const double* pooled);
Vector branch_forward(const PredictionBranch& branch, uint32_t token,
                      const double* feature, const double* pooled);

struct EnhancerModel {
  SpectralFeatureExtractor extractor;
  std::vector<PredictionBranch> branches;
  bool serial = false;
  // Feed each branch the previous/current/next feature frames instead of
  // the current frame only; missing neighbors at the edges are zero.
  bool context = false;

  size_t groups() const { return branches.size(); }
  size_t vocab() const { return branches.empty() ? 0 : branches[0].vocab(); }
  size_t feature_dim() const { return extractor.feature_dim(); }
  size_t hidden_dim() const {
    return branches.empty() ? 0 : branches[0].hidden_dim();
  }
  size_t feature_block() const { return (context ? 3 : 1) * feature_dim(); }
  size_t input_dim() const {
    return feature_dim() + (serial ? feature_dim() : 0) + feature_block();
  }
  void validate() const;
};

EnhancerModel init_enhancer(size_t groups, size_t vocab, size_t feature_dim,
                            size_t hidden_dim, bool serial,
                            const ExtractorConfig& cfg, uint64_t seed,
                            bool context = false);

// Parameter-shaped gradient accumulator.
struct Gradients {
  Matrix proj;
  Vector bias;
  struct Branch {
    Matrix embedding;
    Matrix w1;
    Vector b1;
    Matrix w2;
    Vector b2;
  };
  std::vector<Branch> branches;

  static Gradients zeros_like(const EnhancerModel& model);
  void clear();
};

// Total cross-entropy loss (sum over branches, summed over the listed
// frames) plus, when grads is non-null, accumulated analytic gradients.
// Serial models are teacher-forced: the pooled input uses the preceding
// *target* tokens. correct (optional, groups-sized) accumulates per-branch
// argmax hits for accuracy reporting.
double enhancer_backprop(const EnhancerModel& model, const Matrix& stacked,
                         const codec::TokenSequence& degraded,
                         const codec::TokenSequence& target,
                         std::span<const size_t> frames, Gradients* grads,
                         std::vector<size_t>* correct = nullptr);

struct TrainConfig {
  double learning_rate = 0.01;
  size_t epochs = 50;
  size_t batch = 32;
  uint64_t seed = 1;
};

struct TrainReport {
  std::vector<double> loss;  // one entry per epoch (mean over frames)
  Matrix branch_accuracy;    // epochs x groups, accuracy during the epoch
  Vector final_accuracy;     // per-branch accuracy of the trained model
  size_t epochs = 0;
  uint64_t seed = 0;
};

// Mini-batch SGD on the extractor and branches; the codec stays frozen
// (it is only read, never written). Throws DivergenceError with the
// epoch index if the loss stops being finite.
TrainReport train_enhancer(EnhancerModel& model, const codec::CodecModel& codec,
                           std::span<const AudioBuffer> degraded,
                           std::span<const AudioBuffer> clean,
                           const TrainConfig& config);

// Degraded audio -> predicted clean tokens. Parallel models fan frames
// out across `workers` threads; outputs are identical for every worker
// count. Serial models evaluate branches strictly in order per frame.
codec::TokenSequence predict_clean_tokens(const EnhancerModel& model,
                                          const codec::CodecModel& codec,
                                          const AudioBuffer& degraded,
                                          int workers);

// Full pipeline: tokenize, extract features, predict clean tokens,
// dequantize, decode, trim to the input length.
AudioBuffer enhance(const EnhancerModel& model, const codec::CodecModel& codec,
                    const AudioBuffer& degraded, int workers);

// Serial-conditioning variant of a parallel model with identical
// embeddings and classifier weights; the extra pooled-input block of the
// hidden layer starts at zero, so with no preceding stages (N = 1) the
// two variants compute identical logits.
EnhancerModel make_serial_variant(const EnhancerModel& parallel);

// "PGSE" little-endian container. Layout: magic, version, C, H, N, M,
// serial flag, extractor geometry, projection/bias, then per-branch
// matrices in branch order.
void save_enhancer(const EnhancerModel& model, std::ostream& os);
EnhancerModel load_enhancer(std::istream& is);
void save_enhancer_file(const EnhancerModel& model, const std::string& path);
EnhancerModel load_enhancer_file(const std::string& path);
uint64_t enhancer_checksum(const EnhancerModel& model);

}  // namespace paragse::enhance
