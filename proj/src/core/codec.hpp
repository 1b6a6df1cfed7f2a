// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/audio.hpp"
#include "core/dsp.hpp"
#include "core/linalg.hpp"

namespace paragse::codec {

// Table of M codevectors of a fixed dimension; nearest-neighbor lookup
// defines quantization. Tokens are 1-based everywhere in the public
// surface and in serialized form.
struct Codebook {
  Matrix entries;  // M x dim

  size_t size() const { return entries.rows; }
  size_t dim() const { return entries.cols; }
};

// N independent codebooks, one per contiguous block of K/N latent
// dimensions.
struct GvqQuantizer {
  std::vector<Codebook> codebooks;

  size_t groups() const { return codebooks.size(); }
  size_t group_dim() const { return codebooks.empty() ? 0 : codebooks[0].dim(); }
  size_t latent_dim() const { return groups() * group_dim(); }
  size_t codebook_size() const {
    return codebooks.empty() ? 0 : codebooks[0].size();
  }
  void validate() const;
};

// Serial residual quantizer: every stage codebook lives in the full
// K-dimensional latent space and quantizes what the previous stages left.
struct RvqQuantizer {
  std::vector<Codebook> codebooks;

  size_t stages() const { return codebooks.size(); }
  size_t latent_dim() const { return codebooks.empty() ? 0 : codebooks[0].dim(); }
  size_t codebook_size() const {
    return codebooks.empty() ? 0 : codebooks[0].size();
  }
  void validate() const;
};

// Per-frame tuples of 1-based token indices, frames x groups.
struct TokenSequence {
  size_t frames = 0;
  size_t groups = 0;
  uint32_t codebook_size = 0;  // M, recorded for range validation
  std::vector<uint32_t> tokens;  // row-major, frames x groups

  uint32_t at(size_t frame, size_t group) const {
    return tokens[frame * groups + group];
  }
  uint32_t& at(size_t frame, size_t group) {
    return tokens[frame * groups + group];
  }
};

// Linear analysis/synthesis pair standing in for a learned codec
// front-end: `analysis` projects one token frame's stacked MDCT
// coefficients (frames_per_token consecutive MDCT frames, stack_dim = T
// values) onto a K-dimensional latent; `synthesis` is its transpose.
struct LinearCodecModel {
  Matrix analysis;   // K x T
  Matrix synthesis;  // T x K
  int mdct_half_window = 40;  // W
  int frames_per_token = 8;   // MDCT frames stacked per token frame
  int sample_rate = 16000;

  size_t latent_dim() const { return analysis.rows; }
  size_t stack_dim() const { return analysis.cols; }
  int samples_per_token() const { return mdct_half_window * frames_per_token; }
};

// Everything one model file holds: the linear front-end, the grouped
// quantizer, and (optionally) a residual quantizer for the serial
// baseline.
struct CodecModel {
  LinearCodecModel linear;
  GvqQuantizer gvq;
  std::optional<RvqQuantizer> rvq;

  size_t groups() const { return gvq.groups(); }
  size_t codebook_size() const { return gvq.codebook_size(); }
  size_t latent_dim() const { return linear.latent_dim(); }
};

struct VqResult {
  uint32_t token = 0;  // 1-based
  Vector quantized;
};

struct GroupedVqResult {
  std::vector<uint32_t> tokens;  // 1-based, one per group/stage
  Vector quantized;              // full K-dimensional reconstruction
};

// Nearest codevector by Euclidean distance; ties resolve to the lowest
// index.
VqResult vq_quantize(const double* v, size_t dim, const Codebook& codebook);

GroupedVqResult gvq_quantize(const Vector& e, const GvqQuantizer& q);
Vector gvq_dequantize(const std::vector<uint32_t>& tokens,
                      const GvqQuantizer& q);

GroupedVqResult rvq_quantize(const Vector& e, const RvqQuantizer& q);
Vector rvq_dequantize(const std::vector<uint32_t>& tokens,
                      const RvqQuantizer& q);

// Sum over groups of the batch-mean squared Euclidean error between
// quantizer inputs and outputs. One matrix per group, rows are batch
// elements.
double gvq_loss(const std::vector<Matrix>& inputs,
                const std::vector<Matrix>& outputs);

// One latent row per samples_per_token() input samples (the tail token
// frame is completed with zero MDCT frames when the audio length is not
// a multiple).
Matrix encode(const AudioBuffer& audio, const LinearCodecModel& model);

// Synthesis projection followed by inverse MDCT overlap-add; returns
// frames * samples_per_token() samples.
AudioBuffer decode(const Matrix& latents, const LinearCodecModel& model);

// Fits the analysis/synthesis pair as the top-K principal directions of
// the corpus's stacked MDCT frames (uncentered covariance, so the map
// stays linear). Requires >= 10 s of audio in total.
LinearCodecModel fit_linear_codec(std::span<const AudioBuffer> corpus,
                                  size_t latent_dim, int mdct_half_window,
                                  int frames_per_token, int sample_rate);

struct CodebookTrainConfig {
  size_t codebook_size = 256;  // M
  size_t iterations = 50;
  uint64_t seed = 1;
  double ema_decay = 0.99;
  int dead_reseed_after = 3;  // empty iterations before an entry is reseeded
};

struct CodebookTrainTrace {
  // Mean squared quantization error measured at the start of each
  // iteration (before that iteration's update).
  std::vector<double> mse_per_iteration;
  double final_mse = 0.0;
};

// k-means++ initialization plus EMA centroid updates, per group. The
// training MSE sequence is non-increasing; dead entries are reseeded to
// the worst-quantized vectors. Deterministic under the config seed.
GvqQuantizer train_codebooks_gvq(const Matrix& latents, size_t groups,
                                 const CodebookTrainConfig& config,
                                 std::vector<CodebookTrainTrace>* traces = nullptr);

// Stage-wise residual variant used by the serial baseline.
RvqQuantizer train_codebooks_rvq(const Matrix& latents, size_t stages,
                                 const CodebookTrainConfig& config,
                                 std::vector<CodebookTrainTrace>* traces = nullptr);

// Mean squared quantization error of a latent batch under a quantizer.
double gvq_mse(const Matrix& latents, const GvqQuantizer& q);
double rvq_mse(const Matrix& latents, const RvqQuantizer& q);

TokenSequence tokenize(const AudioBuffer& audio, const CodecModel& model,
                       bool use_rvq = false);
AudioBuffer detokenize(const TokenSequence& tokens, const CodecModel& model,
                       bool use_rvq = false);

// "GVQC" little-endian container. Layout: magic, version, N, M, K, W, T,
// analysis (K x T), synthesis (T x K), GVQ codebooks in group order,
// RVQ stage count (0 when absent) and stage codebooks.
void save_codec(const CodecModel& model, std::ostream& os);
CodecModel load_codec(std::istream& is);
void save_codec_file(const CodecModel& model, const std::string& path);
CodecModel load_codec_file(const std::string& path);
uint64_t codec_checksum(const CodecModel& model);

// Token stream text form: one frame per line, N space-separated 1-based
// indices.
std::string tokens_to_text(const TokenSequence& tokens);
TokenSequence tokens_from_text(const std::string& text, uint32_t codebook_size);

}  // namespace paragse::codec
