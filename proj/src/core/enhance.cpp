// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "core/dsp.hpp"
#include "core/fft.hpp"
#include "core/rng.hpp"
#include "core/serialize.hpp"
#include "core/threadpool.hpp"

namespace paragse::enhance {

namespace {

void fill_normal(Rng& rng, double scale, std::vector<double>& out) {
  for (double& v : out) v = scale * rng.normal();
}

// log(sum(exp(z))) with max subtraction.
double log_sum_exp(const Vector& z) {
  double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

size_t feature_frame_count(const AudioBuffer& audio,
                           const ExtractorConfig& cfg) {
  const size_t t = static_cast<size_t>(cfg.samples_per_feature());
  return (audio.length() + t - 1) / t;
}

size_t stft_frame_count(const AudioBuffer& audio, const ExtractorConfig& cfg) {
  const size_t half = static_cast<size_t>(cfg.frame_length) / 2;
  return (audio.length() + 2 * half - cfg.frame_length) /
             static_cast<size_t>(cfg.frame_shift) +
         1;
}

// Fills `block` (rows x stacked_dim) with the amplitude/phase stacks for
// feature frames [first, first + rows). Equivalent to running the full
// STFT and copying R frames per row, but computed per block so long
// signals never materialize the whole spectrogram.
void fill_stacked_block(const AudioBuffer& audio, const ExtractorConfig& cfg,
                        const Vector& window, size_t first, size_t rows,
                        Matrix& block) {
  const size_t bins = cfg.bins();
  const size_t r = static_cast<size_t>(cfg.stack_frames);
  const size_t len = audio.length();
  const size_t half = static_cast<size_t>(cfg.frame_length) / 2;
  const size_t total_stft = stft_frame_count(audio, cfg);

  if (block.rows != rows || block.cols != cfg.stacked_dim()) {
    block = Matrix(rows, cfg.stacked_dim());
  } else {
    std::fill(block.data.begin(), block.data.end(), 0.0);
  }

  Vector frame(static_cast<size_t>(cfg.frame_length));
  for (size_t i = 0; i < rows; ++i) {
    double* row = block.row(i);
    for (size_t j = 0; j < r; ++j) {
      const size_t f = (first + i) * r + j;
      if (f >= total_stft) break;  // tail slots stay zero
      const long long start = static_cast<long long>(f) * cfg.frame_shift -
                              static_cast<long long>(half);
      for (int n = 0; n < cfg.frame_length; ++n) {
        long long t = start + n;
        if (t < 0) t = -t;
        long long last = static_cast<long long>(len) - 1;
        if (t > last) t = 2 * last - t;
        frame[n] = audio.samples[static_cast<size_t>(t)] * window[n];
      }
      auto spec = dsp::rfft(frame.data(), frame.size(),
                            static_cast<size_t>(cfg.fft_size));
      double* amp = row + j * 2 * bins;
      double* ph = amp + bins;
      for (size_t k = 0; k < bins; ++k) {
        amp[k] = std::abs(spec[k]);
        double p = std::atan2(spec[k].imag(), spec[k].real());
        if (p <= -kPi) p = kPi;
        ph[k] = p;
      }
    }
  }
}

void check_extractor_input(const AudioBuffer& audio,
                           const ExtractorConfig& cfg) {
  validate_audio(audio, "extract_features");
  if (audio.length() < static_cast<size_t>(cfg.frame_length)) {
    throw InvalidInputError("extract_features: audio shorter than one frame");
  }
  if (cfg.frame_shift < 1 || cfg.frame_shift > cfg.frame_length ||
      cfg.fft_size < cfg.frame_length || cfg.stack_frames < 1) {
    throw InvalidInputError("extract_features: bad analysis configuration");
  }
}

}  // namespace

Matrix stack_stft_features(const AudioBuffer& audio,
                           const ExtractorConfig& cfg) {
  check_extractor_input(audio, cfg);
  const Vector window = dsp::hann_periodic_window(cfg.frame_length);
  Matrix out;
  fill_stacked_block(audio, cfg, window, 0, feature_frame_count(audio, cfg),
                     out);
  return out;
}

Matrix extract_features_from_stacked(const SpectralFeatureExtractor& ex,
                                     const Matrix& stacked) {
  if (stacked.cols != ex.cfg.stacked_dim() || ex.proj.cols != stacked.cols) {
    throw InvalidInputError("extract_features: stacked dimension mismatch");
  }
  Matrix out;
  matmul_nt(stacked, ex.proj, out);
  for (size_t f = 0; f < stacked.rows; ++f) {
    double* row = out.row(f);
    for (size_t c = 0; c < ex.feature_dim(); ++c) {
      row[c] = std::tanh(row[c] + ex.bias[c]);
    }
  }
  return out;
}

Matrix extract_features(const AudioBuffer& audio,
                        const SpectralFeatureExtractor& ex) {
  check_extractor_input(audio, ex.cfg);
  if (ex.proj.cols != ex.cfg.stacked_dim()) {
    throw InvalidInputError("extract_features: projection dimension mismatch");
  }
  const size_t frames = feature_frame_count(audio, ex.cfg);
  const Vector window = dsp::hann_periodic_window(ex.cfg.frame_length);
  const size_t c = ex.feature_dim();

  // Blockwise: the stacked spectra of a block are consumed immediately by
  // the projection, so the full frames x stacked_dim matrix never exists.
  constexpr size_t kBlock = 64;
  Matrix out(frames, c);
  Matrix block, projected;
  for (size_t f0 = 0; f0 < frames; f0 += kBlock) {
    const size_t rows = std::min(kBlock, frames - f0);
    fill_stacked_block(audio, ex.cfg, window, f0, rows, block);
    matmul_nt(block, ex.proj, projected);
    for (size_t i = 0; i < rows; ++i) {
      double* dst = out.row(f0 + i);
      const double* src = projected.row(i);
      for (size_t j = 0; j < c; ++j) dst[j] = std::tanh(src[j] + ex.bias[j]);
    }
  }
  return out;
}

Vector softmax(Vector logits) {
  if (logits.empty()) throw InvalidInputError("softmax: empty input");
  for (double v : logits) {
    if (!std::isfinite(v)) throw InvalidInputError("softmax: non-finite logit");
  }
  double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (double& v : logits) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : logits) v /= s;
  return logits;
}

uint32_t sample_token(const Vector& distribution) {
  if (distribution.empty()) throw InvalidInputError("sample_token: empty");
  size_t best = 0;
  for (size_t i = 0; i < distribution.size(); ++i) {
    if (!std::isfinite(distribution[i])) {
      throw InvalidInputError("sample_token: non-finite entry");
    }
    if (distribution[i] > distribution[best]) best = i;
  }
  return static_cast<uint32_t>(best) + 1;
}

Vector branch_logits(const PredictionBranch& branch, uint32_t token,
                     const double* feature, const double* pooled) {
  const size_t c = branch.feature_dim();
  if (token < 1 || token > branch.vocab()) {
    throw InvalidInputError("branch: token " + std::to_string(token) +
                            " out of range [1, " +
                            std::to_string(branch.vocab()) + "]");
  }
  // Layout by width: [embedding | pooled? | feature block]; the feature
  // block is 3C wide for temporal-context models, C otherwise.
  const size_t ratio = branch.input_dim() / c;
  const bool has_pooled = ratio == 3 || ratio == 5;
  const size_t block = ratio >= 4 ? 3 * c : c;
  if (has_pooled && pooled == nullptr) {
    throw InvalidInputError("branch: serial branch requires pooled input");
  }

  Vector input(branch.input_dim());
  const double* v = branch.embedding.row(token - 1);
  std::copy(v, v + c, input.begin());
  if (has_pooled) std::copy(pooled, pooled + c, input.begin() + c);
  std::copy(feature, feature + block, input.end() - block);

  Vector act(branch.hidden_dim());
  matvec(branch.w1, input.data(), act.data());
  for (size_t h = 0; h < act.size(); ++h) act[h] = std::tanh(act[h] + branch.b1[h]);

  Vector logits(branch.vocab());
  matvec(branch.w2, act.data(), logits.data());
  for (size_t k = 0; k < logits.size(); ++k) logits[k] += branch.b2[k];
  return logits;
}

Vector branch_forward(const PredictionBranch& branch, uint32_t token,
                      const double* feature, const double* pooled) {
  return softmax(branch_logits(branch, token, feature, pooled));
}

void EnhancerModel::validate() const {
  if (branches.empty()) throw InvalidInputError("enhancer: no branches");
  const size_t c = feature_dim();
  const size_t expected_in = input_dim();
  for (const auto& b : branches) {
    if (b.vocab() != vocab() || b.feature_dim() != c ||
        b.hidden_dim() != hidden_dim() || b.input_dim() != expected_in) {
      throw InvalidInputError("enhancer: inconsistent branch shapes");
    }
  }
  if (extractor.bias.size() != c) {
    throw InvalidInputError("enhancer: extractor bias size mismatch");
  }
}

EnhancerModel init_enhancer(size_t groups, size_t vocab, size_t feature_dim,
                            size_t hidden_dim, bool serial,
                            const ExtractorConfig& cfg, uint64_t seed,
                            bool context) {
  if (groups < 1 || vocab < 1 || feature_dim < 1 || hidden_dim < 1) {
    throw InvalidInputError("init_enhancer: dimensions must be positive");
  }
  EnhancerModel model;
  model.serial = serial;
  model.context = context;
  model.extractor.cfg = cfg;
  model.extractor.proj = Matrix(feature_dim, cfg.stacked_dim());
  model.extractor.bias.assign(feature_dim, 0.0);
  {
    // Small projection init keeps tanh in its linear regime for raw
    // amplitude inputs.
    Rng rng(Rng::mix(seed, 0xfe));
    fill_normal(rng, 0.05 / std::sqrt(static_cast<double>(cfg.stacked_dim())),
                model.extractor.proj.data);
  }
  const size_t in_dim = model.input_dim();
  for (size_t n = 0; n < groups; ++n) {
    Rng rng(Rng::mix(seed, n + 1));
    PredictionBranch b;
    b.embedding = Matrix(vocab, feature_dim);
    fill_normal(rng, 1.0 / std::sqrt(static_cast<double>(feature_dim)),
                b.embedding.data);
    b.w1 = Matrix(hidden_dim, in_dim);
    fill_normal(rng, 1.0 / std::sqrt(static_cast<double>(in_dim)), b.w1.data);
    b.b1.assign(hidden_dim, 0.0);
    b.w2 = Matrix(vocab, hidden_dim);
    fill_normal(rng, 1.0 / std::sqrt(static_cast<double>(hidden_dim)),
                b.w2.data);
    b.b2.assign(vocab, 0.0);
    model.branches.push_back(std::move(b));
  }
  model.validate();
  return model;
}

Gradients Gradients::zeros_like(const EnhancerModel& model) {
  Gradients g;
  g.proj = Matrix(model.extractor.proj.rows, model.extractor.proj.cols);
  g.bias.assign(model.extractor.bias.size(), 0.0);
  for (const auto& b : model.branches) {
    Branch gb;
    gb.embedding = Matrix(b.embedding.rows, b.embedding.cols);
    gb.w1 = Matrix(b.w1.rows, b.w1.cols);
    gb.b1.assign(b.b1.size(), 0.0);
    gb.w2 = Matrix(b.w2.rows, b.w2.cols);
    gb.b2.assign(b.b2.size(), 0.0);
    g.branches.push_back(std::move(gb));
  }
  return g;
}

void Gradients::clear() {
  std::fill(proj.data.begin(), proj.data.end(), 0.0);
  std::fill(bias.begin(), bias.end(), 0.0);
  for (auto& b : branches) {
    std::fill(b.embedding.data.begin(), b.embedding.data.end(), 0.0);
    std::fill(b.w1.data.begin(), b.w1.data.end(), 0.0);
    std::fill(b.b1.begin(), b.b1.end(), 0.0);
    std::fill(b.w2.data.begin(), b.w2.data.end(), 0.0);
    std::fill(b.b2.begin(), b.b2.end(), 0.0);
  }
}

double enhancer_backprop(const EnhancerModel& model, const Matrix& stacked,
                         const codec::TokenSequence& degraded,
                         const codec::TokenSequence& target,
                         std::span<const size_t> frames, Gradients* grads,
                         std::vector<size_t>* correct) {
  const size_t n_groups = model.groups();
  const size_t c = model.feature_dim();
  const size_t block = model.feature_block();
  if (degraded.frames != stacked.rows || target.frames != stacked.rows ||
      degraded.groups != n_groups || target.groups != n_groups) {
    throw InvalidInputError("enhancer_backprop: shape mismatch");
  }

  // Offsets of the neighbor feature frames inside the block: the current
  // frame only, or previous/current/next with temporal context.
  std::vector<long long> offsets;
  if (model.context) {
    offsets = {-1, 0, 1};
  } else {
    offsets = {0};
  }

  auto forward_s = [&](size_t row, Vector& s_out) {
    matvec(model.extractor.proj, stacked.row(row), s_out.data());
    for (size_t j = 0; j < c; ++j) {
      s_out[j] = std::tanh(s_out[j] + model.extractor.bias[j]);
    }
  };

  double total_loss = 0.0;
  Vector pooled(c);
  std::vector<Vector> s(offsets.size(), Vector(c));
  std::vector<char> in_range(offsets.size(), 0);
  Vector feat(block), ds(block), dpre(c);
  for (size_t fi : frames) {
    for (size_t o = 0; o < offsets.size(); ++o) {
      const long long row = static_cast<long long>(fi) + offsets[o];
      in_range[o] =
          row >= 0 && row < static_cast<long long>(stacked.rows) ? 1 : 0;
      if (in_range[o]) {
        forward_s(static_cast<size_t>(row), s[o]);
      } else {
        std::fill(s[o].begin(), s[o].end(), 0.0);  // edge context is zero
      }
      std::copy(s[o].begin(), s[o].end(), feat.begin() + o * c);
    }
    std::fill(ds.begin(), ds.end(), 0.0);
    std::fill(pooled.begin(), pooled.end(), 0.0);

    for (size_t n = 0; n < n_groups; ++n) {
      const PredictionBranch& b = model.branches[n];
      const uint32_t tok = degraded.at(fi, n);
      const uint32_t tgt = target.at(fi, n);
      if (tgt < 1 || tgt > b.vocab()) {
        throw InvalidInputError("enhancer_backprop: target token out of range");
      }

      // Forward, keeping intermediates for the backward pass.
      Vector input(b.input_dim());
      const double* v = b.embedding.row(tok - 1);
      std::copy(v, v + c, input.begin());
      if (model.serial) std::copy(pooled.begin(), pooled.end(), input.begin() + c);
      std::copy(feat.begin(), feat.end(), input.end() - block);

      Vector hidden(b.hidden_dim());
      matvec(b.w1, input.data(), hidden.data());
      for (size_t h = 0; h < hidden.size(); ++h) {
        hidden[h] = std::tanh(hidden[h] + b.b1[h]);
      }
      Vector logits(b.vocab());
      matvec(b.w2, hidden.data(), logits.data());
      for (size_t k = 0; k < logits.size(); ++k) logits[k] += b.b2[k];

      const double lse = log_sum_exp(logits);
      total_loss += lse - logits[tgt - 1];

      if (correct) {
        size_t arg = static_cast<size_t>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());
        if (arg + 1 == tgt) (*correct)[n]++;
      }

      if (grads) {
        Gradients::Branch& gb = grads->branches[n];
        // dz = softmax(z) - onehot(target)
        Vector dz(logits.size());
        for (size_t k = 0; k < dz.size(); ++k) {
          dz[k] = std::exp(logits[k] - lse);
        }
        dz[tgt - 1] -= 1.0;

        rank1_update(gb.w2, 1.0, dz.data(), hidden.data());
        for (size_t k = 0; k < dz.size(); ++k) gb.b2[k] += dz[k];

        Vector dh(b.hidden_dim());
        matvec_transposed(b.w2, dz.data(), dh.data());
        for (size_t h = 0; h < dh.size(); ++h) {
          dh[h] *= 1.0 - hidden[h] * hidden[h];
        }
        rank1_update(gb.w1, 1.0, dh.data(), input.data());
        for (size_t h = 0; h < dh.size(); ++h) gb.b1[h] += dh[h];

        Vector dinput(b.input_dim());
        matvec_transposed(b.w1, dh.data(), dinput.data());

        double* demb = gb.embedding.row(tok - 1);
        for (size_t j = 0; j < c; ++j) demb[j] += dinput[j];
        if (model.serial && n > 0) {
          // Pooled input is the mean of the preceding branches' target
          // embeddings (teacher forcing).
          const double inv = 1.0 / static_cast<double>(n);
          for (size_t j = 0; j < n; ++j) {
            double* dprev =
                grads->branches[j].embedding.row(target.at(fi, j) - 1);
            for (size_t k = 0; k < c; ++k) {
              dprev[k] += inv * dinput[c + k];
            }
          }
        }
        const double* dfeat = dinput.data() + (b.input_dim() - block);
        for (size_t j = 0; j < block; ++j) ds[j] += dfeat[j];
      }

      if (model.serial && n + 1 < n_groups) {
        // Teacher-forced pooled input for the next stage.
        const double denom = static_cast<double>(n + 1);
        for (size_t j = 0; j < c; ++j) {
          pooled[j] = (pooled[j] * static_cast<double>(n) +
                       model.branches[n].embedding.at(tgt - 1, j)) /
                      denom;
        }
      }
    }

    if (grads) {
      for (size_t o = 0; o < offsets.size(); ++o) {
        if (!in_range[o]) continue;  // zero context carries no gradient
        const size_t row = static_cast<size_t>(
            static_cast<long long>(fi) + offsets[o]);
        for (size_t j = 0; j < c; ++j) {
          dpre[j] = ds[o * c + j] * (1.0 - s[o][j] * s[o][j]);
        }
        rank1_update(grads->proj, 1.0, dpre.data(), stacked.row(row));
        for (size_t j = 0; j < c; ++j) grads->bias[j] += dpre[j];
      }
    }
  }
  return total_loss;
}

namespace {

struct PreparedPair {
  Matrix stacked;
  codec::TokenSequence degraded;
  codec::TokenSequence target;
};

void check_alignment(const EnhancerModel& model,
                     const codec::CodecModel& codec) {
  if (model.vocab() != codec.codebook_size()) {
    throw ConfigError("enhancer vocab M does not match codec codebook size");
  }
  const size_t codec_groups =
      model.serial ? (codec.rvq ? codec.rvq->stages() : 0) : codec.groups();
  if (model.serial && !codec.rvq) {
    throw ConfigError("serial enhancer requires a codec with an RVQ");
  }
  if (model.groups() != codec_groups) {
    throw ConfigError("enhancer branch count does not match codec groups");
  }
  if (model.extractor.cfg.samples_per_feature() !=
      codec.linear.samples_per_token()) {
    throw ConfigError(
        "feature framing does not match codec token framing (w_s * R != T)");
  }
}

void apply_gradients(EnhancerModel& model, const Gradients& g, double step) {
  auto apply_mat = [step](Matrix& p, const Matrix& gm) {
    for (size_t i = 0; i < p.data.size(); ++i) p.data[i] -= step * gm.data[i];
  };
  auto apply_vec = [step](Vector& p, const Vector& gv) {
    for (size_t i = 0; i < p.size(); ++i) p[i] -= step * gv[i];
  };
  apply_mat(model.extractor.proj, g.proj);
  apply_vec(model.extractor.bias, g.bias);
  for (size_t n = 0; n < model.branches.size(); ++n) {
    apply_mat(model.branches[n].embedding, g.branches[n].embedding);
    apply_mat(model.branches[n].w1, g.branches[n].w1);
    apply_vec(model.branches[n].b1, g.branches[n].b1);
    apply_mat(model.branches[n].w2, g.branches[n].w2);
    apply_vec(model.branches[n].b2, g.branches[n].b2);
  }
}

}  // namespace

TrainReport train_enhancer(EnhancerModel& model, const codec::CodecModel& codec,
                           std::span<const AudioBuffer> degraded,
                           std::span<const AudioBuffer> clean,
                           const TrainConfig& config) {
  model.validate();
  check_alignment(model, codec);
  if (degraded.size() != clean.size()) {
    throw InvalidInputError("train_enhancer: pair count mismatch");
  }
  if (degraded.empty()) {
    throw InsufficientDataError("train_enhancer: empty corpus");
  }
  if (config.learning_rate <= 0 || config.epochs < 1 || config.batch < 1) {
    throw ConfigError("train_enhancer: bad training configuration");
  }

  std::vector<PreparedPair> pairs;
  std::vector<std::pair<size_t, size_t>> index;  // (pair, frame)
  for (size_t i = 0; i < degraded.size(); ++i) {
    if (degraded[i].length() != clean[i].length()) {
      throw InvalidInputError("train_enhancer: pair " + std::to_string(i) +
                              " lengths differ");
    }
    PreparedPair p;
    p.stacked = stack_stft_features(degraded[i], model.extractor.cfg);
    p.degraded = codec::tokenize(degraded[i], codec, model.serial);
    p.target = codec::tokenize(clean[i], codec, model.serial);
    if (p.degraded.frames != p.stacked.rows ||
        p.target.frames != p.stacked.rows) {
      throw InternalError("train_enhancer: frame alignment violated");
    }
    for (size_t f = 0; f < p.stacked.rows; ++f) index.emplace_back(i, f);
    pairs.push_back(std::move(p));
  }

  TrainReport report;
  report.seed = config.seed;
  report.epochs = config.epochs;
  report.loss.reserve(config.epochs);
  report.branch_accuracy = Matrix(config.epochs, model.groups());

  Gradients grads = Gradients::zeros_like(model);
  const size_t total = index.size();
  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(Rng::mix(config.seed, 0xe000 + epoch));
    rng.shuffle(index);

    double epoch_loss = 0.0;
    std::vector<size_t> hits(model.groups(), 0);
    size_t pos = 0;
    while (pos < total) {
      size_t end = std::min(total, pos + config.batch);
      grads.clear();
      for (size_t i = pos; i < end; ++i) {
        auto [pi, fi] = index[i];
        size_t frame = fi;
        epoch_loss += enhancer_backprop(model, pairs[pi].stacked,
                                        pairs[pi].degraded, pairs[pi].target,
                                        std::span(&frame, 1), &grads, &hits);
      }
      apply_gradients(model, grads,
                      config.learning_rate / static_cast<double>(end - pos));
      pos = end;
    }

    epoch_loss /= static_cast<double>(total);
    if (!std::isfinite(epoch_loss)) {
      throw DivergenceError("training diverged at epoch " +
                            std::to_string(epoch) + " (non-finite loss)");
    }
    report.loss.push_back(epoch_loss);
    for (size_t n = 0; n < model.groups(); ++n) {
      report.branch_accuracy.at(epoch, n) =
          static_cast<double>(hits[n]) / static_cast<double>(total);
    }
  }

  // Post-training accuracy with the final parameters.
  std::vector<size_t> hits(model.groups(), 0);
  for (const auto& p : pairs) {
    std::vector<size_t> all(p.stacked.rows);
    std::iota(all.begin(), all.end(), 0);
    enhancer_backprop(model, p.stacked, p.degraded, p.target, all, nullptr,
                      &hits);
  }
  report.final_accuracy.assign(model.groups(), 0.0);
  for (size_t n = 0; n < model.groups(); ++n) {
    report.final_accuracy[n] =
        static_cast<double>(hits[n]) / static_cast<double>(total);
  }
  return report;
}

codec::TokenSequence predict_clean_tokens(const EnhancerModel& model,
                                          const codec::CodecModel& codec,
                                          const AudioBuffer& degraded,
                                          int workers) {
  model.validate();
  check_alignment(model, codec);
  if (workers < 1) throw InvalidInputError("predict: workers must be >= 1");

  codec::TokenSequence deg = codec::tokenize(degraded, codec, model.serial);
  Matrix features = extract_features(degraded, model.extractor);
  if (features.rows != deg.frames) {
    throw InternalError("predict: feature/token frame alignment violated");
  }

  codec::TokenSequence out;
  out.frames = deg.frames;
  out.groups = model.groups();
  out.codebook_size = deg.codebook_size;
  out.tokens.assign(out.frames * out.groups, 0);

  // Branch evaluation is blocked over frames so each branch's weight
  // matrices stay cache-resident across a block; the per-frame numbers
  // are bitwise independent of the block and worker partitioning.
  const size_t c = model.feature_dim();
  constexpr size_t kBlock = 128;

  auto classify_block = [&](const PredictionBranch& b, const Matrix& input,
                            Matrix& act, Matrix& logits, size_t frame0,
                            size_t group) {
    matmul_nt(input, b.w1, act);
    for (size_t i = 0; i < act.rows; ++i) {
      double* row = act.row(i);
      for (size_t h = 0; h < b.hidden_dim(); ++h) {
        row[h] = std::tanh(row[h] + b.b1[h]);
      }
    }
    matmul_nt(act, b.w2, logits);
    for (size_t i = 0; i < logits.rows; ++i) {
      const double* row = logits.row(i);
      size_t best = 0;
      double best_v = row[0] + b.b2[0];
      for (size_t k = 1; k < b.vocab(); ++k) {
        double v = row[k] + b.b2[k];
        if (v > best_v) {
          best_v = v;
          best = k;
        }
      }
      if (!std::isfinite(best_v)) {
        throw InvalidInputError("predict: non-finite logit");
      }
      out.at(frame0 + i, group) = static_cast<uint32_t>(best) + 1;
    }
  };

  const size_t block = model.feature_block();
  // Copies the (possibly context-extended) feature block of frame f.
  auto fill_feature_block = [&](size_t f, double* dst) {
    if (!model.context) {
      std::copy(features.row(f), features.row(f) + c, dst);
      return;
    }
    if (f > 0) {
      std::copy(features.row(f - 1), features.row(f - 1) + c, dst);
    } else {
      std::fill(dst, dst + c, 0.0);
    }
    std::copy(features.row(f), features.row(f) + c, dst + c);
    if (f + 1 < features.rows) {
      std::copy(features.row(f + 1), features.row(f + 1) + c, dst + 2 * c);
    } else {
      std::fill(dst + 2 * c, dst + 3 * c, 0.0);
    }
  };

  if (!model.serial) {
    parallel_for_chunks(out.frames, workers, [&](size_t begin, size_t end) {
      Matrix input, act, logits;
      for (size_t f0 = begin; f0 < end; f0 += kBlock) {
        const size_t rows = std::min(kBlock, end - f0);
        input = Matrix(rows, c + block);
        for (size_t n = 0; n < out.groups; ++n) {
          const PredictionBranch& b = model.branches[n];
          for (size_t i = 0; i < rows; ++i) {
            const double* v = b.embedding.row(deg.at(f0 + i, n) - 1);
            double* row = input.row(i);
            std::copy(v, v + c, row);
            fill_feature_block(f0 + i, row + c);
          }
          classify_block(b, input, act, logits, f0, n);
        }
      }
    });
  } else {
    // Stages run strictly in order; within a stage the frames are
    // independent, so each stage is evaluated for all frames before the
    // next one starts.
    Matrix pooled(out.frames, c);
    Matrix input, act, logits;
    for (size_t n = 0; n < out.groups; ++n) {
      const PredictionBranch& b = model.branches[n];
      for (size_t f0 = 0; f0 < out.frames; f0 += kBlock) {
        const size_t rows = std::min(kBlock, out.frames - f0);
        input = Matrix(rows, 2 * c + block);
        for (size_t i = 0; i < rows; ++i) {
          const double* v = b.embedding.row(deg.at(f0 + i, n) - 1);
          double* row = input.row(i);
          std::copy(v, v + c, row);
          std::copy(pooled.row(f0 + i), pooled.row(f0 + i) + c, row + c);
          fill_feature_block(f0 + i, row + 2 * c);
        }
        classify_block(b, input, act, logits, f0, n);
      }
      if (n + 1 < out.groups) {
        const double denom = static_cast<double>(n + 1);
        for (size_t f = 0; f < out.frames; ++f) {
          const double* emb = b.embedding.row(out.at(f, n) - 1);
          double* prow = pooled.row(f);
          for (size_t j = 0; j < c; ++j) {
            prow[j] = (prow[j] * static_cast<double>(n) + emb[j]) / denom;
          }
        }
      }
    }
  }
  return out;
}

AudioBuffer enhance(const EnhancerModel& model, const codec::CodecModel& codec,
                    const AudioBuffer& degraded, int workers) {
  codec::TokenSequence clean_tokens =
      predict_clean_tokens(model, codec, degraded, workers);
  AudioBuffer out = codec::detokenize(clean_tokens, codec, model.serial);
  if (out.samples.size() > degraded.length()) {
    out.samples.resize(degraded.length());
  }
  return out;
}

EnhancerModel make_serial_variant(const EnhancerModel& parallel) {
  if (parallel.serial) {
    throw InvalidInputError("make_serial_variant: model is already serial");
  }
  EnhancerModel serial = parallel;
  serial.serial = true;
  const size_t c = parallel.feature_dim();
  const size_t block = parallel.feature_block();
  for (auto& b : serial.branches) {
    Matrix w1(b.hidden_dim(), c + c + block);
    for (size_t h = 0; h < b.hidden_dim(); ++h) {
      const double* src = b.w1.row(h);
      double* dst = w1.row(h);
      std::copy(src, src + c, dst);                      // embedding block
      std::copy(src + c, src + c + block, dst + 2 * c);  // feature block
    }
    b.w1 = std::move(w1);
  }
  serial.validate();
  return serial;
}

namespace {
constexpr char kEnhancerMagic[4] = {'P', 'G', 'S', 'E'};
constexpr uint32_t kEnhancerVersion = 1;
}  // namespace

void save_enhancer(const EnhancerModel& model, std::ostream& os) {
  io::write_magic(os, kEnhancerMagic);
  io::write_u32(os, kEnhancerVersion);
  io::write_u32(os, static_cast<uint32_t>(model.feature_dim()));
  io::write_u32(os, static_cast<uint32_t>(model.hidden_dim()));
  io::write_u32(os, static_cast<uint32_t>(model.groups()));
  io::write_u32(os, static_cast<uint32_t>(model.vocab()));
  io::write_u32(os, model.serial ? 1 : 0);
  io::write_u32(os, model.context ? 1 : 0);
  io::write_u32(os, static_cast<uint32_t>(model.extractor.cfg.frame_length));
  io::write_u32(os, static_cast<uint32_t>(model.extractor.cfg.frame_shift));
  io::write_u32(os, static_cast<uint32_t>(model.extractor.cfg.fft_size));
  io::write_u32(os, static_cast<uint32_t>(model.extractor.cfg.stack_frames));
  io::write_matrix(os, model.extractor.proj);
  io::write_vector(os, model.extractor.bias);
  for (const auto& b : model.branches) {
    io::write_matrix(os, b.embedding);
    io::write_matrix(os, b.w1);
    io::write_vector(os, b.b1);
    io::write_matrix(os, b.w2);
    io::write_vector(os, b.b2);
  }
}

EnhancerModel load_enhancer(std::istream& is) {
  // The enhancer blob may be appended to a codec container in one file;
  // skip over a leading codec section if present.
  {
    char head[4] = {0, 0, 0, 0};
    auto pos = is.tellg();
    is.read(head, 4);
    is.clear();
    is.seekg(pos);
    if (std::memcmp(head, "GVQC", 4) == 0) codec::load_codec(is);
  }
  io::expect_magic(is, kEnhancerMagic, "enhancer model");
  uint32_t version = io::read_u32(is);
  if (version != kEnhancerVersion) {
    throw IoError("enhancer model: unsupported version " +
                  std::to_string(version));
  }
  uint32_t c = io::read_u32(is);
  uint32_t h = io::read_u32(is);
  uint32_t n = io::read_u32(is);
  uint32_t m = io::read_u32(is);
  uint32_t serial = io::read_u32(is);
  uint32_t context = io::read_u32(is);
  EnhancerModel model;
  model.serial = serial != 0;
  model.context = context != 0;
  model.extractor.cfg.frame_length = static_cast<int>(io::read_u32(is));
  model.extractor.cfg.frame_shift = static_cast<int>(io::read_u32(is));
  model.extractor.cfg.fft_size = static_cast<int>(io::read_u32(is));
  model.extractor.cfg.stack_frames = static_cast<int>(io::read_u32(is));
  if (c < 1 || h < 1 || n < 1 || m < 1 || serial > 1 || context > 1 ||
      model.extractor.cfg.frame_length < 2 ||
      model.extractor.cfg.frame_shift < 1 ||
      model.extractor.cfg.fft_size < model.extractor.cfg.frame_length ||
      model.extractor.cfg.stack_frames < 1) {
    throw IoError("enhancer model: invalid header fields");
  }
  model.extractor.proj = Matrix(c, model.extractor.cfg.stacked_dim());
  model.extractor.bias.assign(c, 0.0);
  io::read_matrix(is, model.extractor.proj);
  io::read_vector(is, model.extractor.bias);
  const size_t in_dim =
      (model.serial ? c : 0) + c + (model.context ? 3u : 1u) * c;
  for (uint32_t i = 0; i < n; ++i) {
    PredictionBranch b;
    b.embedding = Matrix(m, c);
    b.w1 = Matrix(h, in_dim);
    b.b1.assign(h, 0.0);
    b.w2 = Matrix(m, h);
    b.b2.assign(m, 0.0);
    io::read_matrix(is, b.embedding);
    io::read_matrix(is, b.w1);
    io::read_vector(is, b.b1);
    io::read_matrix(is, b.w2);
    io::read_vector(is, b.b2);
    model.branches.push_back(std::move(b));
  }
  model.validate();
  return model;
}

void save_enhancer_file(const EnhancerModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  save_enhancer(model, os);
}

EnhancerModel load_enhancer_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  return load_enhancer(is);
}

uint64_t enhancer_checksum(const EnhancerModel& model) {
  std::ostringstream os(std::ios::binary);
  save_enhancer(model, os);
  std::string bytes = os.str();
  return io::fnv1a(bytes.data(), bytes.size());
}

}  // namespace paragse::enhance
