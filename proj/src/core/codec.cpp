// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/codec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "core/rng.hpp"
#include "core/serialize.hpp"

namespace paragse::codec {

namespace {

void check_finite(const Matrix& m, const std::string& what) {
  for (double v : m.data) {
    if (!std::isfinite(v)) throw InvalidInputError(what + ": non-finite value");
  }
}

struct KmeansState {
  Matrix codes;     // M x dim
  Matrix sum_ema;   // M x dim
  Vector count_ema;  // M
  std::vector<int> dead;  // consecutive empty iterations per entry
};

Codebook train_single_codebook(const Matrix& data,
                               const CodebookTrainConfig& cfg, uint64_t seed,
                               CodebookTrainTrace* trace) {
  const size_t n = data.rows;
  const size_t dim = data.cols;
  const size_t m = cfg.codebook_size;
  if (m < 1) throw InvalidInputError("codebook training: M must be >= 1");
  if (n < m) {
    throw InsufficientDataError(
        "codebook training: " + std::to_string(n) + " vectors for M = " +
        std::to_string(m));
  }

  // The contract requires at least M distinct vectors; otherwise k-means
  // cannot produce M distinct entries.
  {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return std::lexicographical_compare(data.row(a), data.row(a) + dim,
                                          data.row(b), data.row(b) + dim);
    });
    size_t distinct = n == 0 ? 0 : 1;
    for (size_t i = 1; i < n; ++i) {
      if (!std::equal(data.row(order[i]), data.row(order[i]) + dim,
                      data.row(order[i - 1]))) {
        ++distinct;
      }
    }
    if (distinct < m) {
      throw InsufficientDataError(
          "codebook training: only " + std::to_string(distinct) +
          " distinct vectors for M = " + std::to_string(m));
    }
  }

  Rng rng(seed);
  KmeansState st;
  st.codes = Matrix(m, dim);
  st.sum_ema = Matrix(m, dim);
  st.count_ema.assign(m, 1.0);
  st.dead.assign(m, 0);

  // k-means++ seeding: distance-squared weighted picks; duplicates carry
  // zero mass, so the M seeds are distinct.
  Vector d2(n, 0.0);
  {
    size_t first = rng.index(n);
    std::copy(data.row(first), data.row(first) + dim, st.codes.row(0));
    for (size_t i = 0; i < n; ++i) {
      d2[i] = squared_distance(data.row(i), st.codes.row(0), dim);
    }
    for (size_t c = 1; c < m; ++c) {
      double total = std::accumulate(d2.begin(), d2.end(), 0.0);
      size_t pick = 0;
      if (total > 0.0) {
        double r = rng.uniform() * total;
        double run = 0.0;
        pick = n - 1;
        for (size_t i = 0; i < n; ++i) {
          run += d2[i];
          if (run >= r && d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
      std::copy(data.row(pick), data.row(pick) + dim, st.codes.row(c));
      for (size_t i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i],
                         squared_distance(data.row(i), st.codes.row(c), dim));
      }
    }
  }
  for (size_t c = 0; c < m; ++c) {
    std::copy(st.codes.row(c), st.codes.row(c) + dim, st.sum_ema.row(c));
  }

  std::vector<uint32_t> assign(n, 0);
  Vector err(n, 0.0);
  Matrix sums(m, dim);
  std::vector<size_t> counts(m, 0);

  auto assign_all = [&]() {
    std::fill(sums.data.begin(), sums.data.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double* v = data.row(i);
      uint32_t best = 0;
      double best_d = squared_distance(v, st.codes.row(0), dim);
      for (size_t c = 1; c < m; ++c) {
        double d = squared_distance(v, st.codes.row(c), dim);
        if (d < best_d) {
          best_d = d;
          best = static_cast<uint32_t>(c);
        }
      }
      assign[i] = best;
      err[i] = best_d;
      total += best_d;
      counts[best]++;
      const double* cv = v;
      double* srow = sums.row(best);
      for (size_t k = 0; k < dim; ++k) srow[k] += cv[k];
    }
    return total / static_cast<double>(n);
  };

  // Reseeds entries listed in `targets` onto the currently worst-quantized
  // distinct vectors. Moving an unassigned entry leaves the assignment
  // error unchanged, so the training MSE stays non-increasing.
  auto reseed = [&](const std::vector<size_t>& targets) {
    if (targets.empty()) return;
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(),
                      order.begin() + std::min(n, targets.size() * 4 + 8),
                      order.end(),
                      [&](size_t a, size_t b) { return err[a] > err[b]; });
    size_t next = 0;
    for (size_t t = 0; t < targets.size(); ++t) {
      // Skip vectors already used as a seed in this round.
      while (next > 0 && next < n &&
             std::equal(data.row(order[next]), data.row(order[next]) + dim,
                        data.row(order[next - 1]))) {
        ++next;
      }
      if (next >= n) break;
      size_t c = targets[t];
      const double* v = data.row(order[next]);
      std::copy(v, v + dim, st.codes.row(c));
      std::copy(v, v + dim, st.sum_ema.row(c));
      st.count_ema[c] = 1.0;
      st.dead[c] = 0;
      ++next;
    }
  };

  for (size_t it = 0; it < cfg.iterations; ++it) {
    double mse = assign_all();
    if (trace) trace->mse_per_iteration.push_back(mse);

    std::vector<size_t> to_reseed;
    for (size_t c = 0; c < m; ++c) {
      if (counts[c] == 0) {
        if (++st.dead[c] >= cfg.dead_reseed_after) to_reseed.push_back(c);
        continue;
      }
      st.dead[c] = 0;
      st.count_ema[c] = cfg.ema_decay * st.count_ema[c] +
                        (1.0 - cfg.ema_decay) * static_cast<double>(counts[c]);
      double* se = st.sum_ema.row(c);
      const double* s = sums.row(c);
      double* code = st.codes.row(c);
      for (size_t k = 0; k < dim; ++k) {
        se[k] = cfg.ema_decay * se[k] + (1.0 - cfg.ema_decay) * s[k];
        code[k] = se[k] / st.count_ema[c];
      }
    }
    reseed(to_reseed);
  }

  double final_mse = assign_all();
  if (trace) trace->final_mse = final_mse;

  // Trained codebooks must have pairwise-distinct rows: a duplicate can
  // only be an entry that received no assignments (ties go to the lower
  // index), so moving it onto a badly-quantized vector is free.
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<size_t> dups;
    for (size_t a = 0; a < m; ++a) {
      for (size_t b = 0; b < a; ++b) {
        if (squared_distance(st.codes.row(a), st.codes.row(b), dim) < 1e-24) {
          dups.push_back(a);
          break;
        }
      }
    }
    if (dups.empty()) break;
    assign_all();
    reseed(dups);
  }

  Codebook out;
  out.entries = std::move(st.codes);
  return out;
}

}  // namespace

void GvqQuantizer::validate() const {
  if (codebooks.empty()) throw InvalidInputError("gvq: no codebooks");
  for (const auto& cb : codebooks) {
    if (cb.size() != codebook_size() || cb.dim() != group_dim()) {
      throw InvalidInputError("gvq: codebooks must share M and dim");
    }
    check_finite(cb.entries, "gvq codebook");
  }
}

void RvqQuantizer::validate() const {
  if (codebooks.empty()) throw InvalidInputError("rvq: no codebooks");
  for (const auto& cb : codebooks) {
    if (cb.size() != codebook_size() || cb.dim() != latent_dim()) {
      throw InvalidInputError("rvq: stages must share M and dim");
    }
    check_finite(cb.entries, "rvq codebook");
  }
}

VqResult vq_quantize(const double* v, size_t dim, const Codebook& codebook) {
  if (dim != codebook.dim()) {
    throw InvalidInputError("vq_quantize: vector dim " + std::to_string(dim) +
                            " != codebook dim " +
                            std::to_string(codebook.dim()));
  }
  const size_t m = codebook.size();
  uint32_t best = 0;
  double best_d = squared_distance(v, codebook.entries.row(0), dim);
  for (size_t c = 1; c < m; ++c) {
    double d = squared_distance(v, codebook.entries.row(c), dim);
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = static_cast<uint32_t>(c);
    }
  }
  VqResult r;
  r.token = best + 1;
  r.quantized.assign(codebook.entries.row(best),
                     codebook.entries.row(best) + dim);
  return r;
}

GroupedVqResult gvq_quantize(const Vector& e, const GvqQuantizer& q) {
  if (e.size() != q.latent_dim()) {
    throw InvalidInputError("gvq_quantize: latent dim mismatch");
  }
  const size_t gd = q.group_dim();
  GroupedVqResult out;
  out.tokens.reserve(q.groups());
  out.quantized.reserve(e.size());
  for (size_t g = 0; g < q.groups(); ++g) {
    VqResult r = vq_quantize(e.data() + g * gd, gd, q.codebooks[g]);
    out.tokens.push_back(r.token);
    out.quantized.insert(out.quantized.end(), r.quantized.begin(),
                         r.quantized.end());
  }
  return out;
}

Vector gvq_dequantize(const std::vector<uint32_t>& tokens,
                      const GvqQuantizer& q) {
  if (tokens.size() != q.groups()) {
    throw InvalidInputError("gvq_dequantize: expected " +
                            std::to_string(q.groups()) + " tokens");
  }
  Vector out;
  out.reserve(q.latent_dim());
  for (size_t g = 0; g < q.groups(); ++g) {
    uint32_t t = tokens[g];
    if (t < 1 || t > q.codebook_size()) {
      throw InvalidInputError("gvq_dequantize: token " + std::to_string(t) +
                              " out of range [1, " +
                              std::to_string(q.codebook_size()) + "]");
    }
    const double* row = q.codebooks[g].entries.row(t - 1);
    out.insert(out.end(), row, row + q.group_dim());
  }
  return out;
}

GroupedVqResult rvq_quantize(const Vector& e, const RvqQuantizer& q) {
  if (e.size() != q.latent_dim()) {
    throw InvalidInputError("rvq_quantize: latent dim mismatch");
  }
  const size_t dim = q.latent_dim();
  GroupedVqResult out;
  out.quantized.assign(dim, 0.0);
  Vector residual = e;
  for (size_t s = 0; s < q.stages(); ++s) {
    VqResult r = vq_quantize(residual.data(), dim, q.codebooks[s]);
    out.tokens.push_back(r.token);
    for (size_t k = 0; k < dim; ++k) {
      out.quantized[k] += r.quantized[k];
      residual[k] -= r.quantized[k];
    }
  }
  return out;
}

Vector rvq_dequantize(const std::vector<uint32_t>& tokens,
                      const RvqQuantizer& q) {
  if (tokens.size() != q.stages()) {
    throw InvalidInputError("rvq_dequantize: expected " +
                            std::to_string(q.stages()) + " tokens");
  }
  Vector out(q.latent_dim(), 0.0);
  for (size_t s = 0; s < q.stages(); ++s) {
    uint32_t t = tokens[s];
    if (t < 1 || t > q.codebook_size()) {
      throw InvalidInputError("rvq_dequantize: token out of range");
    }
    const double* row = q.codebooks[s].entries.row(t - 1);
    for (size_t k = 0; k < q.latent_dim(); ++k) out[k] += row[k];
  }
  return out;
}

double gvq_loss(const std::vector<Matrix>& inputs,
                const std::vector<Matrix>& outputs) {
  if (inputs.size() != outputs.size() || inputs.empty()) {
    throw InvalidInputError("gvq_loss: group count mismatch");
  }
  double total = 0.0;
  for (size_t g = 0; g < inputs.size(); ++g) {
    const Matrix& a = inputs[g];
    const Matrix& b = outputs[g];
    if (a.rows != b.rows || a.cols != b.cols || a.rows == 0) {
      throw InvalidInputError("gvq_loss: shape mismatch in group " +
                              std::to_string(g));
    }
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
      double d = b.data[i] - a.data[i];
      acc += d * d;
    }
    total += acc / static_cast<double>(a.rows);
  }
  return total;
}

Matrix encode(const AudioBuffer& audio, const LinearCodecModel& model) {
  if (audio.sample_rate != model.sample_rate) {
    throw ConfigError("encode: audio rate " +
                      std::to_string(audio.sample_rate) +
                      " != model rate " + std::to_string(model.sample_rate));
  }
  auto spec = dsp::mdct_forward(audio, model.mdct_half_window);
  const size_t r = static_cast<size_t>(model.frames_per_token);
  const size_t w = static_cast<size_t>(model.mdct_half_window);
  const size_t groups = (spec.frames() + r - 1) / r;
  const size_t d = model.stack_dim();

  Matrix latents(groups, model.latent_dim());
  Vector stack(d, 0.0);
  for (size_t g = 0; g < groups; ++g) {
    std::fill(stack.begin(), stack.end(), 0.0);
    for (size_t f = 0; f < r; ++f) {
      size_t frame = g * r + f;
      if (frame >= spec.frames()) break;  // tail completed with zeros
      std::copy(spec.coefficients.row(frame), spec.coefficients.row(frame) + w,
                stack.begin() + f * w);
    }
    matvec(model.analysis, stack.data(), latents.row(g));
  }
  return latents;
}

AudioBuffer decode(const Matrix& latents, const LinearCodecModel& model) {
  if (latents.cols != model.latent_dim()) {
    throw InvalidInputError("decode: latent dim " +
                            std::to_string(latents.cols) + " != model K " +
                            std::to_string(model.latent_dim()));
  }
  check_finite(latents, "decode latents");
  const size_t r = static_cast<size_t>(model.frames_per_token);
  const size_t w = static_cast<size_t>(model.mdct_half_window);

  dsp::MdctSpectrum spec;
  spec.hop = model.mdct_half_window;
  spec.coefficients = Matrix(std::max<size_t>(latents.rows, 1) * r, w);
  Vector stack(model.stack_dim());
  for (size_t g = 0; g < latents.rows; ++g) {
    matvec(model.synthesis, latents.row(g), stack.data());
    for (size_t f = 0; f < r; ++f) {
      std::copy(stack.begin() + f * w, stack.begin() + (f + 1) * w,
                spec.coefficients.row(g * r + f));
    }
  }
  return dsp::mdct_inverse(spec, model.sample_rate);
}

LinearCodecModel fit_linear_codec(std::span<const AudioBuffer> corpus,
                                  size_t latent_dim, int mdct_half_window,
                                  int frames_per_token, int sample_rate) {
  if (latent_dim < 1) throw InvalidInputError("fit: latent_dim must be >= 1");
  if (frames_per_token < 1) {
    throw InvalidInputError("fit: frames_per_token must be >= 1");
  }
  double total_seconds = 0.0;
  for (const auto& a : corpus) {
    if (a.sample_rate != sample_rate) {
      throw ConfigError("fit: corpus sample rate mismatch");
    }
    total_seconds += a.seconds();
  }
  if (total_seconds < 10.0) {
    throw InsufficientDataError(
        "fit: corpus too small (" + std::to_string(total_seconds) +
        " s, need >= 10 s)");
  }

  LinearCodecModel model;
  model.mdct_half_window = mdct_half_window;
  model.frames_per_token = frames_per_token;
  model.sample_rate = sample_rate;
  const size_t d =
      static_cast<size_t>(mdct_half_window) * static_cast<size_t>(frames_per_token);
  if (latent_dim > d) {
    throw InvalidInputError("fit: latent_dim exceeds stacked dimension");
  }

  // Uncentered second-moment matrix of the stacked MDCT frames; leaving
  // out mean subtraction keeps the analysis map linear.
  Matrix moment(d, d);
  size_t count = 0;
  const size_t r = static_cast<size_t>(frames_per_token);
  const size_t w = static_cast<size_t>(mdct_half_window);
  Vector stack(d, 0.0);
  for (const auto& a : corpus) {
    auto spec = dsp::mdct_forward(a, mdct_half_window);
    const size_t groups = (spec.frames() + r - 1) / r;
    for (size_t g = 0; g < groups; ++g) {
      std::fill(stack.begin(), stack.end(), 0.0);
      for (size_t f = 0; f < r; ++f) {
        size_t frame = g * r + f;
        if (frame >= spec.frames()) break;
        std::copy(spec.coefficients.row(frame),
                  spec.coefficients.row(frame) + w, stack.begin() + f * w);
      }
      rank1_update(moment, 1.0, stack.data(), stack.data());
      ++count;
    }
  }
  for (double& v : moment.data) v /= static_cast<double>(count);

  Vector eigvals;
  Matrix eigvecs;
  jacobi_eigen_symmetric(std::move(moment), eigvals, eigvecs);

  model.analysis = Matrix(latent_dim, d);
  model.synthesis = Matrix(d, latent_dim);
  for (size_t k = 0; k < latent_dim; ++k) {
    for (size_t j = 0; j < d; ++j) {
      model.analysis.at(k, j) = eigvecs.at(k, j);
      model.synthesis.at(j, k) = eigvecs.at(k, j);
    }
  }
  return model;
}

GvqQuantizer train_codebooks_gvq(const Matrix& latents, size_t groups,
                                 const CodebookTrainConfig& config,
                                 std::vector<CodebookTrainTrace>* traces) {
  if (groups < 1 || latents.cols % groups != 0) {
    throw InvalidInputError(
        "train_codebooks_gvq: latent dim must be divisible by group count");
  }
  const size_t gd = latents.cols / groups;
  GvqQuantizer q;
  if (traces) traces->assign(groups, {});
  for (size_t g = 0; g < groups; ++g) {
    Matrix part(latents.rows, gd);
    for (size_t i = 0; i < latents.rows; ++i) {
      std::copy(latents.row(i) + g * gd, latents.row(i) + (g + 1) * gd,
                part.row(i));
    }
    CodebookTrainTrace local;
    Codebook cb = train_single_codebook(part, config, Rng::mix(config.seed, g),
                                        traces ? &(*traces)[g] : &local);
    q.codebooks.push_back(std::move(cb));
  }
  q.validate();
  return q;
}

RvqQuantizer train_codebooks_rvq(const Matrix& latents, size_t stages,
                                 const CodebookTrainConfig& config,
                                 std::vector<CodebookTrainTrace>* traces) {
  if (stages < 1) throw InvalidInputError("train_codebooks_rvq: stages >= 1");
  RvqQuantizer q;
  if (traces) traces->assign(stages, {});
  Matrix residual = latents;
  for (size_t s = 0; s < stages; ++s) {
    CodebookTrainTrace local;
    Codebook cb =
        train_single_codebook(residual, config, Rng::mix(config.seed, 1000 + s),
                              traces ? &(*traces)[s] : &local);
    for (size_t i = 0; i < residual.rows; ++i) {
      VqResult r = vq_quantize(residual.row(i), residual.cols, cb);
      double* row = residual.row(i);
      for (size_t k = 0; k < residual.cols; ++k) row[k] -= r.quantized[k];
    }
    q.codebooks.push_back(std::move(cb));
  }
  q.validate();
  return q;
}

double gvq_mse(const Matrix& latents, const GvqQuantizer& q) {
  if (latents.rows == 0) throw InvalidInputError("gvq_mse: empty batch");
  double acc = 0.0;
  for (size_t i = 0; i < latents.rows; ++i) {
    Vector e(latents.row(i), latents.row(i) + latents.cols);
    auto r = gvq_quantize(e, q);
    acc += squared_distance(e.data(), r.quantized.data(), e.size());
  }
  return acc / static_cast<double>(latents.rows);
}

double rvq_mse(const Matrix& latents, const RvqQuantizer& q) {
  if (latents.rows == 0) throw InvalidInputError("rvq_mse: empty batch");
  double acc = 0.0;
  for (size_t i = 0; i < latents.rows; ++i) {
    Vector e(latents.row(i), latents.row(i) + latents.cols);
    auto r = rvq_quantize(e, q);
    acc += squared_distance(e.data(), r.quantized.data(), e.size());
  }
  return acc / static_cast<double>(latents.rows);
}

TokenSequence tokenize(const AudioBuffer& audio, const CodecModel& model,
                       bool use_rvq) {
  if (use_rvq && !model.rvq) {
    throw ConfigError("tokenize: model has no residual quantizer");
  }
  Matrix latents = encode(audio, model.linear);
  TokenSequence seq;
  seq.frames = latents.rows;
  seq.groups = use_rvq ? model.rvq->stages() : model.gvq.groups();
  seq.codebook_size = static_cast<uint32_t>(model.codebook_size());
  seq.tokens.resize(seq.frames * seq.groups);
  for (size_t i = 0; i < latents.rows; ++i) {
    Vector e(latents.row(i), latents.row(i) + latents.cols);
    GroupedVqResult r =
        use_rvq ? rvq_quantize(e, *model.rvq) : gvq_quantize(e, model.gvq);
    std::copy(r.tokens.begin(), r.tokens.end(),
              seq.tokens.begin() + i * seq.groups);
  }
  return seq;
}

AudioBuffer detokenize(const TokenSequence& tokens, const CodecModel& model,
                       bool use_rvq) {
  if (use_rvq && !model.rvq) {
    throw ConfigError("detokenize: model has no residual quantizer");
  }
  const size_t expected =
      use_rvq ? model.rvq->stages() : model.gvq.groups();
  if (tokens.groups != expected) {
    throw InvalidInputError("detokenize: token group count mismatch");
  }
  Matrix latents(tokens.frames, model.latent_dim());
  std::vector<uint32_t> frame_tokens(tokens.groups);
  for (size_t i = 0; i < tokens.frames; ++i) {
    std::copy(tokens.tokens.begin() + i * tokens.groups,
              tokens.tokens.begin() + (i + 1) * tokens.groups,
              frame_tokens.begin());
    Vector e = use_rvq ? rvq_dequantize(frame_tokens, *model.rvq)
                       : gvq_dequantize(frame_tokens, model.gvq);
    std::copy(e.begin(), e.end(), latents.row(i));
  }
  return decode(latents, model.linear);
}

namespace {
constexpr char kCodecMagic[4] = {'G', 'V', 'Q', 'C'};
constexpr uint32_t kCodecVersion = 1;
}  // namespace

void save_codec(const CodecModel& model, std::ostream& os) {
  io::write_magic(os, kCodecMagic);
  io::write_u32(os, kCodecVersion);
  io::write_u32(os, static_cast<uint32_t>(model.gvq.groups()));
  io::write_u32(os, static_cast<uint32_t>(model.gvq.codebook_size()));
  io::write_u32(os, static_cast<uint32_t>(model.linear.latent_dim()));
  io::write_u32(os, static_cast<uint32_t>(model.linear.mdct_half_window));
  io::write_u32(os, static_cast<uint32_t>(model.linear.samples_per_token()));
  io::write_u32(os, static_cast<uint32_t>(model.linear.sample_rate));
  io::write_matrix(os, model.linear.analysis);
  io::write_matrix(os, model.linear.synthesis);
  for (const auto& cb : model.gvq.codebooks) io::write_matrix(os, cb.entries);
  io::write_u32(os, model.rvq ? static_cast<uint32_t>(model.rvq->stages()) : 0);
  if (model.rvq) {
    for (const auto& cb : model.rvq->codebooks) {
      io::write_matrix(os, cb.entries);
    }
  }
}

CodecModel load_codec(std::istream& is) {
  io::expect_magic(is, kCodecMagic, "codec model");
  uint32_t version = io::read_u32(is);
  if (version != kCodecVersion) {
    throw IoError("codec model: unsupported version " +
                  std::to_string(version));
  }
  uint32_t n = io::read_u32(is);
  uint32_t m = io::read_u32(is);
  uint32_t k = io::read_u32(is);
  uint32_t w = io::read_u32(is);
  uint32_t t = io::read_u32(is);
  uint32_t rate = io::read_u32(is);
  if (n < 1 || m < 1 || k < 1 || w < 2 || t < w || k % n != 0 || t % w != 0) {
    throw IoError("codec model: invalid header fields");
  }

  CodecModel model;
  model.linear.mdct_half_window = static_cast<int>(w);
  model.linear.frames_per_token = static_cast<int>(t / w);
  model.linear.sample_rate = static_cast<int>(rate);
  model.linear.analysis = Matrix(k, t);
  model.linear.synthesis = Matrix(t, k);
  io::read_matrix(is, model.linear.analysis);
  io::read_matrix(is, model.linear.synthesis);
  for (uint32_t g = 0; g < n; ++g) {
    Codebook cb;
    cb.entries = Matrix(m, k / n);
    io::read_matrix(is, cb.entries);
    model.gvq.codebooks.push_back(std::move(cb));
  }
  uint32_t rvq_stages = io::read_u32(is);
  if (rvq_stages > 0) {
    RvqQuantizer rvq;
    for (uint32_t s = 0; s < rvq_stages; ++s) {
      Codebook cb;
      cb.entries = Matrix(m, k);
      io::read_matrix(is, cb.entries);
      rvq.codebooks.push_back(std::move(cb));
    }
    rvq.validate();
    model.rvq = std::move(rvq);
  }
  model.gvq.validate();
  check_finite(model.linear.analysis, "codec analysis");
  check_finite(model.linear.synthesis, "codec synthesis");
  return model;
}

void save_codec_file(const CodecModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  save_codec(model, os);
}

CodecModel load_codec_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  return load_codec(is);
}

uint64_t codec_checksum(const CodecModel& model) {
  std::ostringstream os(std::ios::binary);
  save_codec(model, os);
  std::string bytes = os.str();
  return io::fnv1a(bytes.data(), bytes.size());
}

std::string tokens_to_text(const TokenSequence& tokens) {
  std::ostringstream os;
  for (size_t i = 0; i < tokens.frames; ++i) {
    for (size_t g = 0; g < tokens.groups; ++g) {
      if (g) os << ' ';
      os << tokens.at(i, g);
    }
    os << '\n';
  }
  return os.str();
}

TokenSequence tokens_from_text(const std::string& text,
                               uint32_t codebook_size) {
  TokenSequence seq;
  seq.codebook_size = codebook_size;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<uint32_t> row;
    long long v = 0;
    while (ls >> v) {
      if (v < 1 || (codebook_size > 0 && v > codebook_size)) {
        throw InvalidInputError("token text: index out of range: " +
                                std::to_string(v));
      }
      row.push_back(static_cast<uint32_t>(v));
    }
    if (seq.groups == 0) {
      seq.groups = row.size();
    } else if (row.size() != seq.groups) {
      throw InvalidInputError("token text: ragged rows");
    }
    seq.tokens.insert(seq.tokens.end(), row.begin(), row.end());
    seq.frames++;
  }
  if (seq.frames == 0) throw InvalidInputError("token text: empty");
  return seq;
}

}  // namespace paragse::codec
