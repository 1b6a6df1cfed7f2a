// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "paragse.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "core/codec.hpp"
#include "core/corpus.hpp"
#include "core/degrade.hpp"
#include "core/enhance.hpp"
#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/wav.hpp"

struct pgse_audio {
  paragse::AudioBuffer buf;
};
struct pgse_codec {
  paragse::codec::CodecModel model;
};
struct pgse_enhancer {
  paragse::enhance::EnhancerModel model;
};
struct pgse_tokens {
  paragse::codec::TokenSequence seq;
};
struct pgse_report {
  paragse::enhance::TrainReport report;
};
struct pgse_assets {
  paragse::degrade::Assets assets;
  int32_t sample_rate;
};
struct pgse_manifest {
  struct Entry {
    std::string clean;
    std::string degraded;
    std::string spec;
  };
  std::vector<Entry> entries;
};

namespace {

thread_local std::string g_last_error = "no error";

pgse_status map_kind(paragse::ErrorKind kind) {
  using paragse::ErrorKind;
  switch (kind) {
    case ErrorKind::invalid_input: return PGSE_ERR_INVALID_INPUT;
    case ErrorKind::config: return PGSE_ERR_CONFIG;
    case ErrorKind::insufficient_data: return PGSE_ERR_INSUFFICIENT_DATA;
    case ErrorKind::io: return PGSE_ERR_IO;
    case ErrorKind::lookup: return PGSE_ERR_LOOKUP;
    case ErrorKind::degenerate_input: return PGSE_ERR_DEGENERATE;
    case ErrorKind::divergence: return PGSE_ERR_DIVERGENCE;
    case ErrorKind::internal: return PGSE_ERR_INTERNAL;
  }
  return PGSE_ERR_INTERNAL;
}

template <typename Fn>
pgse_status wrap(Fn&& fn) {
  try {
    fn();
    return PGSE_OK;
  } catch (const paragse::Error& e) {
    g_last_error = e.what();
    return map_kind(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PGSE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PGSE_ERR_INTERNAL;
  }
}

pgse_status bad_arg(const char* what) {
  g_last_error = std::string("bad argument: ") + what;
  return PGSE_ERR_BAD_ARG;
}

std::vector<const paragse::AudioBuffer*> collect(const pgse_audio* const* in,
                                                 size_t count) {
  std::vector<const paragse::AudioBuffer*> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    if (!in[i]) throw paragse::InvalidInputError("null audio handle in list");
    out.push_back(&in[i]->buf);
  }
  return out;
}

std::vector<paragse::AudioBuffer> copy_buffers(const pgse_audio* const* in,
                                               size_t count) {
  std::vector<paragse::AudioBuffer> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    if (!in[i]) throw paragse::InvalidInputError("null audio handle in list");
    out.push_back(in[i]->buf);
  }
  return out;
}

}  // namespace

extern "C" {

const char* pgse_version(void) { return "0.1.0"; }

const char* pgse_status_name(pgse_status status) {
  switch (status) {
    case PGSE_OK: return "ok";
    case PGSE_ERR_BAD_ARG: return "bad-argument";
    case PGSE_ERR_INVALID_INPUT: return "invalid-input";
    case PGSE_ERR_CONFIG: return "config";
    case PGSE_ERR_INSUFFICIENT_DATA: return "insufficient-data";
    case PGSE_ERR_IO: return "io";
    case PGSE_ERR_LOOKUP: return "lookup";
    case PGSE_ERR_DEGENERATE: return "degenerate-input";
    case PGSE_ERR_DIVERGENCE: return "divergence";
    case PGSE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* pgse_last_error(void) { return g_last_error.c_str(); }

/* ---------------- audio ---------------- */

pgse_status pgse_audio_create(const double* samples, size_t count,
                              int32_t sample_rate, pgse_audio** out) {
  if (!samples || !out) return bad_arg("pgse_audio_create");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf.sample_rate = sample_rate;
    handle->buf.samples.assign(samples, samples + count);
    paragse::validate_audio(handle->buf, "pgse_audio_create");
    *out = handle.release();
  });
}

pgse_status pgse_audio_from_wav(const char* path, pgse_audio** out) {
  if (!path || !out) return bad_arg("pgse_audio_from_wav");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf = paragse::wav::read_wav(path);
    *out = handle.release();
  });
}

pgse_status pgse_audio_to_wav(const pgse_audio* audio, const char* path) {
  if (!audio || !path) return bad_arg("pgse_audio_to_wav");
  return wrap([&]() { paragse::wav::write_wav(audio->buf, path); });
}

size_t pgse_audio_length(const pgse_audio* audio) {
  return audio ? audio->buf.samples.size() : 0;
}

int32_t pgse_audio_sample_rate(const pgse_audio* audio) {
  return audio ? audio->buf.sample_rate : 0;
}

pgse_status pgse_audio_samples(const pgse_audio* audio, double* out,
                               size_t capacity, size_t* written) {
  if (!audio || !out) return bad_arg("pgse_audio_samples");
  size_t n = std::min(capacity, audio->buf.samples.size());
  std::memcpy(out, audio->buf.samples.data(), n * sizeof(double));
  if (written) *written = n;
  return PGSE_OK;
}

pgse_status pgse_audio_resample(const pgse_audio* audio, int32_t target_rate,
                                pgse_audio** out) {
  if (!audio || !out) return bad_arg("pgse_audio_resample");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf = paragse::dsp::resample(audio->buf, target_rate);
    *out = handle.release();
  });
}

void pgse_audio_free(pgse_audio* audio) { delete audio; }

/* ---------------- synthesis ---------------- */

pgse_status pgse_synth_speech(double seconds, int32_t sample_rate,
                              uint64_t seed, pgse_audio** out) {
  if (!out) return bad_arg("pgse_synth_speech");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf = paragse::degrade::synth_speech(seconds, sample_rate, seed);
    *out = handle.release();
  });
}

pgse_status pgse_synth_noise(const char* kind, size_t length,
                             int32_t sample_rate, uint64_t seed,
                             pgse_audio** out) {
  if (!kind || !out) return bad_arg("pgse_synth_noise");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf =
        paragse::degrade::synth_noise(kind, length, sample_rate, seed);
    *out = handle.release();
  });
}

pgse_status pgse_synth_rir(double rt60_seconds, double duration_seconds,
                           int32_t sample_rate, uint64_t seed,
                           pgse_audio** out) {
  if (!out) return bad_arg("pgse_synth_rir");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf = paragse::degrade::synth_rir(rt60_seconds, duration_seconds,
                                              sample_rate, seed)
                      .impulse;
    *out = handle.release();
  });
}

/* ---------------- degradation ---------------- */

pgse_status pgse_assets_create(uint64_t seed, int32_t sample_rate,
                               pgse_assets** out) {
  if (!out) return bad_arg("pgse_assets_create");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_assets>();
    handle->assets = paragse::degrade::synth_assets(seed, sample_rate);
    handle->sample_rate = sample_rate;
    *out = handle.release();
  });
}

void pgse_assets_free(pgse_assets* assets) { delete assets; }

pgse_status pgse_degrade_add_noise(const pgse_audio* clean,
                                   const pgse_audio* noise, double snr_db,
                                   uint64_t seed, pgse_audio** out) {
  if (!clean || !noise || !out) return bad_arg("pgse_degrade_add_noise");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf =
        paragse::degrade::add_noise(clean->buf, noise->buf, snr_db, seed);
    *out = handle.release();
  });
}

pgse_status pgse_degrade_convolve_rir(const pgse_audio* clean,
                                      const pgse_audio* rir,
                                      pgse_audio** out) {
  if (!clean || !rir || !out) return bad_arg("pgse_degrade_convolve_rir");
  return wrap([&]() {
    paragse::degrade::Rir r;
    r.impulse = rir->buf;
    auto handle = std::make_unique<pgse_audio>();
    handle->buf = paragse::degrade::convolve_rir(clean->buf, r);
    *out = handle.release();
  });
}

pgse_status pgse_degrade_band_limit(const pgse_audio* audio,
                                    int32_t target_hz, pgse_audio** out) {
  if (!audio || !out) return bad_arg("pgse_degrade_band_limit");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf = paragse::degrade::band_limit(audio->buf, target_hz);
    *out = handle.release();
  });
}

pgse_status pgse_degrade_apply(const pgse_audio* clean, const char* spec_text,
                               const pgse_assets* assets, pgse_audio** out) {
  if (!clean || !spec_text || !assets || !out) {
    return bad_arg("pgse_degrade_apply");
  }
  return wrap([&]() {
    auto spec = paragse::degrade::parse_spec(spec_text);
    auto result = paragse::degrade::apply_spec(clean->buf, spec, assets->assets);
    auto handle = std::make_unique<pgse_audio>();
    handle->buf = std::move(result.first);
    *out = handle.release();
  });
}

/* ---------------- corpus ---------------- */

pgse_status pgse_corpus_make(const pgse_corpus_config* config,
                             const char* out_dir) {
  if (!config || !config->task || !out_dir) return bad_arg("pgse_corpus_make");
  return wrap([&]() {
    paragse::corpus::CorpusConfig cfg;
    cfg.task = paragse::corpus::task_from_name(config->task);
    cfg.count = config->count;
    cfg.utterance_seconds = config->utterance_seconds;
    cfg.sample_rate = config->sample_rate;
    cfg.seed = config->seed;
    if (config->snr_grid && config->snr_grid_len > 0) {
      cfg.snr_grid.assign(config->snr_grid,
                          config->snr_grid + config->snr_grid_len);
    }
    cfg.bandlimit_hz = config->bandlimit_hz;
    paragse::corpus::make_corpus(cfg, out_dir);
  });
}

pgse_status pgse_manifest_load(const char* path, pgse_manifest** out) {
  if (!path || !out) return bad_arg("pgse_manifest_load");
  return wrap([&]() {
    auto entries = paragse::corpus::load_manifest(path);
    auto handle = std::make_unique<pgse_manifest>();
    for (const auto& e : entries) {
      handle->entries.push_back(
          {paragse::corpus::resolve_manifest_path(path, e.clean_path),
           paragse::corpus::resolve_manifest_path(path, e.degraded_path),
           e.spec});
    }
    *out = handle.release();
  });
}

size_t pgse_manifest_size(const pgse_manifest* manifest) {
  return manifest ? manifest->entries.size() : 0;
}

const char* pgse_manifest_clean_path(const pgse_manifest* manifest,
                                     size_t index) {
  if (!manifest || index >= manifest->entries.size()) return nullptr;
  return manifest->entries[index].clean.c_str();
}

const char* pgse_manifest_degraded_path(const pgse_manifest* manifest,
                                        size_t index) {
  if (!manifest || index >= manifest->entries.size()) return nullptr;
  return manifest->entries[index].degraded.c_str();
}

const char* pgse_manifest_spec(const pgse_manifest* manifest, size_t index) {
  if (!manifest || index >= manifest->entries.size()) return nullptr;
  return manifest->entries[index].spec.c_str();
}

void pgse_manifest_free(pgse_manifest* manifest) { delete manifest; }

/* ---------------- codec ---------------- */

void pgse_codec_train_config_default(pgse_codec_train_config* config) {
  if (!config) return;
  config->groups = 4;
  config->codebook_size = 256;
  config->latent_dim = 32;
  config->mdct_half_window = 40;
  config->frames_per_token = 8;
  config->kmeans_iterations = 50;
  config->seed = 1;
  config->train_rvq = 1;
  config->sample_rate = 16000;
}

pgse_status pgse_codec_train(const pgse_audio* const* corpus, size_t count,
                             const pgse_codec_train_config* config,
                             pgse_codec** out) {
  if (!corpus || !config || !out) return bad_arg("pgse_codec_train");
  return wrap([&]() {
    if (config->groups < 1 || config->latent_dim % config->groups != 0) {
      throw paragse::ConfigError(
          "codec config: latent_dim must be divisible by groups");
    }
    auto buffers = copy_buffers(corpus, count);
    auto handle = std::make_unique<pgse_codec>();
    handle->model.linear = paragse::codec::fit_linear_codec(
        buffers, config->latent_dim,
        static_cast<int>(config->mdct_half_window),
        static_cast<int>(config->frames_per_token), config->sample_rate);

    paragse::Matrix latents(0, config->latent_dim);
    for (const auto& a : buffers) {
      paragse::Matrix l = paragse::codec::encode(a, handle->model.linear);
      size_t old = latents.rows;
      latents.rows += l.rows;
      latents.data.resize(latents.rows * latents.cols);
      std::copy(l.data.begin(), l.data.end(),
                latents.data.begin() + old * latents.cols);
    }

    paragse::codec::CodebookTrainConfig kcfg;
    kcfg.codebook_size = config->codebook_size;
    kcfg.iterations = config->kmeans_iterations;
    kcfg.seed = config->seed;
    handle->model.gvq =
        paragse::codec::train_codebooks_gvq(latents, config->groups, kcfg);
    if (config->train_rvq) {
      handle->model.rvq =
          paragse::codec::train_codebooks_rvq(latents, config->groups, kcfg);
    }
    *out = handle.release();
  });
}

pgse_status pgse_codec_save(const pgse_codec* codec, const char* path) {
  if (!codec || !path) return bad_arg("pgse_codec_save");
  return wrap([&]() { paragse::codec::save_codec_file(codec->model, path); });
}

pgse_status pgse_codec_load(const char* path, pgse_codec** out) {
  if (!path || !out) return bad_arg("pgse_codec_load");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_codec>();
    handle->model = paragse::codec::load_codec_file(path);
    *out = handle.release();
  });
}

pgse_status pgse_codec_info(const pgse_codec* codec, uint32_t* groups,
                            uint32_t* codebook_size, uint32_t* latent_dim,
                            uint32_t* mdct_half_window,
                            uint32_t* samples_per_token, int32_t* sample_rate,
                            int32_t* has_rvq) {
  if (!codec) return bad_arg("pgse_codec_info");
  if (groups) *groups = static_cast<uint32_t>(codec->model.groups());
  if (codebook_size) {
    *codebook_size = static_cast<uint32_t>(codec->model.codebook_size());
  }
  if (latent_dim) {
    *latent_dim = static_cast<uint32_t>(codec->model.latent_dim());
  }
  if (mdct_half_window) {
    *mdct_half_window =
        static_cast<uint32_t>(codec->model.linear.mdct_half_window);
  }
  if (samples_per_token) {
    *samples_per_token =
        static_cast<uint32_t>(codec->model.linear.samples_per_token());
  }
  if (sample_rate) *sample_rate = codec->model.linear.sample_rate;
  if (has_rvq) *has_rvq = codec->model.rvq ? 1 : 0;
  return PGSE_OK;
}

pgse_status pgse_codec_quantization_mse(const pgse_codec* codec,
                                        const pgse_audio* const* corpus,
                                        size_t count, int32_t use_rvq,
                                        double* out) {
  if (!codec || !corpus || !out) return bad_arg("pgse_codec_quantization_mse");
  return wrap([&]() {
    if (use_rvq && !codec->model.rvq) {
      throw paragse::ConfigError("codec has no residual quantizer");
    }
    auto buffers = collect(corpus, count);
    paragse::Matrix latents(0, codec->model.latent_dim());
    for (const auto* a : buffers) {
      paragse::Matrix l = paragse::codec::encode(*a, codec->model.linear);
      size_t old = latents.rows;
      latents.rows += l.rows;
      latents.data.resize(latents.rows * latents.cols);
      std::copy(l.data.begin(), l.data.end(),
                latents.data.begin() + old * latents.cols);
    }
    *out = use_rvq ? paragse::codec::rvq_mse(latents, *codec->model.rvq)
                   : paragse::codec::gvq_mse(latents, codec->model.gvq);
  });
}

pgse_status pgse_codec_tokenize(const pgse_codec* codec,
                                const pgse_audio* audio, int32_t use_rvq,
                                pgse_tokens** out) {
  if (!codec || !audio || !out) return bad_arg("pgse_codec_tokenize");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_tokens>();
    handle->seq =
        paragse::codec::tokenize(audio->buf, codec->model, use_rvq != 0);
    *out = handle.release();
  });
}

pgse_status pgse_codec_detokenize(const pgse_codec* codec,
                                  const pgse_tokens* tokens, int32_t use_rvq,
                                  size_t trim_to_length, pgse_audio** out) {
  if (!codec || !tokens || !out) return bad_arg("pgse_codec_detokenize");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_audio>();
    handle->buf =
        paragse::codec::detokenize(tokens->seq, codec->model, use_rvq != 0);
    if (trim_to_length > 0 && handle->buf.samples.size() > trim_to_length) {
      handle->buf.samples.resize(trim_to_length);
    }
    *out = handle.release();
  });
}

void pgse_codec_free(pgse_codec* codec) { delete codec; }

/* ---------------- tokens ---------------- */

size_t pgse_tokens_frames(const pgse_tokens* tokens) {
  return tokens ? tokens->seq.frames : 0;
}

size_t pgse_tokens_groups(const pgse_tokens* tokens) {
  return tokens ? tokens->seq.groups : 0;
}

pgse_status pgse_tokens_get(const pgse_tokens* tokens, size_t frame,
                            size_t group, uint32_t* out) {
  if (!tokens || !out) return bad_arg("pgse_tokens_get");
  if (frame >= tokens->seq.frames || group >= tokens->seq.groups) {
    g_last_error = "pgse_tokens_get: index out of range";
    return PGSE_ERR_INVALID_INPUT;
  }
  *out = tokens->seq.at(frame, group);
  return PGSE_OK;
}

pgse_status pgse_tokens_save_text(const pgse_tokens* tokens,
                                  const char* path) {
  if (!tokens || !path) return bad_arg("pgse_tokens_save_text");
  return wrap([&]() {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw paragse::IoError(std::string("cannot open ") + path);
    os << paragse::codec::tokens_to_text(tokens->seq);
    if (!os) throw paragse::IoError(std::string("write failed: ") + path);
  });
}

pgse_status pgse_tokens_load_text(const char* path, uint32_t codebook_size,
                                  pgse_tokens** out) {
  if (!path || !out) return bad_arg("pgse_tokens_load_text");
  return wrap([&]() {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw paragse::IoError(std::string("cannot open ") + path);
    std::string text((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
    auto handle = std::make_unique<pgse_tokens>();
    handle->seq = paragse::codec::tokens_from_text(text, codebook_size);
    *out = handle.release();
  });
}

void pgse_tokens_free(pgse_tokens* tokens) { delete tokens; }

/* ---------------- enhancer ---------------- */

void pgse_enhancer_train_config_default(pgse_enhancer_train_config* config) {
  if (!config) return;
  config->feature_dim = 64;
  config->hidden_dim = 128;
  config->learning_rate = 0.01;
  config->epochs = 50;
  config->batch = 32;
  config->seed = 1;
  config->serial = 0;
  config->context = 0;
  config->stft_frame_length = 320;
  config->stft_frame_shift = 40;
  config->stft_fft_size = 1024;
  config->stack_frames = 8;
}

pgse_status pgse_enhancer_train(const pgse_codec* codec,
                                const pgse_audio* const* degraded,
                                const pgse_audio* const* clean, size_t pairs,
                                const pgse_enhancer_train_config* config,
                                pgse_enhancer** out,
                                pgse_report** report_out) {
  if (!codec || !degraded || !clean || !config || !out) {
    return bad_arg("pgse_enhancer_train");
  }
  return wrap([&]() {
    paragse::enhance::ExtractorConfig ex;
    ex.frame_length = static_cast<int>(config->stft_frame_length);
    ex.frame_shift = static_cast<int>(config->stft_frame_shift);
    ex.fft_size = static_cast<int>(config->stft_fft_size);
    ex.stack_frames = static_cast<int>(config->stack_frames);

    const size_t groups = (config->serial && codec->model.rvq)
                              ? codec->model.rvq->stages()
                              : codec->model.groups();
    auto model = paragse::enhance::init_enhancer(
        groups, codec->model.codebook_size(), config->feature_dim,
        config->hidden_dim, config->serial != 0, ex, config->seed,
        config->context != 0);

    paragse::enhance::TrainConfig tc;
    tc.learning_rate = config->learning_rate;
    tc.epochs = config->epochs;
    tc.batch = config->batch;
    tc.seed = config->seed;

    auto deg = copy_buffers(degraded, pairs);
    auto cln = copy_buffers(clean, pairs);
    auto report =
        paragse::enhance::train_enhancer(model, codec->model, deg, cln, tc);

    auto handle = std::make_unique<pgse_enhancer>();
    handle->model = std::move(model);
    if (report_out) {
      auto rep = std::make_unique<pgse_report>();
      rep->report = std::move(report);
      *report_out = rep.release();
    }
    *out = handle.release();
  });
}

pgse_status pgse_enhancer_save(const pgse_enhancer* enhancer,
                               const char* path) {
  if (!enhancer || !path) return bad_arg("pgse_enhancer_save");
  return wrap(
      [&]() { paragse::enhance::save_enhancer_file(enhancer->model, path); });
}

pgse_status pgse_enhancer_load(const char* path, pgse_enhancer** out) {
  if (!path || !out) return bad_arg("pgse_enhancer_load");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_enhancer>();
    handle->model = paragse::enhance::load_enhancer_file(path);
    *out = handle.release();
  });
}

pgse_status pgse_enhancer_info(const pgse_enhancer* enhancer,
                               uint32_t* feature_dim, uint32_t* hidden_dim,
                               uint32_t* groups, uint32_t* vocab,
                               int32_t* serial, int32_t* context) {
  if (!enhancer) return bad_arg("pgse_enhancer_info");
  if (context) *context = enhancer->model.context ? 1 : 0;
  if (feature_dim) {
    *feature_dim = static_cast<uint32_t>(enhancer->model.feature_dim());
  }
  if (hidden_dim) {
    *hidden_dim = static_cast<uint32_t>(enhancer->model.hidden_dim());
  }
  if (groups) *groups = static_cast<uint32_t>(enhancer->model.groups());
  if (vocab) *vocab = static_cast<uint32_t>(enhancer->model.vocab());
  if (serial) *serial = enhancer->model.serial ? 1 : 0;
  return PGSE_OK;
}

pgse_status pgse_enhancer_make_serial(const pgse_enhancer* enhancer,
                                      pgse_enhancer** out) {
  if (!enhancer || !out) return bad_arg("pgse_enhancer_make_serial");
  return wrap([&]() {
    auto handle = std::make_unique<pgse_enhancer>();
    handle->model = paragse::enhance::make_serial_variant(enhancer->model);
    *out = handle.release();
  });
}

pgse_status pgse_enhance(const pgse_codec* codec,
                         const pgse_enhancer* enhancer,
                         const pgse_audio* degraded, int32_t workers,
                         pgse_audio** out, pgse_tokens** tokens_out) {
  if (!codec || !enhancer || !degraded || !out) return bad_arg("pgse_enhance");
  return wrap([&]() {
    auto tokens = paragse::enhance::predict_clean_tokens(
        enhancer->model, codec->model, degraded->buf, workers);
    auto audio = paragse::codec::detokenize(tokens, codec->model,
                                            enhancer->model.serial);
    if (audio.samples.size() > degraded->buf.samples.size()) {
      audio.samples.resize(degraded->buf.samples.size());
    }
    auto handle = std::make_unique<pgse_audio>();
    handle->buf = std::move(audio);
    if (tokens_out) {
      auto th = std::make_unique<pgse_tokens>();
      th->seq = std::move(tokens);
      *tokens_out = th.release();
    }
    *out = handle.release();
  });
}

void pgse_enhancer_free(pgse_enhancer* enhancer) { delete enhancer; }

/* ---------------- reports ---------------- */

size_t pgse_report_epochs(const pgse_report* report) {
  return report ? report->report.loss.size() : 0;
}

pgse_status pgse_report_loss(const pgse_report* report, size_t epoch,
                             double* out) {
  if (!report || !out) return bad_arg("pgse_report_loss");
  if (epoch >= report->report.loss.size()) {
    g_last_error = "pgse_report_loss: epoch out of range";
    return PGSE_ERR_INVALID_INPUT;
  }
  *out = report->report.loss[epoch];
  return PGSE_OK;
}

pgse_status pgse_report_branch_accuracy(const pgse_report* report,
                                        size_t epoch, size_t group,
                                        double* out) {
  if (!report || !out) return bad_arg("pgse_report_branch_accuracy");
  const auto& m = report->report.branch_accuracy;
  if (epoch >= m.rows || group >= m.cols) {
    g_last_error = "pgse_report_branch_accuracy: index out of range";
    return PGSE_ERR_INVALID_INPUT;
  }
  *out = m.at(epoch, group);
  return PGSE_OK;
}

pgse_status pgse_report_final_accuracy(const pgse_report* report, size_t group,
                                       double* out) {
  if (!report || !out) return bad_arg("pgse_report_final_accuracy");
  if (group >= report->report.final_accuracy.size()) {
    g_last_error = "pgse_report_final_accuracy: group out of range";
    return PGSE_ERR_INVALID_INPUT;
  }
  *out = report->report.final_accuracy[group];
  return PGSE_OK;
}

void pgse_report_free(pgse_report* report) { delete report; }

/* ---------------- metrics ---------------- */

pgse_status pgse_metric_lsd(const pgse_audio* reference,
                            const pgse_audio* test, double* out) {
  if (!reference || !test || !out) return bad_arg("pgse_metric_lsd");
  return wrap(
      [&]() { *out = paragse::metrics::lsd(reference->buf, test->buf); });
}

pgse_status pgse_metric_snr(const pgse_audio* clean, const pgse_audio* noisy,
                            double* out) {
  if (!clean || !noisy || !out) return bad_arg("pgse_metric_snr");
  return wrap(
      [&]() { *out = paragse::metrics::measure_snr(clean->buf, noisy->buf); });
}

pgse_status pgse_metric_token_accuracy(const pgse_tokens* predicted,
                                       const pgse_tokens* target,
                                       double* per_branch, double* overall) {
  if (!predicted || !target || !overall) {
    return bad_arg("pgse_metric_token_accuracy");
  }
  return wrap([&]() {
    auto acc = paragse::metrics::token_accuracy(predicted->seq, target->seq);
    if (per_branch) {
      std::copy(acc.per_branch.begin(), acc.per_branch.end(), per_branch);
    }
    *overall = acc.overall;
  });
}

pgse_status pgse_bench_enhance(const pgse_codec* codec,
                               const pgse_enhancer* enhancer,
                               const pgse_audio* audio, int32_t workers,
                               int32_t repeats, pgse_rtf_report* out) {
  if (!codec || !enhancer || !audio || !out) {
    return bad_arg("pgse_bench_enhance");
  }
  return wrap([&]() {
    const std::string name = enhancer->model.serial ? "serial" : "parallel";
    auto pipeline = [&](const paragse::AudioBuffer& a) {
      paragse::enhance::enhance(enhancer->model, codec->model, a, workers);
    };
    auto report = paragse::metrics::bench_rtf(pipeline, audio->buf, workers,
                                              repeats, name);
    out->wall_seconds = report.wall_seconds;
    out->audio_seconds = report.audio_seconds;
    out->rtf = report.rtf;
    out->speedup_vs_realtime = report.speedup_vs_realtime;
    out->workers = report.workers;
    std::snprintf(out->pipeline, sizeof(out->pipeline), "%s",
                  report.pipeline.c_str());
    std::snprintf(out->hardware, sizeof(out->hardware), "%s",
                  report.hardware.c_str());
  });
}

} /* extern "C" */
