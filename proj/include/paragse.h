/*
 * Copyright 2026 The ParaGSE Authors
 * License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
 *
 * C interface to the ParaGSE toolkit: group-vector-quantized speech
 * tokens, parallel clean-token prediction, degradation simulation, and
 * evaluation metrics.
 *
 * Conventions:
 *   - Every fallible function returns a pgse_status; PGSE_OK is 0.
 *     pgse_last_error() returns a thread-local message for the most
 *     recent failure on the calling thread.
 *   - Objects are opaque handles created into out-parameters and
 *     released with the matching *_free function. Out-parameters are
 *     written only on success.
 *   - Token indices are 1-based, in [1, codebook_size].
 *   - Model files are little-endian binary containers ("GVQC" for
 *     codecs, "PGSE" for enhancers).
 */

#ifndef PARAGSE_H
#define PARAGSE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define PGSE_API __attribute__((visibility("default")))

typedef enum pgse_status {
  PGSE_OK = 0,
  PGSE_ERR_BAD_ARG = 1,           /* null handle / bad pointer use */
  PGSE_ERR_INVALID_INPUT = 2,     /* data violates a precondition */
  PGSE_ERR_CONFIG = 3,            /* inconsistent configuration */
  PGSE_ERR_INSUFFICIENT_DATA = 4, /* corpus too small */
  PGSE_ERR_IO = 5,                /* file read/write/parse failure */
  PGSE_ERR_LOOKUP = 6,            /* missing asset or entry */
  PGSE_ERR_DEGENERATE = 7,        /* degenerate input (e.g. zero power) */
  PGSE_ERR_DIVERGENCE = 8,        /* training lost numeric stability */
  PGSE_ERR_INTERNAL = 9
} pgse_status;

typedef struct pgse_audio pgse_audio;
typedef struct pgse_codec pgse_codec;
typedef struct pgse_enhancer pgse_enhancer;
typedef struct pgse_tokens pgse_tokens;
typedef struct pgse_report pgse_report;
typedef struct pgse_manifest pgse_manifest;
typedef struct pgse_assets pgse_assets;

PGSE_API const char* pgse_version(void);
PGSE_API const char* pgse_status_name(pgse_status status);
/* Message for the most recent failure on this thread; never NULL. */
PGSE_API const char* pgse_last_error(void);

/* ------------------------------------------------------------------ */
/* Audio buffers (mono, double samples, nominal range [-1, 1])        */

PGSE_API pgse_status pgse_audio_create(const double* samples, size_t count,
                                       int32_t sample_rate, pgse_audio** out);
PGSE_API pgse_status pgse_audio_from_wav(const char* path, pgse_audio** out);
PGSE_API pgse_status pgse_audio_to_wav(const pgse_audio* audio,
                                       const char* path);
PGSE_API size_t pgse_audio_length(const pgse_audio* audio);
PGSE_API int32_t pgse_audio_sample_rate(const pgse_audio* audio);
/* Copies up to capacity samples; sets *written to the amount copied. */
PGSE_API pgse_status pgse_audio_samples(const pgse_audio* audio, double* out,
                                        size_t capacity, size_t* written);
PGSE_API pgse_status pgse_audio_resample(const pgse_audio* audio,
                                         int32_t target_rate,
                                         pgse_audio** out);
PGSE_API void pgse_audio_free(pgse_audio* audio);

/* ------------------------------------------------------------------ */
/* Synthetic signals (seeded, deterministic)                          */

PGSE_API pgse_status pgse_synth_speech(double seconds, int32_t sample_rate,
                                       uint64_t seed, pgse_audio** out);
/* kind: "white" | "pink" | "babble" */
PGSE_API pgse_status pgse_synth_noise(const char* kind, size_t length,
                                      int32_t sample_rate, uint64_t seed,
                                      pgse_audio** out);
PGSE_API pgse_status pgse_synth_rir(double rt60_seconds,
                                    double duration_seconds,
                                    int32_t sample_rate, uint64_t seed,
                                    pgse_audio** out);

/* ------------------------------------------------------------------ */
/* Degradation                                                        */

/* The named noise/RIR assets a degradation spec can reference. */
PGSE_API pgse_status pgse_assets_create(uint64_t seed, int32_t sample_rate,
                                        pgse_assets** out);
PGSE_API void pgse_assets_free(pgse_assets* assets);

PGSE_API pgse_status pgse_degrade_add_noise(const pgse_audio* clean,
                                            const pgse_audio* noise,
                                            double snr_db, uint64_t seed,
                                            pgse_audio** out);
PGSE_API pgse_status pgse_degrade_convolve_rir(const pgse_audio* clean,
                                               const pgse_audio* rir,
                                               pgse_audio** out);
PGSE_API pgse_status pgse_degrade_band_limit(const pgse_audio* audio,
                                             int32_t target_hz,
                                             pgse_audio** out);
/* spec_text example: "reverb(rir1);noise(white0,7.5);bandlimit(8000);seed=17"
 * or "identity;seed=1". */
PGSE_API pgse_status pgse_degrade_apply(const pgse_audio* clean,
                                        const char* spec_text,
                                        const pgse_assets* assets,
                                        pgse_audio** out);

/* ------------------------------------------------------------------ */
/* Corpus generation and manifests                                    */

typedef struct pgse_corpus_config {
  const char* task; /* identity | denoise | dereverb | bandlimit | mixed */
  int32_t count;
  double utterance_seconds;
  int32_t sample_rate;
  uint64_t seed;
  const double* snr_grid; /* may be NULL for the default {0,5,10,15} */
  uint32_t snr_grid_len;
  int32_t bandlimit_hz; /* used by bandlimit/mixed tasks */
} pgse_corpus_config;

PGSE_API pgse_status pgse_corpus_make(const pgse_corpus_config* config,
                                      const char* out_dir);
PGSE_API pgse_status pgse_manifest_load(const char* path, pgse_manifest** out);
PGSE_API size_t pgse_manifest_size(const pgse_manifest* manifest);
/* Returned strings stay owned by the manifest handle. Paths are resolved
 * against the manifest location. */
PGSE_API const char* pgse_manifest_clean_path(const pgse_manifest* manifest,
                                              size_t index);
PGSE_API const char* pgse_manifest_degraded_path(const pgse_manifest* manifest,
                                                 size_t index);
PGSE_API const char* pgse_manifest_spec(const pgse_manifest* manifest,
                                        size_t index);
PGSE_API void pgse_manifest_free(pgse_manifest* manifest);

/* ------------------------------------------------------------------ */
/* Codec: linear analysis/synthesis + grouped / residual quantizers   */

typedef struct pgse_codec_train_config {
  uint32_t groups;           /* N */
  uint32_t codebook_size;    /* M */
  uint32_t latent_dim;       /* K, divisible by N */
  uint32_t mdct_half_window; /* W, even */
  uint32_t frames_per_token; /* MDCT frames stacked per token (T = W * this) */
  uint32_t kmeans_iterations;
  uint64_t seed;
  int32_t train_rvq; /* also fit the serial residual quantizer */
  int32_t sample_rate;
} pgse_codec_train_config;

/* Fills in the library defaults (N=4, M=256, K=32, W=40, T=320, 16 kHz). */
PGSE_API void pgse_codec_train_config_default(pgse_codec_train_config* config);

PGSE_API pgse_status pgse_codec_train(const pgse_audio* const* corpus,
                                      size_t count,
                                      const pgse_codec_train_config* config,
                                      pgse_codec** out);
PGSE_API pgse_status pgse_codec_save(const pgse_codec* codec,
                                     const char* path);
PGSE_API pgse_status pgse_codec_load(const char* path, pgse_codec** out);
/* Any out-pointer may be NULL. */
PGSE_API pgse_status pgse_codec_info(const pgse_codec* codec, uint32_t* groups,
                                     uint32_t* codebook_size,
                                     uint32_t* latent_dim,
                                     uint32_t* mdct_half_window,
                                     uint32_t* samples_per_token,
                                     int32_t* sample_rate, int32_t* has_rvq);
/* Mean squared quantization error of the corpus latents. */
PGSE_API pgse_status pgse_codec_quantization_mse(const pgse_codec* codec,
                                                 const pgse_audio* const* corpus,
                                                 size_t count, int32_t use_rvq,
                                                 double* out);
PGSE_API pgse_status pgse_codec_tokenize(const pgse_codec* codec,
                                         const pgse_audio* audio,
                                         int32_t use_rvq, pgse_tokens** out);
/* trim_to_length 0 keeps the natural frames * samples_per_token length. */
PGSE_API pgse_status pgse_codec_detokenize(const pgse_codec* codec,
                                           const pgse_tokens* tokens,
                                           int32_t use_rvq,
                                           size_t trim_to_length,
                                           pgse_audio** out);
PGSE_API void pgse_codec_free(pgse_codec* codec);

/* ------------------------------------------------------------------ */
/* Token sequences                                                    */

PGSE_API size_t pgse_tokens_frames(const pgse_tokens* tokens);
PGSE_API size_t pgse_tokens_groups(const pgse_tokens* tokens);
PGSE_API pgse_status pgse_tokens_get(const pgse_tokens* tokens, size_t frame,
                                     size_t group, uint32_t* out);
/* Text form: one frame per line, N space-separated 1-based indices. */
PGSE_API pgse_status pgse_tokens_save_text(const pgse_tokens* tokens,
                                           const char* path);
PGSE_API pgse_status pgse_tokens_load_text(const char* path,
                                           uint32_t codebook_size,
                                           pgse_tokens** out);
PGSE_API void pgse_tokens_free(pgse_tokens* tokens);

/* ------------------------------------------------------------------ */
/* Enhancer: spectral feature extractor + per-group branches          */

typedef struct pgse_enhancer_train_config {
  uint32_t feature_dim; /* C */
  uint32_t hidden_dim;  /* H */
  double learning_rate;
  uint32_t epochs;
  uint32_t batch;
  uint64_t seed;
  int32_t serial; /* train the serial-conditioning baseline over the RVQ */
  int32_t context; /* feed each branch the previous/current/next features */
  uint32_t stft_frame_length;
  uint32_t stft_frame_shift;
  uint32_t stft_fft_size;
  uint32_t stack_frames; /* R; frame_shift * R must equal the codec T */
} pgse_enhancer_train_config;

/* Library defaults: C=64, H=128, lr=0.01, 50 epochs, batch 32,
 * STFT 320/40/1024, R=8. */
PGSE_API void pgse_enhancer_train_config_default(
    pgse_enhancer_train_config* config);

PGSE_API pgse_status pgse_enhancer_train(
    const pgse_codec* codec, const pgse_audio* const* degraded,
    const pgse_audio* const* clean, size_t pairs,
    const pgse_enhancer_train_config* config, pgse_enhancer** out,
    pgse_report** report_out /* optional */);
PGSE_API pgse_status pgse_enhancer_save(const pgse_enhancer* enhancer,
                                        const char* path);
PGSE_API pgse_status pgse_enhancer_load(const char* path,
                                        pgse_enhancer** out);
PGSE_API pgse_status pgse_enhancer_info(const pgse_enhancer* enhancer,
                                        uint32_t* feature_dim,
                                        uint32_t* hidden_dim, uint32_t* groups,
                                        uint32_t* vocab, int32_t* serial,
                                        int32_t* context);
/* Serial-conditioning twin of a parallel enhancer (same weights where
 * shapes match); used for efficiency comparisons on the RVQ path. */
PGSE_API pgse_status pgse_enhancer_make_serial(const pgse_enhancer* enhancer,
                                               pgse_enhancer** out);
/* Full pipeline; tokens_out (optional) receives the predicted clean
 * tokens. Output is identical for every worker count. */
PGSE_API pgse_status pgse_enhance(const pgse_codec* codec,
                                  const pgse_enhancer* enhancer,
                                  const pgse_audio* degraded, int32_t workers,
                                  pgse_audio** out, pgse_tokens** tokens_out);
PGSE_API void pgse_enhancer_free(pgse_enhancer* enhancer);

/* ------------------------------------------------------------------ */
/* Training reports                                                   */

PGSE_API size_t pgse_report_epochs(const pgse_report* report);
PGSE_API pgse_status pgse_report_loss(const pgse_report* report, size_t epoch,
                                      double* out);
PGSE_API pgse_status pgse_report_branch_accuracy(const pgse_report* report,
                                                 size_t epoch, size_t group,
                                                 double* out);
PGSE_API pgse_status pgse_report_final_accuracy(const pgse_report* report,
                                                size_t group, double* out);
PGSE_API void pgse_report_free(pgse_report* report);

/* ------------------------------------------------------------------ */
/* Metrics and benchmarking                                           */

PGSE_API pgse_status pgse_metric_lsd(const pgse_audio* reference,
                                     const pgse_audio* test, double* out);
PGSE_API pgse_status pgse_metric_snr(const pgse_audio* clean,
                                     const pgse_audio* noisy, double* out);
/* per_branch may be NULL; otherwise it must hold groups() entries. */
PGSE_API pgse_status pgse_metric_token_accuracy(const pgse_tokens* predicted,
                                                const pgse_tokens* target,
                                                double* per_branch,
                                                double* overall);

typedef struct pgse_rtf_report {
  double wall_seconds; /* median over the timed repeats */
  double audio_seconds;
  double rtf;
  double speedup_vs_realtime;
  int32_t workers;
  char pipeline[48];
  char hardware[160];
} pgse_rtf_report;

/* One warm-up plus `repeats` timed runs of the enhancement pipeline. */
PGSE_API pgse_status pgse_bench_enhance(const pgse_codec* codec,
                                        const pgse_enhancer* enhancer,
                                        const pgse_audio* audio,
                                        int32_t workers, int32_t repeats,
                                        pgse_rtf_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PARAGSE_H */
