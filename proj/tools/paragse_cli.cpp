// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line front end for the ParaGSE toolkit. Talks to the library
// exclusively through the public C interface.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "paragse.h"

namespace {

// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numeric divergence.
int exit_code_for(pgse_status status) {
  switch (status) {
    case PGSE_OK: return 0;
    case PGSE_ERR_BAD_ARG:
    case PGSE_ERR_CONFIG: return 2;
    case PGSE_ERR_DIVERGENCE: return 4;
    default: return 3;
  }
}

[[noreturn]] void die(pgse_status status) {
  std::fprintf(stderr, "error (%s): %s\n", pgse_status_name(status),
               pgse_last_error());
  std::exit(exit_code_for(status));
}

[[noreturn]] void die_config(const std::string& message) {
  std::fprintf(stderr, "error (config): %s\n", message.c_str());
  std::exit(2);
}

void require(pgse_status status) {
  if (status != PGSE_OK) die(status);
}

struct AudioPtr {
  pgse_audio* p = nullptr;
  ~AudioPtr() { pgse_audio_free(p); }
};

// All tunables one run can carry; sub-structs mirror the C API configs.
struct ToolConfig {
  uint64_t seed = 1;
  int workers = 1;
  pgse_codec_train_config codec{};
  pgse_enhancer_train_config enhancer{};
  std::string corpus_task = "denoise";
  int corpus_count = 20;
  double corpus_seconds = 4.0;
  int corpus_rate = 16000;
  std::vector<double> snr_grid = {0.0, 5.0, 10.0, 15.0};
  int bandlimit_hz = 8000;

  ToolConfig() {
    pgse_codec_train_config_default(&codec);
    pgse_enhancer_train_config_default(&enhancer);
    if (const char* env = std::getenv("PARAGSE_SEED")) {
      seed = std::strtoull(env, nullptr, 10);
    }
  }

  void apply_seed_everywhere() {
    codec.seed = seed;
    enhancer.seed = seed;
  }
};

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t pos = 0;
    double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument(item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument(v);
}

// Run configuration file: '#' comments and `key = value` lines. Unknown
// keys are hard errors so typos cannot silently change an experiment.
void load_config_file(const std::string& path, ToolConfig& cfg) {
  std::ifstream is(path);
  if (!is) die_config("cannot open config file: " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      die_config(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    try {
      if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "workers") cfg.workers = std::stoi(value);
      else if (key == "codec.groups") cfg.codec.groups = std::stoul(value);
      else if (key == "codec.codebook_size") cfg.codec.codebook_size = std::stoul(value);
      else if (key == "codec.latent_dim") cfg.codec.latent_dim = std::stoul(value);
      else if (key == "codec.half_window") cfg.codec.mdct_half_window = std::stoul(value);
      else if (key == "codec.frames_per_token") cfg.codec.frames_per_token = std::stoul(value);
      else if (key == "codec.kmeans_iters") cfg.codec.kmeans_iterations = std::stoul(value);
      else if (key == "codec.train_rvq") cfg.codec.train_rvq = parse_bool(value);
      else if (key == "codec.sample_rate") cfg.codec.sample_rate = std::stoi(value);
      else if (key == "enhancer.feature_dim") cfg.enhancer.feature_dim = std::stoul(value);
      else if (key == "enhancer.hidden_dim") cfg.enhancer.hidden_dim = std::stoul(value);
      else if (key == "enhancer.learning_rate") cfg.enhancer.learning_rate = std::stod(value);
      else if (key == "enhancer.epochs") cfg.enhancer.epochs = std::stoul(value);
      else if (key == "enhancer.batch") cfg.enhancer.batch = std::stoul(value);
      else if (key == "enhancer.serial") cfg.enhancer.serial = parse_bool(value);
      else if (key == "enhancer.context") cfg.enhancer.context = parse_bool(value);
      else if (key == "enhancer.stft_frame_length") cfg.enhancer.stft_frame_length = std::stoul(value);
      else if (key == "enhancer.stft_frame_shift") cfg.enhancer.stft_frame_shift = std::stoul(value);
      else if (key == "enhancer.stft_fft_size") cfg.enhancer.stft_fft_size = std::stoul(value);
      else if (key == "enhancer.stack_frames") cfg.enhancer.stack_frames = std::stoul(value);
      else if (key == "corpus.task") cfg.corpus_task = value;
      else if (key == "corpus.count") cfg.corpus_count = std::stoi(value);
      else if (key == "corpus.seconds") cfg.corpus_seconds = std::stod(value);
      else if (key == "corpus.sample_rate") cfg.corpus_rate = std::stoi(value);
      else if (key == "corpus.snr_grid") cfg.snr_grid = parse_double_list(value);
      else if (key == "corpus.bandlimit_hz") cfg.bandlimit_hz = std::stoi(value);
      else die_config(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const std::exception&) {
      die_config(path + ":" + std::to_string(lineno) + ": bad value for '" +
                 key + "'");
    }
  }
}

struct LoadedPairs {
  std::vector<pgse_audio*> degraded;
  std::vector<pgse_audio*> clean;
  ~LoadedPairs() {
    for (auto* a : degraded) pgse_audio_free(a);
    for (auto* a : clean) pgse_audio_free(a);
  }
};

void load_manifest_pairs(const std::string& manifest_path, LoadedPairs& out) {
  pgse_manifest* manifest = nullptr;
  require(pgse_manifest_load(manifest_path.c_str(), &manifest));
  const size_t n = pgse_manifest_size(manifest);
  for (size_t i = 0; i < n; ++i) {
    pgse_audio* clean = nullptr;
    pgse_audio* degraded = nullptr;
    require(pgse_audio_from_wav(pgse_manifest_clean_path(manifest, i), &clean));
    out.clean.push_back(clean);
    require(
        pgse_audio_from_wav(pgse_manifest_degraded_path(manifest, i), &degraded));
    out.degraded.push_back(degraded);
  }
  pgse_manifest_free(manifest);
  if (out.clean.empty()) {
    std::fprintf(stderr, "error (insufficient-data): manifest %s is empty\n",
                 manifest_path.c_str());
    std::exit(3);
  }
}

/* ---------------- subcommands ---------------- */

int cmd_make_corpus(const ToolConfig& cfg, const std::string& out_dir,
                    bool test_grid) {
  pgse_corpus_config cc{};
  cc.task = cfg.corpus_task.c_str();
  cc.count = cfg.corpus_count;
  cc.utterance_seconds = cfg.corpus_seconds;
  cc.sample_rate = cfg.corpus_rate;
  cc.seed = cfg.seed;
  std::vector<double> grid = cfg.snr_grid;
  if (test_grid) grid = {2.5, 7.5, 12.5, 17.5};
  cc.snr_grid = grid.data();
  cc.snr_grid_len = static_cast<uint32_t>(grid.size());
  cc.bandlimit_hz = cfg.bandlimit_hz;
  require(pgse_corpus_make(&cc, out_dir.c_str()));
  std::printf("manifest=%s/manifest.txt\n", out_dir.c_str());
  std::printf("task=%s pairs=%d seed=%llu\n", cfg.corpus_task.c_str(),
              cfg.corpus_count, static_cast<unsigned long long>(cfg.seed));
  return 0;
}

int cmd_train_codec(const ToolConfig& cfg, const std::string& manifest,
                    const std::string& out_path) {
  LoadedPairs pairs;
  load_manifest_pairs(manifest, pairs);

  pgse_codec* codec = nullptr;
  require(pgse_codec_train(
      const_cast<const pgse_audio* const*>(pairs.clean.data()),
      pairs.clean.size(), &cfg.codec, &codec));
  require(pgse_codec_save(codec, out_path.c_str()));

  double gvq_mse = 0.0;
  require(pgse_codec_quantization_mse(
      codec, const_cast<const pgse_audio* const*>(pairs.clean.data()),
      pairs.clean.size(), 0, &gvq_mse));
  std::printf("model=%s\n", out_path.c_str());
  std::printf("gvq_mse=%.9g\n", gvq_mse);
  int32_t has_rvq = 0;
  pgse_codec_info(codec, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                  &has_rvq);
  if (has_rvq) {
    double rvq_mse = 0.0;
    require(pgse_codec_quantization_mse(
        codec, const_cast<const pgse_audio* const*>(pairs.clean.data()),
        pairs.clean.size(), 1, &rvq_mse));
    std::printf("rvq_mse=%.9g\n", rvq_mse);
  }
  pgse_codec_free(codec);
  return 0;
}

int cmd_train_enhancer(const ToolConfig& cfg, const std::string& manifest,
                       const std::string& codec_path,
                       const std::string& out_path,
                       const std::string& report_path) {
  pgse_codec* codec = nullptr;
  require(pgse_codec_load(codec_path.c_str(), &codec));

  LoadedPairs pairs;
  load_manifest_pairs(manifest, pairs);

  pgse_enhancer* enhancer = nullptr;
  pgse_report* report = nullptr;
  require(pgse_enhancer_train(
      codec, const_cast<const pgse_audio* const*>(pairs.degraded.data()),
      const_cast<const pgse_audio* const*>(pairs.clean.data()),
      pairs.clean.size(), &cfg.enhancer, &enhancer, &report));
  require(pgse_enhancer_save(enhancer, out_path.c_str()));

  uint32_t groups = 0;
  pgse_enhancer_info(enhancer, nullptr, nullptr, &groups, nullptr, nullptr,
                     nullptr);
  const size_t epochs = pgse_report_epochs(report);
  std::ostringstream table;
  table << "# epoch\tloss";
  for (uint32_t g = 0; g < groups; ++g) table << "\tacc_branch" << (g + 1);
  table << '\n';
  for (size_t e = 0; e < epochs; ++e) {
    double loss = 0.0;
    require(pgse_report_loss(report, e, &loss));
    table << e << '\t' << loss;
    for (uint32_t g = 0; g < groups; ++g) {
      double acc = 0.0;
      require(pgse_report_branch_accuracy(report, e, g, &acc));
      table << '\t' << acc;
    }
    table << '\n';
  }
  std::printf("model=%s\n", out_path.c_str());
  std::printf("epochs=%zu\n", epochs);
  double first = 0.0, last = 0.0;
  pgse_report_loss(report, 0, &first);
  pgse_report_loss(report, epochs - 1, &last);
  std::printf("loss_first=%.9g loss_last=%.9g\n", first, last);
  for (uint32_t g = 0; g < groups; ++g) {
    double acc = 0.0;
    require(pgse_report_final_accuracy(report, g, &acc));
    std::printf("final_accuracy_branch%u=%.6f\n", g + 1, acc);
  }
  if (!report_path.empty()) {
    std::ofstream os(report_path, std::ios::binary);
    if (!os) die_config("cannot write report file: " + report_path);
    os << table.str();
  }
  pgse_report_free(report);
  pgse_enhancer_free(enhancer);
  pgse_codec_free(codec);
  return 0;
}

int cmd_enhance(const ToolConfig& cfg, const std::string& in_path,
                const std::string& out_path, const std::string& codec_path,
                const std::string& enhancer_path, const std::string& mode,
                const std::string& dump_tokens) {
  pgse_codec* codec = nullptr;
  pgse_enhancer* enhancer = nullptr;
  require(pgse_codec_load(codec_path.c_str(), &codec));
  require(pgse_enhancer_load(enhancer_path.c_str(), &enhancer));

  int32_t serial = 0;
  pgse_enhancer_info(enhancer, nullptr, nullptr, nullptr, nullptr, &serial,
                     nullptr);
  if (!mode.empty()) {
    if (mode != "parallel" && mode != "serial") {
      die_config("--mode must be 'parallel' or 'serial'");
    }
    if ((mode == "serial") != (serial != 0)) {
      die_config("--mode " + mode + " does not match the enhancer model (" +
                 (serial ? "serial" : "parallel") + ")");
    }
  }

  AudioPtr input, output;
  require(pgse_audio_from_wav(in_path.c_str(), &input.p));
  pgse_tokens* tokens = nullptr;
  require(pgse_enhance(codec, enhancer, input.p, cfg.workers, &output.p,
                       dump_tokens.empty() ? nullptr : &tokens));
  require(pgse_audio_to_wav(output.p, out_path.c_str()));
  if (tokens) {
    require(pgse_tokens_save_text(tokens, dump_tokens.c_str()));
    pgse_tokens_free(tokens);
  }
  std::printf("output=%s\n", out_path.c_str());
  std::printf("samples=%zu sample_rate=%d mode=%s workers=%d\n",
              pgse_audio_length(output.p), pgse_audio_sample_rate(output.p),
              serial ? "serial" : "parallel", cfg.workers);
  pgse_enhancer_free(enhancer);
  pgse_codec_free(codec);
  return 0;
}

int cmd_eval(const ToolConfig& cfg, const std::string& manifest_path,
             const std::string& codec_path, const std::string& enhancer_path,
             const std::string& out_path, const std::string& table_path) {
  pgse_codec* codec = nullptr;
  pgse_enhancer* enhancer = nullptr;
  require(pgse_codec_load(codec_path.c_str(), &codec));
  require(pgse_enhancer_load(enhancer_path.c_str(), &enhancer));
  int32_t serial = 0;
  pgse_enhancer_info(enhancer, nullptr, nullptr, nullptr, nullptr, &serial,
                     nullptr);

  pgse_manifest* manifest = nullptr;
  require(pgse_manifest_load(manifest_path.c_str(), &manifest));
  const size_t n = pgse_manifest_size(manifest);

  struct Row {
    size_t index;
    double lsd_degraded, lsd_enhanced, snr_degraded, token_acc_degraded,
        token_acc_enhanced;
  };
  std::vector<Row> rows;
  std::vector<std::string> failures;

  for (size_t i = 0; i < n; ++i) {
    AudioPtr clean, degraded, enhanced;
    pgse_status st =
        pgse_audio_from_wav(pgse_manifest_clean_path(manifest, i), &clean.p);
    if (st == PGSE_OK) {
      st = pgse_audio_from_wav(pgse_manifest_degraded_path(manifest, i),
                               &degraded.p);
    }
    if (st != PGSE_OK) {
      failures.push_back(std::string("entry ") + std::to_string(i) + ": " +
                         pgse_last_error());
      continue;
    }

    pgse_tokens* predicted = nullptr;
    st = pgse_enhance(codec, enhancer, degraded.p, cfg.workers, &enhanced.p,
                      &predicted);
    if (st != PGSE_OK) die(st);

    Row row{};
    row.index = i;
    require(pgse_metric_lsd(clean.p, degraded.p, &row.lsd_degraded));
    require(pgse_metric_lsd(clean.p, enhanced.p, &row.lsd_enhanced));
    pgse_status snr_st = pgse_metric_snr(clean.p, degraded.p, &row.snr_degraded);
    if (snr_st == PGSE_ERR_DEGENERATE) {
      row.snr_degraded = INFINITY;  // identical pair: no noise at all
    } else if (snr_st != PGSE_OK) {
      die(snr_st);
    }

    pgse_tokens* target = nullptr;
    pgse_tokens* degraded_tokens = nullptr;
    require(pgse_codec_tokenize(codec, clean.p, serial, &target));
    require(pgse_codec_tokenize(codec, degraded.p, serial, &degraded_tokens));
    require(pgse_metric_token_accuracy(degraded_tokens, target, nullptr,
                                       &row.token_acc_degraded));
    require(pgse_metric_token_accuracy(predicted, target, nullptr,
                                       &row.token_acc_enhanced));
    pgse_tokens_free(predicted);
    pgse_tokens_free(target);
    pgse_tokens_free(degraded_tokens);
    rows.push_back(row);
  }

  if (rows.empty()) {
    std::fprintf(stderr, "error (io): no manifest entry could be evaluated\n");
    for (const auto& f : failures) std::fprintf(stderr, "  %s\n", f.c_str());
    std::exit(3);
  }

  auto mean = [&](double Row::*field) {
    double acc = 0.0;
    for (const auto& r : rows) acc += r.*field;
    return acc / static_cast<double>(rows.size());
  };

  std::ostringstream report;
  report.precision(17);
  report << "utterances=" << rows.size() << '\n'
         << "failures=" << failures.size() << '\n'
         << "mean_lsd_degraded=" << mean(&Row::lsd_degraded) << '\n'
         << "mean_lsd_enhanced=" << mean(&Row::lsd_enhanced) << '\n'
         << "mean_snr_degraded_db=" << mean(&Row::snr_degraded) << '\n'
         << "mean_token_accuracy_degraded=" << mean(&Row::token_acc_degraded)
         << '\n'
         << "mean_token_accuracy_enhanced=" << mean(&Row::token_acc_enhanced)
         << '\n';
  for (const auto& f : failures) report << "failure=" << f << '\n';

  std::fputs(report.str().c_str(), stdout);
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) die_config("cannot write report: " + out_path);
    os << report.str();
  }
  if (!table_path.empty()) {
    std::ofstream os(table_path, std::ios::binary);
    if (!os) die_config("cannot write table: " + table_path);
    os.precision(17);
    os << "# utt\tlsd_degraded\tlsd_enhanced\tsnr_degraded_db\t"
          "token_acc_degraded\ttoken_acc_enhanced\n";
    for (const auto& r : rows) {
      os << r.index << '\t' << r.lsd_degraded << '\t' << r.lsd_enhanced << '\t'
         << r.snr_degraded << '\t' << r.token_acc_degraded << '\t'
         << r.token_acc_enhanced << '\n';
    }
  }
  pgse_manifest_free(manifest);
  pgse_enhancer_free(enhancer);
  pgse_codec_free(codec);
  return 0;
}

int cmd_bench(const ToolConfig& cfg, const std::string& codec_path,
              const std::string& enhancer_path,
              const std::string& serial_enhancer_path, double duration,
              const std::vector<int>& workers_list, int repeats,
              const std::string& out_path) {
  pgse_codec* codec = nullptr;
  pgse_enhancer* enhancer = nullptr;
  require(pgse_codec_load(codec_path.c_str(), &codec));
  require(pgse_enhancer_load(enhancer_path.c_str(), &enhancer));
  int32_t serial = 0;
  pgse_enhancer_info(enhancer, nullptr, nullptr, nullptr, nullptr, &serial,
                     nullptr);
  if (serial) die_config("bench expects a parallel enhancer via --enhancer");

  int32_t rate = 0;
  require(pgse_codec_info(codec, nullptr, nullptr, nullptr, nullptr, nullptr,
                          &rate, nullptr));

  pgse_enhancer* serial_model = nullptr;
  if (!serial_enhancer_path.empty()) {
    require(pgse_enhancer_load(serial_enhancer_path.c_str(), &serial_model));
    int32_t s = 0;
    pgse_enhancer_info(serial_model, nullptr, nullptr, nullptr, nullptr, &s,
                       nullptr);
    if (!s) die_config("--serial-enhancer model is not serial");
  } else {
    // Same weights, serial conditioning: an apples-to-apples timing rival.
    require(pgse_enhancer_make_serial(enhancer, &serial_model));
  }

  AudioPtr audio;
  require(pgse_synth_speech(duration, rate, cfg.seed, &audio.p));

  std::ostringstream table;
  table << "# pipeline\tworkers\trtf\tspeedup_vs_realtime\twall_seconds\t"
           "audio_seconds\n";
  double parallel_best_wall = 0.0;
  for (int w : workers_list) {
    pgse_rtf_report rep{};
    require(pgse_bench_enhance(codec, enhancer, audio.p, w, repeats, &rep));
    std::printf("pipeline=parallel workers=%d rtf=%.6f speedup=%.2f\n", w,
                rep.rtf, rep.speedup_vs_realtime);
    table << "parallel\t" << w << '\t' << rep.rtf << '\t'
          << rep.speedup_vs_realtime << '\t' << rep.wall_seconds << '\t'
          << rep.audio_seconds << '\n';
    parallel_best_wall = rep.wall_seconds;  // last entry: highest worker count
  }

  pgse_rtf_report ser{};
  require(pgse_bench_enhance(codec, serial_model, audio.p, 1, repeats, &ser));
  std::printf("pipeline=serial workers=1 rtf=%.6f speedup=%.2f\n", ser.rtf,
              ser.speedup_vs_realtime);
  table << "serial\t1\t" << ser.rtf << '\t' << ser.speedup_vs_realtime << '\t'
        << ser.wall_seconds << '\t' << ser.audio_seconds << '\n';

  if (parallel_best_wall > 0.0) {
    std::printf("ratio_serial_over_parallel=%.3f\n",
                ser.wall_seconds / parallel_best_wall);
  }
  std::printf("hardware=%s\n", ser.hardware);

  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) die_config("cannot write bench table: " + out_path);
    os << table.str();
  }
  pgse_enhancer_free(serial_model);
  pgse_enhancer_free(enhancer);
  pgse_codec_free(codec);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ParaGSE: grouped speech tokens, parallel clean-token "
               "prediction, degradation simulation, and benchmarks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pgse_version());

  ToolConfig cfg;
  std::string config_path;

  // Shared options are registered per subcommand so that `--help` stays
  // scoped; values flow: defaults < config file < explicit flags.
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file");
    return cmd;
  };

  // make-corpus
  auto* mc = add_common(app.add_subcommand(
      "make-corpus", "synthesize a degraded/clean corpus with a manifest"));
  std::string mc_out;
  bool mc_test_grid = false;
  mc->add_option("--out", mc_out, "output directory")->required();
  auto* mc_task = mc->add_option("--task", cfg.corpus_task,
                                 "identity|denoise|dereverb|bandlimit|mixed");
  auto* mc_count = mc->add_option("--count", cfg.corpus_count, "pair count");
  auto* mc_seconds =
      mc->add_option("--seconds", cfg.corpus_seconds, "utterance length");
  auto* mc_rate = mc->add_option("--rate", cfg.corpus_rate, "sample rate");
  std::string mc_grid;
  auto* mc_grid_opt =
      mc->add_option("--snr-grid", mc_grid, "comma-separated SNR grid (dB)");
  mc->add_flag("--test-grid", mc_test_grid,
               "use the held-out grid 2.5,7.5,12.5,17.5 dB");
  auto* mc_bl =
      mc->add_option("--bandlimit-hz", cfg.bandlimit_hz, "bandlimit target");
  auto* mc_seed = mc->add_option("--seed", cfg.seed, "corpus seed");

  // train-codec
  auto* tc = add_common(app.add_subcommand(
      "train-codec", "fit the linear codec and quantizer codebooks"));
  std::string tc_corpus, tc_out;
  tc->add_option("--corpus", tc_corpus, "corpus manifest")->required();
  tc->add_option("--out", tc_out, "output model file")->required();
  auto* tc_groups = tc->add_option("--groups", cfg.codec.groups, "N");
  auto* tc_m = tc->add_option("--codebook-size", cfg.codec.codebook_size, "M");
  auto* tc_k = tc->add_option("--latent-dim", cfg.codec.latent_dim, "K");
  auto* tc_w =
      tc->add_option("--half-window", cfg.codec.mdct_half_window, "MDCT W");
  auto* tc_iters =
      tc->add_option("--kmeans-iters", cfg.codec.kmeans_iterations, "");
  bool tc_no_rvq = false;
  tc->add_flag("--no-rvq", tc_no_rvq, "skip the residual quantizer");
  auto* tc_seed = tc->add_option("--seed", cfg.seed, "training seed");

  // train-enhancer
  auto* te = add_common(app.add_subcommand(
      "train-enhancer", "train the feature extractor and prediction branches"));
  std::string te_corpus, te_codec, te_out, te_report;
  te->add_option("--corpus", te_corpus, "corpus manifest")->required();
  te->add_option("--codec", te_codec, "trained codec model")->required();
  te->add_option("--out", te_out, "output model file")->required();
  te->add_option("--report", te_report, "per-epoch loss/accuracy table");
  auto* te_c = te->add_option("--feature-dim", cfg.enhancer.feature_dim, "C");
  auto* te_h = te->add_option("--hidden-dim", cfg.enhancer.hidden_dim, "H");
  auto* te_lr = te->add_option("--lr", cfg.enhancer.learning_rate, "");
  auto* te_epochs = te->add_option("--epochs", cfg.enhancer.epochs, "");
  auto* te_batch = te->add_option("--batch", cfg.enhancer.batch, "");
  bool te_serial = false;
  te->add_flag("--serial", te_serial, "train the serial baseline (needs RVQ)");
  bool te_context = false;
  te->add_flag("--context", te_context,
               "condition branches on the previous/current/next features");
  auto* te_seed = te->add_option("--seed", cfg.seed, "training seed");

  // enhance
  auto* en = add_common(
      app.add_subcommand("enhance", "enhance a degraded WAV file"));
  std::string en_in, en_out, en_codec, en_enh, en_mode, en_dump;
  en->add_option("--in", en_in, "input WAV")->required();
  en->add_option("--out", en_out, "output WAV")->required();
  en->add_option("--codec", en_codec, "codec model")->required();
  en->add_option("--enhancer", en_enh, "enhancer model")->required();
  en->add_option("--mode", en_mode, "parallel|serial (must match the model)");
  en->add_option("--dump-tokens", en_dump, "write predicted tokens as text");
  auto* en_workers = en->add_option("--workers", cfg.workers, "thread count");

  // eval
  auto* ev = add_common(app.add_subcommand(
      "eval", "evaluate enhancement quality over a corpus manifest"));
  std::string ev_corpus, ev_codec, ev_enh, ev_out, ev_table;
  ev->add_option("--corpus", ev_corpus, "corpus manifest")->required();
  ev->add_option("--codec", ev_codec, "codec model")->required();
  ev->add_option("--enhancer", ev_enh, "enhancer model")->required();
  ev->add_option("--out", ev_out, "aggregate report (key=value lines)");
  ev->add_option("--table", ev_table, "per-utterance TSV table");
  auto* ev_workers = ev->add_option("--workers", cfg.workers, "thread count");

  // bench
  auto* be = add_common(app.add_subcommand(
      "bench", "measure real-time factors of the enhancement pipelines"));
  std::string be_codec, be_enh, be_serial_enh, be_out;
  double be_duration = 60.0;
  std::string be_workers = "1,2,4";
  int be_repeats = 5;
  be->add_option("--codec", be_codec, "codec model")->required();
  be->add_option("--enhancer", be_enh, "parallel enhancer model")->required();
  be->add_option("--serial-enhancer", be_serial_enh,
                 "serial model (default: serial twin of --enhancer)");
  be->add_option("--duration", be_duration, "benchmark audio seconds");
  be->add_option("--workers-list", be_workers, "comma-separated worker counts");
  be->add_option("--repeats", be_repeats, "timed repeats (>= 3)");
  be->add_option("--out", be_out, "write the RTF table to a file");
  auto* be_seed = be->add_option("--seed", cfg.seed, "benchmark audio seed");

  CLI11_PARSE(app, argc, argv);

  // Config file first, then explicit flags re-applied on top.
  if (!config_path.empty()) {
    ToolConfig file_cfg;
    load_config_file(config_path, file_cfg);
    ToolConfig flags = cfg;  // flag-assigned values
    cfg = file_cfg;
    if (mc_task->count()) cfg.corpus_task = flags.corpus_task;
    if (mc_count->count()) cfg.corpus_count = flags.corpus_count;
    if (mc_seconds->count()) cfg.corpus_seconds = flags.corpus_seconds;
    if (mc_rate->count()) cfg.corpus_rate = flags.corpus_rate;
    if (mc_bl->count()) cfg.bandlimit_hz = flags.bandlimit_hz;
    if (tc_groups->count()) cfg.codec.groups = flags.codec.groups;
    if (tc_m->count()) cfg.codec.codebook_size = flags.codec.codebook_size;
    if (tc_k->count()) cfg.codec.latent_dim = flags.codec.latent_dim;
    if (tc_w->count()) cfg.codec.mdct_half_window = flags.codec.mdct_half_window;
    if (tc_iters->count()) {
      cfg.codec.kmeans_iterations = flags.codec.kmeans_iterations;
    }
    if (te_c->count()) cfg.enhancer.feature_dim = flags.enhancer.feature_dim;
    if (te_h->count()) cfg.enhancer.hidden_dim = flags.enhancer.hidden_dim;
    if (te_lr->count()) {
      cfg.enhancer.learning_rate = flags.enhancer.learning_rate;
    }
    if (te_epochs->count()) cfg.enhancer.epochs = flags.enhancer.epochs;
    if (te_batch->count()) cfg.enhancer.batch = flags.enhancer.batch;
    if (en_workers->count() || ev_workers->count()) {
      cfg.workers = flags.workers;
    }
    if (mc_seed->count() || tc_seed->count() || te_seed->count() ||
        be_seed->count()) {
      cfg.seed = flags.seed;
    }
  }
  if (mc_grid_opt->count() > 0) {
    try {
      cfg.snr_grid = parse_double_list(mc_grid);
    } catch (const std::exception&) {
      die_config("bad --snr-grid value: " + mc_grid);
    }
  }
  if (te_serial) cfg.enhancer.serial = 1;
  if (te_context) cfg.enhancer.context = 1;
  if (tc_no_rvq) cfg.codec.train_rvq = 0;
  if (cfg.workers < 1) die_config("workers must be >= 1");
  cfg.apply_seed_everywhere();

  if (mc->parsed()) return cmd_make_corpus(cfg, mc_out, mc_test_grid);
  if (tc->parsed()) return cmd_train_codec(cfg, tc_corpus, tc_out);
  if (te->parsed()) {
    return cmd_train_enhancer(cfg, te_corpus, te_codec, te_out, te_report);
  }
  if (en->parsed()) {
    return cmd_enhance(cfg, en_in, en_out, en_codec, en_enh, en_mode, en_dump);
  }
  if (ev->parsed()) {
    return cmd_eval(cfg, ev_corpus, ev_codec, ev_enh, ev_out, ev_table);
  }
  if (be->parsed()) {
    std::vector<int> workers;
    try {
      for (double v : parse_double_list(be_workers)) {
        workers.push_back(static_cast<int>(v));
      }
    } catch (const std::exception&) {
      die_config("bad --workers-list value: " + be_workers);
    }
    if (be_repeats < 3) die_config("--repeats must be >= 3");
    return cmd_bench(cfg, be_codec, be_enh, be_serial_enh, be_duration,
                     workers, be_repeats, be_out);
  }
  return 0;
}
