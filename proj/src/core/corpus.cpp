// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/corpus.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/rng.hpp"
#include "core/wav.hpp"

namespace paragse::corpus {

namespace fs = std::filesystem;

Task task_from_name(const std::string& name) {
  if (name == "identity") return Task::identity;
  if (name == "denoise") return Task::denoise;
  if (name == "dereverb") return Task::dereverb;
  if (name == "bandlimit") return Task::bandlimit;
  if (name == "mixed") return Task::mixed;
  throw ConfigError("unknown corpus task '" + name + "'");
}

std::string task_name(Task task) {
  switch (task) {
    case Task::identity: return "identity";
    case Task::denoise: return "denoise";
    case Task::dereverb: return "dereverb";
    case Task::bandlimit: return "bandlimit";
    case Task::mixed: return "mixed";
  }
  return "unknown";
}

namespace {

const char* kNoiseCycle[] = {"white0", "white1", "pink0", "pink1", "babble0"};
const char* kRirCycle[] = {"rir0", "rir1", "rir2"};

degrade::DegradationSpec spec_for(const CorpusConfig& cfg, int index) {
  degrade::DegradationSpec spec;
  spec.seed = Rng::mix(cfg.seed, 0xd00 + static_cast<uint64_t>(index));
  const std::string noise_id = kNoiseCycle[index % 5];
  const std::string rir_id = kRirCycle[index % 3];
  const double snr =
      cfg.snr_grid.empty() ? 10.0
                           : cfg.snr_grid[index % cfg.snr_grid.size()];
  switch (cfg.task) {
    case Task::identity:
      break;
    case Task::denoise:
      spec.stages.push_back({degrade::StageKind::noise, noise_id, snr, 0});
      break;
    case Task::dereverb:
      spec.stages.push_back({degrade::StageKind::reverb, rir_id, 0.0, 0});
      break;
    case Task::bandlimit:
      spec.stages.push_back(
          {degrade::StageKind::bandlimit, "", 0.0, cfg.bandlimit_hz});
      break;
    case Task::mixed:
      // Reverberation first, then noise, then bandwidth reduction.
      spec.stages.push_back({degrade::StageKind::reverb, rir_id, 0.0, 0});
      spec.stages.push_back({degrade::StageKind::noise, noise_id, snr, 0});
      spec.stages.push_back(
          {degrade::StageKind::bandlimit, "", 0.0, cfg.bandlimit_hz});
      break;
  }
  return spec;
}

}  // namespace

std::string make_corpus(const CorpusConfig& config,
                        const std::string& out_dir) {
  if (config.count < 1 || config.utterance_seconds <= 0 ||
      config.sample_rate <= 0) {
    throw ConfigError("make_corpus: invalid configuration");
  }
  for (double snr : config.snr_grid) {
    if (!std::isfinite(snr)) throw ConfigError("make_corpus: non-finite SNR");
  }
  if ((config.task == Task::bandlimit || config.task == Task::mixed) &&
      (config.bandlimit_hz <= 0 || config.bandlimit_hz >= config.sample_rate)) {
    throw ConfigError("make_corpus: bandlimit_hz must be in (0, sample_rate)");
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("make_corpus: cannot create " + out_dir);

  const degrade::Assets assets =
      degrade::synth_assets(Rng::mix(config.seed, 0xa55e75), config.sample_rate);

  std::vector<ManifestEntry> entries;
  char name[64];
  for (int i = 0; i < config.count; ++i) {
    AudioBuffer clean =
        degrade::synth_speech(config.utterance_seconds, config.sample_rate,
                              Rng::mix(config.seed, 0xc1ea0 + i));
    degrade::DegradationSpec spec = spec_for(config, i);
    auto [degraded, clean_out] = degrade::apply_spec(clean, spec, assets);

    std::snprintf(name, sizeof(name), "clean_%03d.wav", i);
    std::string clean_rel = name;
    std::snprintf(name, sizeof(name), "degraded_%03d.wav", i);
    std::string degraded_rel = name;
    wav::write_wav(clean_out, (fs::path(out_dir) / clean_rel).string());
    wav::write_wav(degraded, (fs::path(out_dir) / degraded_rel).string());
    entries.push_back({clean_rel, degraded_rel, degrade::format_spec(spec)});
  }

  std::string manifest_path = (fs::path(out_dir) / "manifest.txt").string();
  save_manifest(entries, manifest_path);
  return manifest_path;
}

void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("manifest: cannot open for writing " + path);
  os << "# paragse corpus manifest v1\n";
  os << "# clean\tdegraded\tspec\n";
  for (const auto& e : entries) {
    os << e.clean_path << '\t' << e.degraded_path << '\t' << e.spec << '\n';
  }
  if (!os) throw IoError("manifest: write failed " + path);
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("manifest: cannot open " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ManifestEntry e;
    if (!std::getline(ls, e.clean_path, '\t') ||
        !std::getline(ls, e.degraded_path, '\t') ||
        !std::getline(ls, e.spec)) {
      throw IoError("manifest: malformed line " + std::to_string(lineno) +
                    " in " + path);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string resolve_manifest_path(const std::string& manifest_path,
                                  const std::string& entry_path) {
  fs::path p(entry_path);
  if (p.is_absolute()) return entry_path;
  return (fs::path(manifest_path).parent_path() / p).string();
}

}  // namespace paragse::corpus
