// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

#include "core/degrade.hpp"

namespace paragse::corpus {

enum class Task { identity, denoise, dereverb, bandlimit, mixed };

Task task_from_name(const std::string& name);
std::string task_name(Task task);

struct CorpusConfig {
  Task task = Task::denoise;
  int count = 20;                  // utterance pairs
  double utterance_seconds = 4.0;
  int sample_rate = 16000;
  uint64_t seed = 1;
  std::vector<double> snr_grid = {0.0, 5.0, 10.0, 15.0};
  int bandlimit_hz = 8000;
};

struct ManifestEntry {
  std::string clean_path;     // as written in the manifest (relative)
  std::string degraded_path;
  std::string spec;           // formatted DegradationSpec
};

// Generates clean/degraded WAV pairs plus `manifest.txt` under out_dir.
// Byte-deterministic for a fixed config. Returns the manifest path.
std::string make_corpus(const CorpusConfig& config, const std::string& out_dir);

// Manifest text format: '#' comment lines, then one
// clean<TAB>degraded<TAB>spec line per pair.
void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::string& path);
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Resolves a manifest-relative path against the manifest's directory.
std::string resolve_manifest_path(const std::string& manifest_path,
                                  const std::string& entry_path);

}  // namespace paragse::corpus
