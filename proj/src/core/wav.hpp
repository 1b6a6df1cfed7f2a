// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "core/audio.hpp"

namespace paragse::wav {

// Reads a mono 16-bit PCM RIFF/WAVE file; samples are scaled to
// [-1, 1) doubles. Multi-channel or non-PCM16 files are rejected.
AudioBuffer read_wav(const std::string& path);

// Writes mono 16-bit PCM; samples are clamped to [-1, 1] and rounded.
void write_wav(const AudioBuffer& audio, const std::string& path);

}  // namespace paragse::wav
