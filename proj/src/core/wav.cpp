// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "core/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/serialize.hpp"

namespace paragse::wav {

namespace {

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
};

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("wav: cannot open " + path);

  io::expect_magic(is, "RIFF", "wav " + path);
  io::read_u32(is);  // riff size, unused
  io::expect_magic(is, "WAVE", "wav " + path);

  FmtChunk fmt;
  bool have_fmt = false;
  AudioBuffer out;
  while (true) {
    char id[4];
    is.read(id, 4);
    if (is.gcount() != 4) break;
    uint32_t size = io::read_u32(is);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw IoError("wav: malformed fmt chunk in " + path);
      fmt.format = static_cast<uint16_t>(io::read_u32(is) & 0xffff);
      is.seekg(-2, std::ios::cur);
      uint16_t ch = 0;
      io::read_bytes(is, &ch, 2);
      fmt.channels = ch;
      fmt.sample_rate = io::read_u32(is);
      io::read_u32(is);  // byte rate
      uint16_t block_align = 0;
      io::read_bytes(is, &block_align, 2);
      io::read_bytes(is, &fmt.bits_per_sample, 2);
      if (size > 16) is.seekg(size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw IoError("wav: data before fmt in " + path);
      if (fmt.format != 1 || fmt.bits_per_sample != 16) {
        throw IoError("wav: only 16-bit PCM supported: " + path);
      }
      if (fmt.channels != 1) {
        throw IoError("wav: only mono supported (" +
                      std::to_string(fmt.channels) + " channels): " + path);
      }
      size_t count = size / 2;
      out.samples.resize(count);
      std::vector<int16_t> raw(count);
      io::read_bytes(is, raw.data(), size - size % 2);
      for (size_t i = 0; i < count; ++i) {
        out.samples[i] = static_cast<double>(raw[i]) / 32768.0;
      }
      out.sample_rate = static_cast<int>(fmt.sample_rate);
      return out;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
      if (!is) break;
    }
  }
  throw IoError("wav: no data chunk in " + path);
}

void write_wav(const AudioBuffer& audio, const std::string& path) {
  validate_audio(audio, "write_wav");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("wav: cannot open for writing " + path);

  const uint32_t data_size = static_cast<uint32_t>(audio.samples.size() * 2);
  io::write_magic(os, "RIFF");
  io::write_u32(os, 36 + data_size);
  io::write_magic(os, "WAVE");
  io::write_magic(os, "fmt ");
  io::write_u32(os, 16);
  const uint16_t format = 1, channels = 1, bits = 16;
  io::write_bytes(os, &format, 2);
  io::write_bytes(os, &channels, 2);
  io::write_u32(os, static_cast<uint32_t>(audio.sample_rate));
  io::write_u32(os, static_cast<uint32_t>(audio.sample_rate) * 2);
  const uint16_t block_align = 2;
  io::write_bytes(os, &block_align, 2);
  io::write_bytes(os, &bits, 2);
  io::write_magic(os, "data");
  io::write_u32(os, data_size);

  std::vector<int16_t> raw(audio.samples.size());
  for (size_t i = 0; i < audio.samples.size(); ++i) {
    double v = std::clamp(audio.samples[i], -1.0, 1.0);
    raw[i] = static_cast<int16_t>(
        std::clamp<long>(std::lround(v * 32767.0), -32768, 32767));
  }
  io::write_bytes(os, raw.data(), raw.size() * 2);
}

}  // namespace paragse::wav
