// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "core/errors.hpp"
#include "core/linalg.hpp"

// Binary container helpers. Fields are written in host byte order and the
// containers are specified little-endian, so readers/writers assume a
// little-endian host (checked at load time via the magic bytes).

namespace paragse::io {

inline void write_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!os) throw IoError("write failed");
}

inline void read_bytes(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(is.gcount()) != n) {
    throw IoError("unexpected end of file");
  }
}

inline void write_u32(std::ostream& os, uint32_t v) { write_bytes(os, &v, 4); }
inline void write_u64(std::ostream& os, uint64_t v) { write_bytes(os, &v, 8); }
inline void write_f64(std::ostream& os, double v) { write_bytes(os, &v, 8); }

inline uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  read_bytes(is, &v, 4);
  return v;
}

inline uint64_t read_u64(std::istream& is) {
  uint64_t v = 0;
  read_bytes(is, &v, 8);
  return v;
}

inline double read_f64(std::istream& is) {
  double v = 0;
  read_bytes(is, &v, 8);
  return v;
}

inline void write_magic(std::ostream& os, const char magic[4]) {
  write_bytes(os, magic, 4);
}

inline void expect_magic(std::istream& is, const char magic[4],
                         const std::string& what) {
  char buf[4] = {0, 0, 0, 0};
  read_bytes(is, buf, 4);
  if (std::memcmp(buf, magic, 4) != 0) {
    throw IoError(what + ": bad magic bytes");
  }
}

inline void write_matrix(std::ostream& os, const Matrix& m) {
  write_bytes(os, m.data.data(), m.data.size() * sizeof(double));
}

inline void read_matrix(std::istream& is, Matrix& m) {
  read_bytes(is, m.data.data(), m.data.size() * sizeof(double));
}

inline void write_vector(std::ostream& os, const Vector& v) {
  write_bytes(os, v.data(), v.size() * sizeof(double));
}

inline void read_vector(std::istream& is, Vector& v) {
  read_bytes(is, v.data(), v.size() * sizeof(double));
}

inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace paragse::io
