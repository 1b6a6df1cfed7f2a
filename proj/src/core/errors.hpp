// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace paragse {

enum class ErrorKind {
  invalid_input,
  config,
  insufficient_data,
  io,
  lookup,
  degenerate_input,
  divergence,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct InvalidInputError : Error {
  explicit InvalidInputError(const std::string& msg)
      : Error(ErrorKind::invalid_input, msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg)
      : Error(ErrorKind::config, msg) {}
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& msg)
      : Error(ErrorKind::insufficient_data, msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

struct LookupError : Error {
  explicit LookupError(const std::string& msg)
      : Error(ErrorKind::lookup, msg) {}
};

struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& msg)
      : Error(ErrorKind::degenerate_input, msg) {}
};

struct DivergenceError : Error {
  explicit DivergenceError(const std::string& msg)
      : Error(ErrorKind::divergence, msg) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& msg)
      : Error(ErrorKind::internal, msg) {}
};

}  // namespace paragse
