#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crossdecode {

enum class ErrorKind {
  config,      // invalid configuration or flag value
  input,       // malformed in-memory input (shape, NaN, ragged columns)
  io,          // file cannot be opened, read or written
  format,      // EPO1 or CSV content violates its layout
  degenerate,  // zero variance, empty selection
  rank,        // covariance rank too low for the requested filters
  numerical,   // solver failed to reach its tolerance
};

/// Base of every error thrown by the library. The kind maps onto a CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset);
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what) : Error(ErrorKind::degenerate, what) {}
};

class RankError : public Error {
 public:
  RankError(const std::string& what, int max_pairs)
      : Error(ErrorKind::rank, what), max_pairs_(max_pairs) {}
  /// Largest filter-pair count the covariance rank supports.
  int max_pairs() const noexcept { return max_pairs_; }

 private:
  int max_pairs_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// 0 success, 2 usage/config, 3 I/O, 4 numerical/degenerate input.
int exit_code(ErrorKind kind) noexcept;

}  // namespace crossdecode
