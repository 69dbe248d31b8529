#include "crossdecode/errors.hpp"

namespace crossdecode {

FormatError::FormatError(const std::string& what, std::uint64_t offset)
    : Error(ErrorKind::format, what + " (at byte offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::input:
      return 2;
    case ErrorKind::io:
    case ErrorKind::format:
      return 3;
    case ErrorKind::degenerate:
    case ErrorKind::rank:
    case ErrorKind::numerical:
      return 4;
  }
  return 1;
}

}  // namespace crossdecode
