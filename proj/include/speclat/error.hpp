#pragma once

#include <stdexcept>
#include <string>

namespace speclat {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Formula,
  Model,
  StateLimit,
  Filter,
  Monotonicity,
  OracleGuard,
  OracleMismatch,
  Config,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace speclat
