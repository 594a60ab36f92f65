#include "speclat/error.hpp"

namespace speclat {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Formula: return "formula error";
    case ErrorCode::Model: return "model error";
    case ErrorCode::StateLimit: return "state limit exceeded";
    case ErrorCode::Filter: return "filter error";
    case ErrorCode::Monotonicity: return "monotonicity violation";
    case ErrorCode::OracleGuard: return "oracle guard";
    case ErrorCode::OracleMismatch: return "oracle mismatch";
    case ErrorCode::Config: return "config error";
    case ErrorCode::Io: return "I/O error";
  }
  return "unknown error";
}

}  // namespace speclat
