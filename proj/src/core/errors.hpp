#pragma once

#include <stdexcept>
#include <string>

namespace bdp {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  Dimension,
  Numeric,
  NotFound,
  Corrupt,
  Unsupported,
};

// All recoverable failures in the library surface as Error. The message
// carries enough context (operand names, row numbers, cell ids) to act on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace bdp
