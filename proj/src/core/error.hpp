#pragma once

#include <stdexcept>
#include <string>

namespace apc {

// Error categories mirror the status codes of the C API (include/apc/apc.h).
enum class ErrorCode {
  InvalidArgument = 1,  // bad parameter or precondition violation
  Parse = 2,            // malformed input file content
  Io = 3,               // filesystem / OS failure
  Format = 4,           // bad magic, version, checksum, truncation
  State = 5,            // operation not valid for the current data
  Internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace apc
