// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace bodyauth {

enum class ErrorCode {
  InvalidArgument = 1,
  Parse = 2,
  Io = 3,
  InsufficientData = 4,
  DimensionMismatch = 5,
  Domain = 6,
};

// Every failure raised by the core library. The C API maps the code onto
// its status enum one-to-one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace bodyauth
