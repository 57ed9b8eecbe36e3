#pragma once

#include <stdexcept>
#include <string>

namespace hxmesh {

enum class ErrorCode {
  kInvalidArgument,
  kConstraintViolation,
  kRadixOverflow,
  kUnreachable,
  kTooLarge,
  kNotConstructible,
  kInfeasible,
  kParse,
  kFileNotFound,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace hxmesh
