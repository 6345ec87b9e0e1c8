#pragma once

#include <stdexcept>
#include <string>

namespace dualdiv {

enum class ErrorCode {
  InvalidArgument,
  Subordinator,
  InvalidPhaseType,
  NonpositiveRate,
  SingularResolvent,
  RepeatedRoot,
  RootCount,
  OverflowGuard,
  Domain,
  DegenerateDenominator,
  NoConvergence,
  Bracket,
  Config,
  Parse,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// All failures raised by the library carry a code so the C layer can map
// them to status values without parsing messages.
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

}  // namespace dualdiv
