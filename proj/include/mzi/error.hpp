#pragma once

#include <stdexcept>
#include <string>

namespace mzi {

enum class ErrorCode {
  InvalidParameter = 1,
  PostSelectionSingular,
  RampUnresolved,
  FreqOutOfRange,
  DegenerateSweep,
  UnknownScenario,
  InvalidOverride,
  InvalidParamPath,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

// All recoverable failures in the library are reported through this type; the
// C API maps `code()` onto its status enum.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace mzi
