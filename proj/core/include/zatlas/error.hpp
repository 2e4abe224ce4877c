#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zatlas {

/// Failure categories shared by every module. Each maps to one named error
/// condition of an operation; callers switch on `code()` rather than parsing
/// messages.
enum class ErrorCode {
  // evaluation
  PoleProximity,
  AccuracyNotReached,
  AtPole,
  InsufficientTable,
  DomainWarning,
  NonConvergent,
  ReflectionSingular,
  InvalidConfig,
  // continuation
  BranchPointEncountered,
  SeedInvalid,
  NotSameStrip,
  ParamNotAttained,
  // zeros
  CountMismatch,
  BoundaryUnsafe,
  UnwindFailure,
  Inconclusive,
  // strips
  OrphanComponent,
  AmbiguousPrincipal,
  InconsistentStrip,
  NotFound,
  // io
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zatlas
