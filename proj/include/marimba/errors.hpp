#pragma once

#include <stdexcept>
#include <string>

namespace marimba {

enum class Errc {
  SharedEndpoint,
  Crossing,
  Degenerate,
  NonPositiveLength,
  GeometryFailure,
  Validation,
  Parse,
  RejectionBudgetExceeded,
  TangencyStall,
  EmptyLog,
  OutOfRange,
  UnknownLabel,
  NonNegativeChi,
  LabelMismatch,
  TooFewNotes,
  QuadratureNotConverged,
  NegativeResidual,
  NoDetection,
  MultiLabel,
  BudgetExceeded,
  InvalidRealization,
  NotInFamily,
  CocycleOrderViolation,
  CocycleNotClosed,
  SheetOutOfRange,
  OnGamma,
  WrongStepCount,
  UnmappedLabel,
  NotSupported,
  Io,
};

const char* errc_name(Errc e);

// Numerical failures map to CLI exit code 2, everything else to 1.
bool is_numerical(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }
  const std::string& message() const { return message_; }  // without the code prefix

 private:
  Errc code_;
  std::string message_;
};

}  // namespace marimba
