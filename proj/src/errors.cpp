#include "marimba/errors.hpp"

namespace marimba {

const char* errc_name(Errc e) {
  switch (e) {
    case Errc::SharedEndpoint: return "SharedEndpoint";
    case Errc::Crossing: return "Crossing";
    case Errc::Degenerate: return "Degenerate";
    case Errc::NonPositiveLength: return "NonPositiveLength";
    case Errc::GeometryFailure: return "GeometryFailure";
    case Errc::Validation: return "Validation";
    case Errc::Parse: return "Parse";
    case Errc::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case Errc::TangencyStall: return "TangencyStall";
    case Errc::EmptyLog: return "EmptyLog";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::NonNegativeChi: return "NonNegativeChi";
    case Errc::LabelMismatch: return "LabelMismatch";
    case Errc::TooFewNotes: return "TooFewNotes";
    case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::NegativeResidual: return "NegativeResidual";
    case Errc::NoDetection: return "NoDetection";
    case Errc::MultiLabel: return "MultiLabel";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::InvalidRealization: return "InvalidRealization";
    case Errc::NotInFamily: return "NotInFamily";
    case Errc::CocycleOrderViolation: return "CocycleOrderViolation";
    case Errc::CocycleNotClosed: return "CocycleNotClosed";
    case Errc::SheetOutOfRange: return "SheetOutOfRange";
    case Errc::OnGamma: return "OnGamma";
    case Errc::WrongStepCount: return "WrongStepCount";
    case Errc::UnmappedLabel: return "UnmappedLabel";
    case Errc::NotSupported: return "NotSupported";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

bool is_numerical(Errc e) {
  switch (e) {
    case Errc::Degenerate:
    case Errc::GeometryFailure:
    case Errc::RejectionBudgetExceeded:
    case Errc::TangencyStall:
    case Errc::QuadratureNotConverged:
    case Errc::NegativeResidual:
    case Errc::NoDetection:
    case Errc::BudgetExceeded:
    case Errc::InvalidRealization:
    case Errc::SharedEndpoint:
    case Errc::Crossing:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), message_(what) {}

}  // namespace marimba
