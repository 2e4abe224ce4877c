#include "zatlas/error.hpp"

namespace zatlas {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::AccuracyNotReached: return "AccuracyNotReached";
    case ErrorCode::AtPole: return "AtPole";
    case ErrorCode::InsufficientTable: return "InsufficientTable";
    case ErrorCode::DomainWarning: return "DomainWarning";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::ReflectionSingular: return "ReflectionSingular";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BranchPointEncountered: return "BranchPointEncountered";
    case ErrorCode::SeedInvalid: return "SeedInvalid";
    case ErrorCode::NotSameStrip: return "NotSameStrip";
    case ErrorCode::ParamNotAttained: return "ParamNotAttained";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::BoundaryUnsafe: return "BoundaryUnsafe";
    case ErrorCode::UnwindFailure: return "UnwindFailure";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::OrphanComponent: return "OrphanComponent";
    case ErrorCode::AmbiguousPrincipal: return "AmbiguousPrincipal";
    case ErrorCode::InconsistentStrip: return "InconsistentStrip";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace zatlas
