#include "error.hpp"

namespace dualdiv {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Subordinator: return "SubordinatorError";
    case ErrorCode::InvalidPhaseType: return "InvalidPhaseType";
    case ErrorCode::NonpositiveRate: return "NonpositiveRate";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::RepeatedRoot: return "RepeatedRootError";
    case ErrorCode::RootCount: return "RootCountError";
    case ErrorCode::OverflowGuard: return "OverflowGuard";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Bracket: return "BracketError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

}  // namespace dualdiv
