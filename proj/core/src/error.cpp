#include "hydra/error.hpp"

namespace hydra {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InfeasibleSolution: return "InfeasibleSolution";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::MissingProbabilities: return "MissingProbabilities";
    case ErrorCode::EmptyPopulation: return "EmptyPopulation";
    case ErrorCode::OriginalMisclassified: return "OriginalMisclassified";
    case ErrorCode::OracleTransport: return "OracleTransport";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::GroundSetTooLarge: return "GroundSetTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::DatasetFormat: return "DatasetFormat";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace hydra
