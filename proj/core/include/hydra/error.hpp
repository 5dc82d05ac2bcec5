#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hydra {

enum class ErrorCode {
  InfeasibleSolution,
  InvalidInstance,
  MissingProbabilities,
  EmptyPopulation,
  OriginalMisclassified,
  OracleTransport,
  ProtocolViolation,
  SearchSpaceTooLarge,
  GroundSetTooLarge,
  DimensionMismatch,
  InvalidLabel,
  DatasetFormat,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library carries one of the codes above so
// callers (the campaign harness in particular) can bucket outcomes without
// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hydra
