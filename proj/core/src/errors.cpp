#include "audbandit/errors.hpp"

namespace audbandit {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kEmptyPopulation: return "EmptyPopulation";
    case Errc::kNoPopulationForAudience: return "NoPopulationForTA";
    case Errc::kUnknownContext: return "UnknownContext";
    case Errc::kInvalidOverlap: return "InvalidOverlap";
    case Errc::kInvalidDimensions: return "InvalidDimensions";
    case Errc::kInvalidBatch: return "InvalidBatch";
    case Errc::kNonpositivePayoffDenominator: return "NonpositivePayoffDenominator";
    case Errc::kConfigMismatch: return "ConfigMismatch";
    case Errc::kInfeasibleGeometry: return "InfeasibleGeometry";
    case Errc::kEmptyTraces: return "EmptyTraces";
    case Errc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code) {}

}  // namespace audbandit
