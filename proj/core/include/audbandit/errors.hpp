#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace audbandit {

enum class Errc {
  kEmptyPopulation,
  kNoPopulationForAudience,
  kUnknownContext,
  kInvalidOverlap,
  kInvalidDimensions,
  kInvalidBatch,
  kNonpositivePayoffDenominator,
  kConfigMismatch,
  kInfeasibleGeometry,
  kEmptyTraces,
  kInvalidArgument,
};

std::string_view to_string(Errc code);

// All library failures surface as this exception; code() identifies the
// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace audbandit
