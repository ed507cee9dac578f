#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "audbandit/aggregate.hpp"
#include "audbandit/audience.hpp"
#include "audbandit/posterior.hpp"
#include "audbandit/random.hpp"

namespace audbandit {

enum class Policy { kThompson, kEqualAllocation, kSplitTesting };

std::string_view to_string(Policy policy);
// Accepts "TS", "EA", "ST" (case-insensitive). Throws InvalidArgument.
Policy parse_policy(std::string_view name);

// Value of a click and average display cost per impression.
struct EconomicParams {
  double gamma = 1.0;
  Eigen::MatrixXd cost_da;  // R x J

  static EconomicParams click_valued(int creatives, int contexts, double gamma = 1.0);

  double payoff(double theta, int r, int j) const { return gamma * theta - cost_da(r, j); }
};

// Creative shown to one user. `creative` is empty when split-testing discards
// the user. `context` is the DA index (TS/EA) or the arm's TA index (ST).
struct Decision {
  std::optional<int> creative;
  int context = 0;

  bool discarded() const { return !creative.has_value(); }
  friend bool operator==(const Decision&, const Decision&) = default;
};

// argmax_r gamma*theta_r - cost_r, lowest index on ties.
int best_payoff_creative(std::span<const double> theta, double gamma,
                         std::span<const double> costs);

// Thompson sampling: one posterior draw per creative, show the best payoff.
Decision ts_select(const PosteriorState& state, int j, const EconomicParams& econ, Rng& rng);

// Equal allocation: uniform creative, independent of the posterior.
Decision ea_select(int j, int creatives, Rng& rng);

// Split-testing arm for a given arm index a in [0, R*K): creative a % R,
// audience a / R.
ArmIndex split_arm(int arm, int creatives);

// Split-testing: uniform over the R*K creative-TA arms; the creative is shown
// only when the user belongs to the arm's TA.
Decision st_assign(AudienceSet user_membership, int creatives, int audiences, Rng& rng);

// Posterior probability that each creative is payoff-optimal in context j,
// estimated from H joint draws.
std::vector<double> allocation_prob_w(const PosteriorState& state, int j,
                                      const EconomicParams& econ, int draws, Rng& rng);

// The same estimate for every context at once from shared theta draws; R x J.
Eigen::MatrixXd allocation_from_draws(const DrawCube& theta, const EconomicParams& econ);

}  // namespace audbandit
