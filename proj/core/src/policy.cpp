#include "audbandit/policy.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "audbandit/errors.hpp"

namespace audbandit {

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::kThompson: return "TS";
    case Policy::kEqualAllocation: return "EA";
    case Policy::kSplitTesting: return "ST";
  }
  return "?";
}

Policy parse_policy(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "TS") return Policy::kThompson;
  if (upper == "EA") return Policy::kEqualAllocation;
  if (upper == "ST") return Policy::kSplitTesting;
  throw Error(Errc::kInvalidArgument, "unknown policy '" + std::string(name) + "' (TS, EA, ST)");
}

EconomicParams EconomicParams::click_valued(int creatives, int contexts, double gamma) {
  return {gamma, Eigen::MatrixXd::Zero(creatives, contexts)};
}

int best_payoff_creative(std::span<const double> theta, double gamma,
                         std::span<const double> costs) {
  int best = 0;
  double best_value = gamma * theta[0] - costs[0];
  for (std::size_t r = 1; r < theta.size(); ++r) {
    const double value = gamma * theta[r] - costs[r];
    if (value > best_value) {
      best_value = value;
      best = static_cast<int>(r);
    }
  }
  return best;
}

Decision ts_select(const PosteriorState& state, int j, const EconomicParams& econ, Rng& rng) {
  const std::vector<double> theta = sample_theta(state, j, rng);
  int best = 0;
  double best_value = econ.payoff(theta[0], 0, j);
  for (int r = 1; r < state.creatives(); ++r) {
    const double value = econ.payoff(theta[r], r, j);
    if (value > best_value) {
      best_value = value;
      best = r;
    }
  }
  return {best, j};
}

Decision ea_select(int j, int creatives, Rng& rng) {
  if (creatives < 1) throw Error(Errc::kInvalidDimensions, "need at least one creative");
  std::uniform_int_distribution<int> pick(0, creatives - 1);
  return {pick(rng), j};
}

ArmIndex split_arm(int arm, int creatives) { return {arm % creatives, arm / creatives}; }

Decision st_assign(AudienceSet user_membership, int creatives, int audiences, Rng& rng) {
  if (creatives < 1 || audiences < 1) {
    throw Error(Errc::kInvalidDimensions, "need at least one creative and one audience");
  }
  std::uniform_int_distribution<int> pick(0, creatives * audiences - 1);
  const ArmIndex arm = split_arm(pick(rng), creatives);
  if (!user_membership.contains(arm.audience)) return {std::nullopt, arm.audience};
  return {arm.creative, arm.audience};
}

std::vector<double> allocation_prob_w(const PosteriorState& state, int j,
                                      const EconomicParams& econ, int draws, Rng& rng) {
  if (draws < 1) throw Error(Errc::kInvalidArgument, "draw count H must be >= 1");
  std::vector<long> wins(state.creatives(), 0);
  for (int h = 0; h < draws; ++h) {
    const Decision d = ts_select(state, j, econ, rng);
    ++wins[*d.creative];
  }
  std::vector<double> w(wins.size());
  for (std::size_t r = 0; r < wins.size(); ++r) w[r] = static_cast<double>(wins[r]) / draws;
  return w;
}

Eigen::MatrixXd allocation_from_draws(const DrawCube& theta, const EconomicParams& econ) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(theta.creatives(), theta.columns());
  for (int h = 0; h < theta.draws(); ++h) {
    for (int j = 0; j < theta.columns(); ++j) {
      int best = 0;
      double best_value = econ.payoff(theta(h, 0, j), 0, j);
      for (int r = 1; r < theta.creatives(); ++r) {
        const double value = econ.payoff(theta(h, r, j), r, j);
        if (value > best_value) {
          best_value = value;
          best = r;
        }
      }
      w(best, j) += 1.0;
    }
  }
  return w / static_cast<double>(theta.draws());
}

}  // namespace audbandit
