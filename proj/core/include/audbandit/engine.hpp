#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "audbandit/aggregate.hpp"
#include "audbandit/audience.hpp"
#include "audbandit/policy.hpp"
#include "audbandit/posterior.hpp"

namespace audbandit {

// Ground truth for a simulated test: the true CTR of every (creative, DA)
// arm and the audience partition users arrive from.
struct Environment {
  Eigen::MatrixXd true_theta;  // R x J, in (0,1)
  Partition partition;

  // True TA-level CTRs lambda_rk; R x K.
  Eigen::MatrixXd true_lambda() const;
  // True TA-level payoffs gamma * lambda - cost_ta; R x K.
  Eigen::MatrixXd true_payoff(const EconomicParams& econ) const;
  // The payoff-maximizing (creative, TA) combination.
  ArmIndex true_best(const EconomicParams& econ) const;
};

struct TestConfig {
  int creatives = 2;
  int audiences = 2;
  PopulationModel population;
  // Empty cost_da means zero display cost.
  EconomicParams econ;
  int batch_size = 100;
  int draws = 1000;
  double stop_threshold = 0.01;
  double stop_percentile = 0.95;
  int max_batches = 1000;
  // When false the test always runs max_batches (face-validity runs).
  bool stopping = true;
  // Keep alpha/beta after every batch in the trace.
  bool record_snapshots = false;
  Policy policy = Policy::kThompson;
  std::uint64_t seed = 0;

  // Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

struct BatchRecord {
  int t = 0;
  int users = 0;
  int discarded = 0;
  // Counts per (creative, DA) arm; per (creative, TA) arm under split-testing.
  BatchOutcome outcome;
  // Allocation probabilities w_rjt in effect while the batch was served.
  Eigen::MatrixXd allocation;
  double expected_regret_per_impression = 0.0;
  // Stop statistics computed from the posterior after the batch update.
  std::vector<double> ppvr;
  std::vector<int> best_creative;
  double post_best_prob = 0.0;
  ArmIndex identified_best;
  std::optional<Eigen::MatrixXd> alpha;
  std::optional<Eigen::MatrixXd> beta;

  double max_ppvr() const;
};

struct RunTrace {
  Policy policy = Policy::kThompson;
  std::uint64_t seed = 0;
  std::vector<BatchRecord> batches;
  // First batch whose stop check passed; empty when the run maxed out.
  std::optional<int> stopped_at;
  StopReport final_report;
  ArmIndex true_best;

  bool maxed_out() const { return !stopped_at.has_value(); }
  const std::vector<int>& final_best() const { return final_report.best_creative; }
  std::int64_t users() const;
  std::int64_t impressions() const;
  // Sum over batches of expected regret per impression times impressions.
  double total_expected_regret() const;
  // Both the true-best TA's creative and the global-best combination match.
  bool correct_identification() const;
  // First batch with max pPVR below `threshold`, regardless of whether the
  // run kept going afterwards.
  std::optional<int> first_below(double threshold) const;
};

// Runs batches until the stop rule fires or max_batches is reached.
// Throws ConfigMismatch when env does not match the config and propagates
// NonpositivePayoffDenominator from the stop computation.
RunTrace run_test(const TestConfig& config, const Environment& env);

// sum_k sum_{j in O(k)} p(j|k) sum_r w_rj (max_r' theta_r'j - theta_rj), as a
// non-negative loss in clicks per impression.
double expected_regret_per_impression(const Eigen::MatrixXd& allocation,
                                      const Eigen::MatrixXd& true_theta,
                                      const Partition& partition);

}  // namespace audbandit
