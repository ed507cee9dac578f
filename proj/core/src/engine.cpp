#include "audbandit/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "audbandit/errors.hpp"

namespace audbandit {
namespace {

EconomicParams resolve_economics(const TestConfig& config, int contexts) {
  EconomicParams econ = config.econ;
  if (econ.cost_da.size() == 0) econ.cost_da = Eigen::MatrixXd::Zero(config.creatives, contexts);
  if (econ.cost_da.rows() != config.creatives || econ.cost_da.cols() != contexts) {
    throw Error(Errc::kConfigMismatch, "display cost matrix must be R x J");
  }
  return econ;
}

void check_environment(const TestConfig& config, const Environment& env) {
  const Partition& partition = env.partition;
  if (partition.num_audiences() != config.audiences) {
    throw Error(Errc::kConfigMismatch, "environment partition has a different TA count");
  }
  if (env.true_theta.rows() != config.creatives || env.true_theta.cols() != partition.num_cells()) {
    throw Error(Errc::kConfigMismatch, "true CTR matrix must be R x J");
  }
  if ((env.true_theta.array() < 0.0).any() || (env.true_theta.array() > 1.0).any()) {
    throw Error(Errc::kConfigMismatch, "true CTRs must lie in [0,1]");
  }
  const Partition expected = build_partition(config.audiences, config.population);
  if (expected.num_cells() != partition.num_cells()) {
    throw Error(Errc::kConfigMismatch, "environment partition differs from the config population");
  }
  for (int j = 0; j < partition.num_cells(); ++j) {
    if (expected.cell(j).membership != partition.cell(j).membership) {
      throw Error(Errc::kConfigMismatch, "environment partition differs from the config population");
    }
  }
  if (!expected.cond_prob().isApprox(partition.cond_prob(), 1e-12)) {
    throw Error(Errc::kConfigMismatch, "environment partition weights differ from the config population");
  }
}

}  // namespace

Eigen::MatrixXd Environment::true_lambda() const {
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(true_theta.rows(), partition.num_audiences());
  for (int r = 0; r < true_theta.rows(); ++r) {
    for (int k = 0; k < partition.num_audiences(); ++k) {
      for (int j : partition.overlap_set(k)) lambda(r, k) += true_theta(r, j) * partition.cond_prob(j, k);
    }
  }
  return lambda;
}

Eigen::MatrixXd Environment::true_payoff(const EconomicParams& econ) const {
  Eigen::MatrixXd payoff = econ.gamma * true_lambda();
  if (econ.cost_da.size() != 0) payoff -= aggregate_cost(econ.cost_da, partition);
  return payoff;
}

ArmIndex Environment::true_best(const EconomicParams& econ) const {
  const Eigen::MatrixXd payoff = true_payoff(econ);
  ArmIndex best{0, 0};
  for (int k = 0; k < payoff.cols(); ++k) {
    for (int r = 0; r < payoff.rows(); ++r) {
      if (payoff(r, k) > payoff(best.creative, best.audience)) best = {r, k};
    }
  }
  return best;
}

void TestConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::kInvalidArgument, what); };
  if (creatives < 1) fail("creatives must be >= 1");
  if (audiences < 1 || audiences > kMaxAudiences) fail("audiences must be in 1..16");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (draws < 1) fail("draws must be >= 1");
  if (max_batches < 1) fail("max_batches must be >= 1");
  if (!(stop_threshold > 0.0)) fail("stop_threshold must be > 0");
  if (!(stop_percentile > 0.0 && stop_percentile < 1.0)) fail("stop_percentile must lie in (0,1)");
  if (!std::isfinite(econ.gamma)) fail("gamma must be finite");
}

double BatchRecord::max_ppvr() const {
  return ppvr.empty() ? 0.0 : *std::max_element(ppvr.begin(), ppvr.end());
}

std::int64_t RunTrace::users() const {
  std::int64_t total = 0;
  for (const auto& b : batches) total += b.users;
  return total;
}

std::int64_t RunTrace::impressions() const {
  std::int64_t total = 0;
  for (const auto& b : batches) total += b.outcome.total_impressions();
  return total;
}

double RunTrace::total_expected_regret() const {
  double total = 0.0;
  for (const auto& b : batches) {
    total += b.expected_regret_per_impression * static_cast<double>(b.outcome.total_impressions());
  }
  return total;
}

bool RunTrace::correct_identification() const {
  const auto& best = final_report.best_creative;
  if (true_best.audience >= static_cast<int>(best.size())) return false;
  return best[true_best.audience] == true_best.creative && final_report.identified_best == true_best;
}

std::optional<int> RunTrace::first_below(double threshold) const {
  for (const auto& b : batches) {
    if (b.max_ppvr() < threshold) return b.t;
  }
  return std::nullopt;
}

double expected_regret_per_impression(const Eigen::MatrixXd& allocation,
                                      const Eigen::MatrixXd& true_theta,
                                      const Partition& partition) {
  if (allocation.rows() != true_theta.rows() || allocation.cols() != true_theta.cols() ||
      true_theta.cols() != partition.num_cells()) {
    throw Error(Errc::kInvalidDimensions, "allocation and true CTRs must both be R x J");
  }
  for (int j = 0; j < allocation.cols(); ++j) {
    if (std::abs(allocation.col(j).sum() - 1.0) > 1e-9) {
      throw Error(Errc::kInvalidArgument, "allocation probabilities must sum to 1 per context");
    }
  }
  double total = 0.0;
  for (int k = 0; k < partition.num_audiences(); ++k) {
    for (int j : partition.overlap_set(k)) {
      const double top = true_theta.col(j).maxCoeff();
      double loss = 0.0;
      for (int r = 0; r < true_theta.rows(); ++r) loss += allocation(r, j) * (top - true_theta(r, j));
      total += partition.cond_prob(j, k) * loss;
    }
  }
  return total;
}

RunTrace run_test(const TestConfig& config, const Environment& env) {
  config.validate();
  check_environment(config, env);

  const Partition& partition = env.partition;
  const int creatives = config.creatives;
  const int cells = partition.num_cells();
  const int audiences = partition.num_audiences();
  const bool split = config.policy == Policy::kSplitTesting;
  const EconomicParams econ = resolve_economics(config, cells);
  const Eigen::MatrixXd cost_ta = aggregate_cost(econ.cost_da, partition);

  RunTrace trace;
  trace.policy = config.policy;
  trace.seed = config.seed;
  trace.true_best = env.true_best(econ);

  // Split-testing learns directly at the creative-TA level.
  PosteriorState state(creatives, split ? audiences : cells);
  std::discrete_distribution<int> arrivals(partition.arrival_shares().begin(),
                                           partition.arrival_shares().end());

  Eigen::MatrixXd allocation = Eigen::MatrixXd::Constant(creatives, cells, 1.0 / creatives);
  if (config.policy == Policy::kThompson) {
    Rng rng = make_stream(config.seed, Stream::kDraws, 0);
    allocation = allocation_from_draws(draw_theta(state, config.draws, rng), econ);
  }

  trace.batches.reserve(std::min(config.max_batches, 4096));
  for (int t = 1; t <= config.max_batches; ++t) {
    Rng rng = make_stream(config.seed, Stream::kArrivals, static_cast<std::uint64_t>(t));
    BatchRecord record;
    record.t = t;
    record.users = config.batch_size;
    record.outcome = BatchOutcome::zeros(creatives, state.contexts());
    record.allocation = allocation;

    for (int i = 0; i < config.batch_size; ++i) {
      const int j = arrivals(rng);
      Decision decision;
      switch (config.policy) {
        case Policy::kThompson: decision = ts_select(state, j, econ, rng); break;
        case Policy::kEqualAllocation: decision = ea_select(j, creatives, rng); break;
        case Policy::kSplitTesting:
          decision = st_assign(partition.cell(j).membership, creatives, audiences, rng);
          break;
      }
      if (decision.discarded()) {
        ++record.discarded;
        continue;
      }
      const int r = *decision.creative;
      const int column = split ? decision.context : j;
      record.outcome.impressions(r, column) += 1;
      if (sample_bernoulli(env.true_theta(r, j), rng)) record.outcome.clicks(r, column) += 1;
    }
    record.expected_regret_per_impression =
        expected_regret_per_impression(allocation, env.true_theta, partition);

    state.apply(record.outcome);

    Rng draw_rng = make_stream(config.seed, Stream::kDraws, static_cast<std::uint64_t>(t));
    const DrawCube theta = draw_theta(state, config.draws, draw_rng);
    const DrawCube omega =
        compute_omega(split ? theta : aggregate_lambda(theta, partition), econ.gamma, cost_ta);
    StopReport report =
        evaluate_stop(omega, config.stop_threshold, config.stop_percentile, trace.true_best);

    record.ppvr = report.ppvr;
    record.best_creative = report.best_creative;
    record.post_best_prob = report.post_best_prob;
    record.identified_best = report.identified_best;
    if (config.record_snapshots) {
      record.alpha = state.alpha();
      record.beta = state.beta();
    }
    trace.batches.push_back(std::move(record));

    if (config.policy == Policy::kThompson) allocation = allocation_from_draws(theta, econ);

    const bool stop = report.should_stop;
    trace.final_report = std::move(report);
    if (config.stopping && stop) {
      trace.stopped_at = t;
      break;
    }
  }
  return trace;
}

}  // namespace audbandit
