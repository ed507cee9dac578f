#include "audbandit/engine.hpp"

#include <gtest/gtest.h>

#include "audbandit/errors.hpp"
#include "audbandit/simlab.hpp"

namespace audbandit {
namespace {

TestConfig two_ta_config(Policy policy, double q, std::uint64_t seed) {
  TestConfig config;
  config.population = overlap_geometry(q);
  config.policy = policy;
  config.seed = seed;
  config.draws = 300;
  config.max_batches = 200;
  return config;
}

Environment two_ta_env(double q) {
  const auto ctrs = varying_payoff_ctrs();
  return make_environment(build_partition(2, overlap_geometry(q)), ctrs, 2);
}

void expect_same_batch(const BatchRecord& a, const BatchRecord& b) {
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.users, b.users);
  EXPECT_EQ(a.discarded, b.discarded);
  EXPECT_EQ(a.outcome.impressions, b.outcome.impressions);
  EXPECT_EQ(a.outcome.clicks, b.outcome.clicks);
  EXPECT_EQ(a.allocation, b.allocation);
  EXPECT_EQ(a.ppvr, b.ppvr);
  EXPECT_EQ(a.best_creative, b.best_creative);
  EXPECT_EQ(a.post_best_prob, b.post_best_prob);
}

TEST(RegretPerImpression, SingleAudience) {
  PopulationModel pop;
  pop.set_mass(AudienceSet::of({1}), 1.0);
  const Partition p = build_partition(1, pop);
  Eigen::MatrixXd theta(2, 1), w(2, 1);
  theta << 0.01, 0.03;
  w << 0.25, 0.75;
  EXPECT_NEAR(expected_regret_per_impression(w, theta, p), 0.005, 1e-15);
  w << 0.0, 1.0;
  EXPECT_EQ(expected_regret_per_impression(w, theta, p), 0.0);
  w << 0.5, 0.6;
  EXPECT_THROW(expected_regret_per_impression(w, theta, p), Error);
}

TEST(RegretPerImpression, OverlapUniform) {
  const Environment env = two_ta_env(0.5);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Constant(2, 3, 0.5);
  // Per-cell loss .01, .01, .005; TA1 averages the first two, TA2 the last two.
  const double oracle = (0.5 * 0.01 + 0.5 * 0.01) + (0.5 * 0.01 + 0.5 * 0.005);
  EXPECT_NEAR(expected_regret_per_impression(w, env.true_theta, env.partition), oracle, 1e-15);
  EXPECT_NEAR(oracle, 0.0175, 1e-15);
}

TEST(Environment, TrueBest) {
  const Environment env = two_ta_env(0.5);
  const Eigen::MatrixXd lambda = env.true_lambda();
  EXPECT_NEAR(lambda(0, 0), 0.02, 1e-15);
  EXPECT_NEAR(lambda(1, 1), 0.0425, 1e-15);
  EXPECT_EQ(env.true_best(EconomicParams{}), (ArmIndex{1, 1}));
}

TEST(RunTest, SingleCreativeStopsImmediately) {
  TestConfig config = two_ta_config(Policy::kThompson, 0.5, 1);
  config.creatives = 1;
  Environment env = two_ta_env(0.5);
  env.true_theta = env.true_theta.row(0).eval();
  const RunTrace trace = run_test(config, env);
  ASSERT_EQ(trace.stopped_at, 1);
  EXPECT_EQ(trace.batches.size(), 1U);
  EXPECT_EQ(trace.batches[0].ppvr, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(trace.batches[0].expected_regret_per_impression, 0.0);
}

TEST(RunTest, Deterministic) {
  for (Policy policy : {Policy::kThompson, Policy::kEqualAllocation, Policy::kSplitTesting}) {
    const TestConfig config = two_ta_config(policy, 0.3, 99);
    const Environment env = two_ta_env(0.3);
    const RunTrace a = run_test(config, env);
    const RunTrace b = run_test(config, env);
    ASSERT_EQ(a.batches.size(), b.batches.size());
    for (std::size_t i = 0; i < a.batches.size(); ++i) expect_same_batch(a.batches[i], b.batches[i]);
    EXPECT_EQ(a.stopped_at, b.stopped_at);
  }
}

TEST(RunTest, UserConservation) {
  for (Policy policy : {Policy::kThompson, Policy::kEqualAllocation, Policy::kSplitTesting}) {
    const RunTrace trace = run_test(two_ta_config(policy, 0.5, 5), two_ta_env(0.5));
    std::int64_t discarded = 0;
    for (const auto& b : trace.batches) {
      EXPECT_EQ(b.users, 100);
      EXPECT_EQ(b.outcome.total_impressions() + b.discarded, b.users);
      EXPECT_LE((b.outcome.clicks.array() - b.outcome.impressions.array()).maxCoeff(), 0);
      discarded += b.discarded;
    }
    if (policy == Policy::kSplitTesting) {
      EXPECT_GT(discarded, 0);
      EXPECT_EQ(trace.batches[0].outcome.impressions.cols(), 2);
    } else {
      EXPECT_EQ(discarded, 0);
      EXPECT_EQ(trace.batches[0].outcome.impressions.cols(), 3);
    }
    EXPECT_EQ(trace.users(), trace.impressions() + discarded);
  }
}

TEST(RunTest, StoppingDisabledExtendsTheSamePath) {
  TestConfig config = two_ta_config(Policy::kThompson, 0.5, 17);
  const Environment env = two_ta_env(0.5);
  const RunTrace stopped = run_test(config, env);
  ASSERT_TRUE(stopped.stopped_at.has_value());
  config.stopping = false;
  config.max_batches = *stopped.stopped_at + 5;
  const RunTrace full = run_test(config, env);
  ASSERT_EQ(full.batches.size(), static_cast<std::size_t>(config.max_batches));
  EXPECT_FALSE(full.stopped_at.has_value());
  for (std::size_t i = 0; i < stopped.batches.size(); ++i) expect_same_batch(stopped.batches[i], full.batches[i]);
}

TEST(RunTest, StopRuleRespected) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TestConfig config = two_ta_config(Policy::kThompson, 0.5, seed);
    const RunTrace trace = run_test(config, two_ta_env(0.5));
    for (std::size_t i = 0; i + 1 < trace.batches.size(); ++i) {
      EXPECT_GE(trace.batches[i].max_ppvr(), config.stop_threshold);
    }
    if (trace.stopped_at) {
      EXPECT_LT(trace.batches.back().max_ppvr(), config.stop_threshold);
      EXPECT_EQ(*trace.stopped_at, static_cast<int>(trace.batches.size()));
      EXPECT_EQ(trace.first_below(config.stop_threshold), trace.stopped_at);
    } else {
      EXPECT_EQ(trace.batches.size(), static_cast<std::size_t>(config.max_batches));
    }
  }
}

TEST(RunTest, CountsNeverDecrease) {
  TestConfig config = two_ta_config(Policy::kThompson, 0.4, 3);
  config.record_snapshots = true;
  config.stopping = false;
  config.max_batches = 40;
  const RunTrace trace = run_test(config, two_ta_env(0.4));
  Eigen::MatrixXd prev_a = Eigen::MatrixXd::Ones(2, 3), prev_b = prev_a;
  for (const auto& b : trace.batches) {
    ASSERT_TRUE(b.alpha && b.beta);
    EXPECT_TRUE((b.alpha->array() >= prev_a.array()).all());
    EXPECT_TRUE((b.beta->array() >= prev_b.array()).all());
    prev_a = *b.alpha;
    prev_b = *b.beta;
  }
  EXPECT_EQ(prev_a.sum() + prev_b.sum() - 12.0, 4000.0);
}

TEST(RunTest, ConfigMismatch) {
  const TestConfig config = two_ta_config(Policy::kThompson, 0.5, 1);
  for (const Environment& env : {two_ta_env(0.3), two_ta_env(0.0)}) {
    try {
      run_test(config, env);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kConfigMismatch);
    }
  }
  Environment wrong = two_ta_env(0.5);
  wrong.true_theta = Eigen::MatrixXd::Constant(3, 3, 0.02);
  EXPECT_THROW(run_test(config, wrong), Error);
  TestConfig bad = config;
  bad.stop_percentile = 1.5;
  EXPECT_THROW(run_test(bad, two_ta_env(0.5)), Error);
}

// Thompson allocation concentrates on the best arms, so expected regret per
// impression late in a long run is below that of an early batch.
TEST(RunTest, RegretShrinksUnderThompson) {
  const Environment env = two_ta_env(0.5);
  double early = 0.0, late = 0.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    TestConfig config = two_ta_config(Policy::kThompson, 0.5, seed);
    config.stopping = false;
    config.max_batches = 200;
    config.draws = 200;
    const RunTrace trace = run_test(config, env);
    early += trace.batches[19].expected_regret_per_impression;
    late += trace.batches[199].expected_regret_per_impression;
  }
  EXPECT_LT(late, early);
}

TEST(RunTest, EqualAllocationRegretIsConstant) {
  TestConfig config = two_ta_config(Policy::kEqualAllocation, 0.5, 2);
  config.stopping = false;
  config.max_batches = 10;
  const RunTrace trace = run_test(config, two_ta_env(0.5));
  for (const auto& b : trace.batches) EXPECT_NEAR(b.expected_regret_per_impression, 0.0175, 1e-15);
}

}  // namespace
}  // namespace audbandit
