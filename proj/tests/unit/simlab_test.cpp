#include "audbandit/simlab.hpp"

#include <gtest/gtest.h>

#include "audbandit/errors.hpp"

namespace audbandit {
namespace {

const std::vector<double>& ctr_of(const std::vector<CellCtr>& cells, int label) {
  for (const auto& c : cells)
    if (c.membership == two_audience_cell(label)) return c.ctr;
  throw std::logic_error("missing cell");
}

TestConfig small_config(double q) {
  TestConfig config;
  config.population = overlap_geometry(q);
  config.draws = 200;
  config.max_batches = 150;
  return config;
}

TEST(FixedPayoff, NoOverlapPassesTargetsThrough) {
  const auto cells = fixed_payoff_ctrs(0.0);
  EXPECT_EQ(ctr_of(cells, 1), (std::vector<double>{0.035, 0.05}));
  EXPECT_EQ(ctr_of(cells, 3), (std::vector<double>{0.015, 0.03}));
  EXPECT_EQ(ctr_of(cells, 2), (std::vector<double>{0.015, 0.025}));
}

TEST(FixedPayoff, HighOverlap) {
  const auto cells = fixed_payoff_ctrs(0.9);
  EXPECT_NEAR(ctr_of(cells, 1)[0], 0.215, 1e-12);
  EXPECT_NEAR(ctr_of(cells, 1)[1], 0.275, 1e-12);
  EXPECT_NEAR(ctr_of(cells, 3)[0], 0.015, 1e-12);
  EXPECT_NEAR(ctr_of(cells, 3)[1], 0.075, 1e-12);
}

TEST(FixedPayoff, RoundTripAndInfeasibility) {
  const FixedPayoffTargets targets;
  for (int i = 0; i <= 95; ++i) {
    const double q = i / 100.0;
    std::vector<CellCtr> cells;
    try {
      cells = fixed_payoff_ctrs(q);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kInfeasibleGeometry);
      EXPECT_GT(q, 0.9);
      continue;
    }
    const Environment env = make_environment(build_partition(2, overlap_geometry(q)), cells, 2);
    const Eigen::MatrixXd lambda = env.true_lambda();
    for (int k = 0; k < 2; ++k)
      for (int r = 0; r < 2; ++r) EXPECT_NEAR(lambda(r, k), targets.audience_ctr[k][r], 1e-12);
  }
  try {
    fixed_payoff_ctrs(0.99);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInfeasibleGeometry);
  }
}

TEST(MakeEnvironment, Mapping) {
  const auto ctrs = varying_payoff_ctrs();
  const Environment disjoint = make_environment(build_partition(2, overlap_geometry(0.0)), ctrs, 2);
  EXPECT_EQ(disjoint.true_theta.cols(), 2);
  const std::vector<CellCtr> partial{ctrs[0], ctrs[2]};
  EXPECT_THROW(make_environment(build_partition(2, overlap_geometry(0.5)), partial, 2), Error);
}

TEST(SampleEnvironment, DegenerateSupports) {
  std::vector<CellSupport> supports;
  for (const auto& c : varying_payoff_ctrs()) supports.push_back({c.membership, c.ctr, c.ctr});
  const Partition p = build_partition(2, overlap_geometry(0.5));
  Rng rng(4);
  const Environment sampled = sample_ctr_environment(p, supports, 2, rng);
  const auto ctrs = varying_payoff_ctrs();
  EXPECT_EQ(sampled.true_theta, make_environment(p, ctrs, 2).true_theta);
}

TEST(SampleEnvironment, WithinSupports) {
  const auto supports = default_ctr_supports();
  const Partition p = build_partition(2, overlap_geometry(0.5));
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Environment env = sample_ctr_environment(p, supports, 2, rng);
    for (const auto& s : supports) {
      const int j = p.find(s.membership);
      for (int r = 0; r < 2; ++r) {
        EXPECT_GE(env.true_theta(r, j), s.low[r]);
        EXPECT_LE(env.true_theta(r, j), s.high[r]);
      }
    }
  }
}

TEST(Runner, SingleReplicationMatchesDirectRun) {
  const TestConfig config = small_config(0.5);
  const Environment env = make_environment(build_partition(2, overlap_geometry(0.5)), varying_payoff_ctrs(), 2);
  const auto traces = run_replications(config, fixed_environment(env), {1, 77, 1});
  ASSERT_EQ(traces.size(), 1U);
  TestConfig direct = config;
  direct.seed = replication_seed(77, 0);
  const RunTrace expect = run_test(direct, env);
  EXPECT_EQ(traces[0].seed, direct.seed);
  ASSERT_EQ(traces[0].batches.size(), expect.batches.size());
  EXPECT_EQ(traces[0].impressions(), expect.impressions());
  EXPECT_EQ(traces[0].total_expected_regret(), expect.total_expected_regret());
}

TEST(Runner, ReproducibleAcrossThreadCounts) {
  const TestConfig config = small_config(0.3);
  const auto source = sampled_environment(build_partition(2, overlap_geometry(0.3)), default_ctr_supports(), 2);
  const auto a = run_replication_summaries(config, source, {6, 11, 1});
  const auto b = run_replication_summaries(config, source, {6, 11, 3});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].sample_size, b[i].sample_size);
    EXPECT_EQ(a[i].total_regret, b[i].total_regret);
    EXPECT_EQ(a[i].correct, b[i].correct);
  }
  EXPECT_NE(a[0].seed, a[1].seed);
}

TEST(Runner, ParallelForRethrowsLowestIndex) {
  try {
    parallel_for(10, 3, [](int i) {
      if (i == 4 || i == 7) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "4");
  }
}

TEST(Summary, NearestRankQuartiles) {
  const MetricSummary s = summarize_metric({5, 1, 4, 2, 3});
  EXPECT_EQ(s.min, 1);
  EXPECT_EQ(s.q1, 2);
  EXPECT_EQ(s.median, 3);
  EXPECT_EQ(s.q3, 4);
  EXPECT_EQ(s.max, 5);
  EXPECT_EQ(s.mean, 3);
}

TEST(Summary, EmptyTraces) {
  try {
    summarize(std::span<const RunTrace>{}, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyTraces);
  }
  EXPECT_THROW(summarize(std::span<const ReplicationSummary>{}), Error);
}

TEST(Summary, SingleCreativeAlwaysCorrect) {
  TestConfig config;
  config.creatives = 1;
  config.audiences = 1;
  config.population.set_mass(AudienceSet::of({1}), 1.0);
  config.draws = 100;
  const Partition p = build_partition(1, config.population);
  Environment env{Eigen::MatrixXd::Constant(1, 1, 0.03), p};
  const auto traces = run_replications(config, fixed_environment(env), {10, 3, 1});
  const PointSummary s = summarize(traces, config.stop_threshold);
  EXPECT_EQ(s.correct_fraction, 1.0);
  EXPECT_EQ(s.stopped_fraction, 1.0);
  EXPECT_EQ(s.sample_size.max, 100);
}

TEST(Sweep, Top2Gap) {
  const Environment env = make_environment(build_partition(2, overlap_geometry(0.5)), varying_payoff_ctrs(), 2);
  EXPECT_NEAR(top2_gap(env.true_payoff(EconomicParams{})), 0.0025, 1e-15);
}

TEST(Sweep, InfeasiblePointIsRecorded) {
  SweepSpec spec;
  spec.grid = {0.5, 0.99};
  spec.mode = SweepMode::kFixedPayoff;
  TestConfig config = small_config(0.0);
  config.max_batches = 20;
  const SweepResult result = overlap_sweep(spec, config, {3, 1, 1});
  ASSERT_EQ(result.points.size(), 2U);
  EXPECT_TRUE(result.points[0].feasible);
  EXPECT_EQ(result.points[0].runs.size(), 3U);
  EXPECT_NEAR(result.points[0].top2_gap, 0.015, 1e-12);
  EXPECT_FALSE(result.points[1].feasible);
  EXPECT_NE(result.points[1].error.find("InfeasibleGeometry"), std::string::npos);
  EXPECT_TRUE(result.points[1].runs.empty());
  spec.grid = {};
  EXPECT_THROW(overlap_sweep(spec, config, {3, 1, 1}), Error);
}

TEST(Compare, SharedEnvironments) {
  const TestConfig config = small_config(0.5);
  const auto source = sampled_environment(build_partition(2, overlap_geometry(0.5)), default_ctr_supports(), 2);
  const Policy policies[] = {Policy::kThompson, Policy::kEqualAllocation, Policy::kSplitTesting};
  const auto result = compare_policies(config, policies, source, {4, 9, 1});
  ASSERT_EQ(result.size(), 3U);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(result[0].runs[i].seed, result[1].runs[i].seed);
    EXPECT_EQ(result[0].runs[i].true_best, result[2].runs[i].true_best);
  }
}

TEST(FaceValidity, PathShapes) {
  TestConfig config = small_config(0.5);
  config.max_batches = 30;
  const Environment env = make_environment(build_partition(2, overlap_geometry(0.5)), varying_payoff_ctrs(), 2);
  const FaceValidityResult fv = face_validity(config, fixed_environment(env), {5, 2, 1});
  EXPECT_EQ(fv.batches, 30);
  ASSERT_EQ(fv.max_ppvr.size(), 5U);
  for (const auto& path : fv.regret_per_impression) EXPECT_EQ(path.size(), 30U);
  const MetricSummary at1 = fv.at_batch(fv.max_ppvr, 1);
  EXPECT_LE(at1.min, at1.max);
  EXPECT_GE(fv.reached_fraction(), 0.0);
  EXPECT_LE(fv.reached_fraction(), 1.0);
}

}  // namespace
}  // namespace audbandit
