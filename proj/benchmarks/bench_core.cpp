#include <benchmark/benchmark.h>

#include "audbandit/aggregate.hpp"
#include "audbandit/engine.hpp"
#include "audbandit/simlab.hpp"

namespace {

using namespace audbandit;

PosteriorState warm_state() {
  PosteriorState state = init_posterior(2, 3);
  BatchOutcome b = BatchOutcome::zeros(2, 3);
  b.impressions << 400, 300, 350, 380, 310, 290;
  b.clicks << 4, 9, 9, 15, 10, 11;
  state.apply(b);
  return state;
}

void BM_BetaSampler(benchmark::State& st) {
  BetaSampler beta(12.0, 400.0);
  Rng rng(1);
  for (auto _ : st) benchmark::DoNotOptimize(beta(rng));
}
BENCHMARK(BM_BetaSampler);

void BM_DrawTheta(benchmark::State& st) {
  const PosteriorState state = warm_state();
  Rng rng(2);
  for (auto _ : st) benchmark::DoNotOptimize(draw_theta(state, static_cast<int>(st.range(0)), rng));
}
BENCHMARK(BM_DrawTheta)->Arg(100)->Arg(1000);

void BM_AggregateAndStop(benchmark::State& st) {
  const Partition partition = build_partition(2, overlap_geometry(0.5));
  Rng rng(3);
  const DrawCube theta = draw_theta(warm_state(), 1000, rng);
  const Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(2, 2);
  for (auto _ : st) {
    const DrawCube omega = compute_omega(aggregate_lambda(theta, partition), 1.0, cost);
    benchmark::DoNotOptimize(evaluate_stop(omega, 0.01, 0.95, {1, 1}));
  }
}
BENCHMARK(BM_AggregateAndStop);

void BM_RunTest(benchmark::State& st) {
  TestConfig config;
  config.population = overlap_geometry(0.5);
  config.policy = static_cast<Policy>(st.range(0));
  const auto ctrs = varying_payoff_ctrs();
  const Environment env = make_environment(build_partition(2, config.population), ctrs, 2);
  std::uint64_t seed = 0;
  for (auto _ : st) {
    config.seed = seed++;
    benchmark::DoNotOptimize(run_test(config, env));
  }
}
BENCHMARK(BM_RunTest)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
