#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "audbandit/audience.hpp"
#include "audbandit/engine.hpp"
#include "audbandit/random.hpp"

namespace audbandit {

// True CTR per creative for the cell with the given membership.
struct CellCtr {
  AudienceSet membership;
  std::vector<double> ctr;
};

// Independent uniform supports [low_r, high_r] per creative for one cell.
struct CellSupport {
  AudienceSet membership;
  std::vector<double> low;
  std::vector<double> high;
};

// The three cells of the two-TA geometry, numbered as in the experiments:
// 1 = TA1 only, 2 = overlap, 3 = TA2 only.
AudienceSet two_audience_cell(int label);

// C-DA CTRs [.01,.03 | .03,.05 | .025,.035] for cells 1..3.
std::vector<CellCtr> varying_payoff_ctrs();

// Uniform supports centered on varying_payoff_ctrs() with +/-40% relative
// half-width.
std::vector<CellSupport> default_ctr_supports();

// Fixed C-TA targets for the pure cross-audience-learning sweep.
struct FixedPayoffTargets {
  std::vector<double> overlap_ctr{0.015, 0.025};
  // audience_ctr[k][r]
  std::vector<std::vector<double>> audience_ctr{{0.035, 0.05}, {0.015, 0.03}};
};

// Solves lambda_{r,TA} = (1-q) theta_{r,edge} + q theta_{r,overlap} for the two
// non-overlapping cells. Throws InfeasibleGeometry when a derived CTR leaves (0,1).
std::vector<CellCtr> fixed_payoff_ctrs(double q, const FixedPayoffTargets& targets = {});

// Maps cell CTRs onto the partition order. Entries for cells absent from the
// partition (zero mass) are ignored; partition cells without an entry throw
// InvalidArgument.
Environment make_environment(const Partition& partition, std::span<const CellCtr> cells,
                             int creatives);

// Draws each arm's true CTR uniformly from its cell's support.
Environment sample_ctr_environment(const Partition& partition,
                                   std::span<const CellSupport> supports, int creatives,
                                   Rng& rng);

using EnvironmentSource = std::function<Environment(Rng&)>;

EnvironmentSource fixed_environment(Environment env);
EnvironmentSource sampled_environment(Partition partition, std::vector<CellSupport> supports,
                                      int creatives);

struct RunnerOptions {
  int replications = 200;
  std::uint64_t master_seed = 0;
  // 0 = hardware concurrency.
  int threads = 0;
};

// Per-replication seed and environment stream, independent of execution order.
std::uint64_t replication_seed(std::uint64_t master_seed, int replication);

// Runs body(i) for i in [0, n) on a worker pool. The exception of the lowest
// failing index, if any, is rethrown after all workers finish.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

struct ReplicationSummary {
  int replication = 0;
  std::uint64_t seed = 0;
  bool stopped = false;
  int batches = 0;
  std::optional<int> first_below;
  std::int64_t sample_size = 0;  // users arrived, including discards
  std::int64_t impressions = 0;
  double total_regret = 0.0;
  bool correct = false;
  double post_best_prob = 0.0;
  double final_max_ppvr = 0.0;
  ArmIndex true_best;
  ArmIndex identified_best;
};

ReplicationSummary summarize_run(const RunTrace& trace, int replication, double threshold);

std::vector<RunTrace> run_replications(const TestConfig& config, const EnvironmentSource& source,
                                       const RunnerOptions& options);

// As run_replications, but keeps only the per-replication summary.
std::vector<ReplicationSummary> run_replication_summaries(const TestConfig& config,
                                                          const EnvironmentSource& source,
                                                          const RunnerOptions& options);

// Box-plot statistics; quantiles by nearest rank.
struct MetricSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

MetricSummary summarize_metric(std::vector<double> values);

struct PointSummary {
  int replications = 0;
  MetricSummary sample_size;
  MetricSummary total_regret;
  MetricSummary post_best_prob;
  double correct_fraction = 0.0;
  double stopped_fraction = 0.0;
};

// Throws EmptyTraces on empty input.
PointSummary summarize(std::span<const ReplicationSummary> runs);
PointSummary summarize(std::span<const RunTrace> traces, double threshold);

enum class SweepMode { kVaryingPayoff, kFixedPayoff };

std::string_view to_string(SweepMode mode);

struct SweepPoint {
  int index = 0;
  double overlap = 0.0;
  bool feasible = true;
  std::string error;
  Eigen::MatrixXd true_theta;
  // Difference between the two highest true C-TA payoffs.
  double top2_gap = 0.0;
  std::vector<ReplicationSummary> runs;
  PointSummary summary;
};

struct SweepResult {
  SweepMode mode = SweepMode::kVaryingPayoff;
  std::vector<SweepPoint> points;
};

struct SweepSpec {
  std::vector<double> grid;
  SweepMode mode = SweepMode::kVaryingPayoff;
  std::vector<CellCtr> varying_ctrs = varying_payoff_ctrs();
  FixedPayoffTargets fixed_targets;
};

// Two-TA overlap sweep. The base config supplies the test parameters; its
// population is replaced by overlap_geometry(q) at each grid point. Grid
// points run with independent master seeds. InfeasibleGeometry is recorded on
// the point and the sweep continues.
SweepResult overlap_sweep(const SweepSpec& spec, const TestConfig& base,
                          const RunnerOptions& options);

double top2_gap(const Eigen::MatrixXd& payoff);

struct PolicyComparison {
  Policy policy = Policy::kThompson;
  std::vector<ReplicationSummary> runs;
  PointSummary summary;
};

// Runs every policy on the same replication seeds and environments.
std::vector<PolicyComparison> compare_policies(const TestConfig& base,
                                               std::span<const Policy> policies,
                                               const EnvironmentSource& source,
                                               const RunnerOptions& options);

// Per-batch metric paths of replications run to max_batches without stopping.
struct FaceValidityResult {
  int batches = 0;
  // [replication][batch]
  std::vector<std::vector<double>> max_ppvr;
  std::vector<std::vector<double>> regret_per_impression;
  std::vector<std::vector<double>> post_best_prob;
  std::vector<std::optional<int>> first_below;

  double reached_fraction() const;
  // Box statistics of one metric across replications at batch t (1-based).
  MetricSummary at_batch(const std::vector<std::vector<double>>& metric, int t) const;
};

FaceValidityResult face_validity(const TestConfig& config, const EnvironmentSource& source,
                                 const RunnerOptions& options);

}  // namespace audbandit
