#include "audbandit/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "audbandit/errors.hpp"

namespace audbandit {

AudienceSet two_audience_cell(int label) {
  switch (label) {
    case 1: return AudienceSet::of({1});
    case 2: return AudienceSet::of({1, 2});
    case 3: return AudienceSet::of({2});
    default: throw Error(Errc::kInvalidArgument, "two-audience cell label must be 1, 2 or 3");
  }
}

std::vector<CellCtr> varying_payoff_ctrs() {
  return {{two_audience_cell(1), {0.01, 0.03}},
          {two_audience_cell(2), {0.03, 0.05}},
          {two_audience_cell(3), {0.025, 0.035}}};
}

std::vector<CellSupport> default_ctr_supports() {
  constexpr double kHalfWidth = 0.4;
  std::vector<CellSupport> supports;
  for (const auto& cell : varying_payoff_ctrs()) {
    CellSupport s{cell.membership, {}, {}};
    for (double c : cell.ctr) {
      s.low.push_back(c * (1.0 - kHalfWidth));
      s.high.push_back(c * (1.0 + kHalfWidth));
    }
    supports.push_back(std::move(s));
  }
  return supports;
}

std::vector<CellCtr> fixed_payoff_ctrs(double q, const FixedPayoffTargets& targets) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw Error(Errc::kInvalidOverlap, "overlap share must lie in [0,1), got " + std::to_string(q));
  }
  const std::size_t creatives = targets.overlap_ctr.size();
  if (creatives == 0 || targets.audience_ctr.size() != 2 || targets.audience_ctr[0].size() != creatives ||
      targets.audience_ctr[1].size() != creatives) {
    throw Error(Errc::kInvalidDimensions, "fixed-payoff targets need 2 TAs x R creatives");
  }
  std::vector<CellCtr> cells{{two_audience_cell(1), {}},
                             {two_audience_cell(2), targets.overlap_ctr},
                             {two_audience_cell(3), {}}};
  for (int k = 0; k < 2; ++k) {
    auto& edge = cells[k == 0 ? 0 : 2].ctr;
    for (std::size_t r = 0; r < creatives; ++r) {
      const double theta = (targets.audience_ctr[k][r] - q * targets.overlap_ctr[r]) / (1.0 - q);
      if (!(theta > 0.0 && theta < 1.0)) {
        throw Error(Errc::kInfeasibleGeometry,
                    "overlap " + std::to_string(q) + " requires CTR " + std::to_string(theta) +
                        " for creative " + std::to_string(r + 1) + " in " +
                        cells[k == 0 ? 0 : 2].membership.label());
      }
      edge.push_back(theta);
    }
  }
  return cells;
}

Environment make_environment(const Partition& partition, std::span<const CellCtr> cells,
                             int creatives) {
  Environment env{Eigen::MatrixXd::Zero(creatives, partition.num_cells()), partition};
  std::vector<bool> seen(partition.num_cells(), false);
  for (const auto& cell : cells) {
    const int j = partition.find(cell.membership);
    if (j < 0) continue;
    if (static_cast<int>(cell.ctr.size()) != creatives) {
      throw Error(Errc::kInvalidDimensions, "cell " + cell.membership.label() + " needs one CTR per creative");
    }
    for (int r = 0; r < creatives; ++r) {
      if (!(cell.ctr[r] > 0.0 && cell.ctr[r] < 1.0)) {
        throw Error(Errc::kInvalidArgument, "true CTRs must lie in (0,1)");
      }
      env.true_theta(r, j) = cell.ctr[r];
    }
    seen[j] = true;
  }
  for (int j = 0; j < partition.num_cells(); ++j) {
    if (!seen[j]) {
      throw Error(Errc::kInvalidArgument, "no true CTRs given for cell " + partition.cell(j).membership.label());
    }
  }
  return env;
}

Environment sample_ctr_environment(const Partition& partition,
                                   std::span<const CellSupport> supports, int creatives,
                                   Rng& rng) {
  std::vector<CellCtr> cells;
  cells.reserve(supports.size());
  // Sample in support order so the stream does not depend on which cells the
  // partition keeps.
  for (const auto& s : supports) {
    if (static_cast<int>(s.low.size()) != creatives || static_cast<int>(s.high.size()) != creatives) {
      throw Error(Errc::kInvalidDimensions, "support for " + s.membership.label() + " needs R bounds");
    }
    CellCtr cell{s.membership, {}};
    for (int r = 0; r < creatives; ++r) {
      if (!(s.low[r] >= 0.0 && s.low[r] <= s.high[r] && s.high[r] <= 1.0)) {
        throw Error(Errc::kInvalidArgument, "CTR support must satisfy 0 <= low <= high <= 1");
      }
      const double u = std::generate_canonical<double, 53>(rng);
      double value = s.low[r] + u * (s.high[r] - s.low[r]);
      // Keep the open-interval contract of a CTR for supports touching 0 or 1.
      value = std::clamp(value, 1e-12, 1.0 - 1e-12);
      cell.ctr.push_back(value);
    }
    cells.push_back(std::move(cell));
  }
  return make_environment(partition, cells, creatives);
}

EnvironmentSource fixed_environment(Environment env) {
  return [env = std::move(env)](Rng&) { return env; };
}

EnvironmentSource sampled_environment(Partition partition, std::vector<CellSupport> supports,
                                      int creatives) {
  return [partition = std::move(partition), supports = std::move(supports), creatives](Rng& rng) {
    return sample_ctr_environment(partition, supports, creatives, rng);
  };
}

std::uint64_t replication_seed(std::uint64_t master_seed, int replication) {
  return derive_seed(master_seed, Stream::kReplication, static_cast<std::uint64_t>(replication));
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (n <= 0) return;
  if (threads <= 0) threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);

  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ReplicationSummary summarize_run(const RunTrace& trace, int replication, double threshold) {
  ReplicationSummary s;
  s.replication = replication;
  s.seed = trace.seed;
  s.stopped = trace.stopped_at.has_value();
  s.batches = static_cast<int>(trace.batches.size());
  s.first_below = trace.first_below(threshold);
  s.sample_size = trace.users();
  s.impressions = trace.impressions();
  s.total_regret = trace.total_expected_regret();
  s.correct = trace.correct_identification();
  s.post_best_prob = trace.final_report.post_best_prob;
  s.final_max_ppvr = trace.final_report.max_ppvr();
  s.true_best = trace.true_best;
  s.identified_best = trace.final_report.identified_best;
  return s;
}

namespace {

template <class Out, class Fn>
std::vector<Out> replicate(const TestConfig& config, const EnvironmentSource& source,
                           const RunnerOptions& options, Fn&& finish) {
  if (options.replications < 1) throw Error(Errc::kInvalidArgument, "replications must be >= 1");
  std::vector<Out> out(options.replications);
  parallel_for(options.replications, options.threads, [&](int i) {
    Rng env_rng = make_stream(options.master_seed, Stream::kEnvironment, static_cast<std::uint64_t>(i));
    const Environment env = source(env_rng);
    TestConfig rep = config;
    rep.seed = replication_seed(options.master_seed, i);
    out[i] = finish(run_test(rep, env), i);
  });
  return out;
}

}  // namespace

std::vector<RunTrace> run_replications(const TestConfig& config, const EnvironmentSource& source,
                                       const RunnerOptions& options) {
  return replicate<RunTrace>(config, source, options, [](RunTrace&& t, int) { return std::move(t); });
}

std::vector<ReplicationSummary> run_replication_summaries(const TestConfig& config,
                                                          const EnvironmentSource& source,
                                                          const RunnerOptions& options) {
  const double threshold = config.stop_threshold;
  return replicate<ReplicationSummary>(config, source, options, [threshold](RunTrace&& t, int i) {
    return summarize_run(t, i, threshold);
  });
}

MetricSummary summarize_metric(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::kEmptyTraces, "no values to summarize");
  std::sort(values.begin(), values.end());
  const auto rank = [&](double p) {
    auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size()) - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, values.size());
    return values[idx - 1];
  };
  MetricSummary m;
  m.min = values.front();
  m.q1 = rank(0.25);
  m.median = rank(0.5);
  m.q3 = rank(0.75);
  m.max = values.back();
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return m;
}

PointSummary summarize(std::span<const ReplicationSummary> runs) {
  if (runs.empty()) throw Error(Errc::kEmptyTraces, "no replications to summarize");
  std::vector<double> sample, regret, post;
  int correct = 0;
  int stopped = 0;
  for (const auto& r : runs) {
    sample.push_back(static_cast<double>(r.sample_size));
    regret.push_back(r.total_regret);
    post.push_back(r.post_best_prob);
    correct += r.correct ? 1 : 0;
    stopped += r.stopped ? 1 : 0;
  }
  PointSummary s;
  s.replications = static_cast<int>(runs.size());
  s.sample_size = summarize_metric(std::move(sample));
  s.total_regret = summarize_metric(std::move(regret));
  s.post_best_prob = summarize_metric(std::move(post));
  s.correct_fraction = static_cast<double>(correct) / s.replications;
  s.stopped_fraction = static_cast<double>(stopped) / s.replications;
  return s;
}

PointSummary summarize(std::span<const RunTrace> traces, double threshold) {
  if (traces.empty()) throw Error(Errc::kEmptyTraces, "no traces to summarize");
  std::vector<ReplicationSummary> runs;
  runs.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    runs.push_back(summarize_run(traces[i], static_cast<int>(i), threshold));
  }
  return summarize(runs);
}

std::string_view to_string(SweepMode mode) {
  return mode == SweepMode::kVaryingPayoff ? "varying-payoff" : "fixed-payoff";
}

double top2_gap(const Eigen::MatrixXd& payoff) {
  std::vector<double> values(payoff.data(), payoff.data() + payoff.size());
  if (values.size() < 2) return 0.0;
  std::sort(values.begin(), values.end(), std::greater<>());
  return values[0] - values[1];
}

SweepResult overlap_sweep(const SweepSpec& spec, const TestConfig& base,
                          const RunnerOptions& options) {
  if (spec.grid.empty()) throw Error(Errc::kInvalidArgument, "overlap grid is empty");
  for (double q : spec.grid) {
    if (!(q >= 0.0 && q < 1.0)) throw Error(Errc::kInvalidOverlap, "grid value outside [0,1)");
  }
  SweepResult result;
  result.mode = spec.mode;
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    SweepPoint point;
    point.index = static_cast<int>(i);
    point.overlap = spec.grid[i];

    TestConfig config = base;
    config.audiences = 2;
    config.population = overlap_geometry(point.overlap);
    const Partition partition = build_partition(2, config.population);

    std::vector<CellCtr> cells;
    try {
      cells = spec.mode == SweepMode::kVaryingPayoff
                  ? spec.varying_ctrs
                  : fixed_payoff_ctrs(point.overlap, spec.fixed_targets);
    } catch (const Error& e) {
      if (e.code() != Errc::kInfeasibleGeometry) throw;
      point.feasible = false;
      point.error = e.what();
      result.points.push_back(std::move(point));
      continue;
    }
    const Environment env = make_environment(partition, cells, config.creatives);
    point.true_theta = env.true_theta;
    EconomicParams econ = config.econ;
    if (econ.cost_da.size() == 0) econ.cost_da = Eigen::MatrixXd::Zero(config.creatives, partition.num_cells());
    point.top2_gap = top2_gap(env.true_payoff(econ));

    RunnerOptions point_options = options;
    point_options.master_seed = derive_seed(options.master_seed, Stream::kGridPoint, i);
    point.runs = run_replication_summaries(config, fixed_environment(env), point_options);
    point.summary = summarize(point.runs);
    result.points.push_back(std::move(point));
  }
  return result;
}

std::vector<PolicyComparison> compare_policies(const TestConfig& base,
                                               std::span<const Policy> policies,
                                               const EnvironmentSource& source,
                                               const RunnerOptions& options) {
  std::vector<PolicyComparison> out;
  for (Policy policy : policies) {
    TestConfig config = base;
    config.policy = policy;
    PolicyComparison c;
    c.policy = policy;
    c.runs = run_replication_summaries(config, source, options);
    c.summary = summarize(c.runs);
    out.push_back(std::move(c));
  }
  return out;
}

double FaceValidityResult::reached_fraction() const {
  if (first_below.empty()) return 0.0;
  const auto reached = std::count_if(first_below.begin(), first_below.end(),
                                     [](const auto& t) { return t.has_value(); });
  return static_cast<double>(reached) / static_cast<double>(first_below.size());
}

MetricSummary FaceValidityResult::at_batch(const std::vector<std::vector<double>>& metric, int t) const {
  std::vector<double> values;
  values.reserve(metric.size());
  for (const auto& path : metric) values.push_back(path.at(t - 1));
  return summarize_metric(std::move(values));
}

FaceValidityResult face_validity(const TestConfig& config, const EnvironmentSource& source,
                                 const RunnerOptions& options) {
  struct Paths {
    std::vector<double> ppvr, regret, post;
    std::optional<int> first_below;
  };
  TestConfig full = config;
  full.stopping = false;
  const double threshold = full.stop_threshold;
  auto paths = replicate<Paths>(full, source, options, [threshold](RunTrace&& trace, int) {
    Paths p;
    for (const auto& b : trace.batches) {
      p.ppvr.push_back(b.max_ppvr());
      p.regret.push_back(b.expected_regret_per_impression);
      p.post.push_back(b.post_best_prob);
    }
    p.first_below = trace.first_below(threshold);
    return p;
  });
  FaceValidityResult result;
  result.batches = full.max_batches;
  for (auto& p : paths) {
    result.max_ppvr.push_back(std::move(p.ppvr));
    result.regret_per_impression.push_back(std::move(p.regret));
    result.post_best_prob.push_back(std::move(p.post));
    result.first_below.push_back(p.first_below);
  }
  return result;
}

}  // namespace audbandit
