#include "cli/commands.hpp"

#include <cstdlib>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "audbandit/errors.hpp"
#include "cli/output.hpp"
#include "cli/svg.hpp"

namespace audbandit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Errors raised while turning the config into model objects are config errors.
template <typename F>
auto configured(F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunnerOptions runner_options(const CliConfig& config) {
  return {config.replications, config.seed, config.threads};
}

json members_json(AudienceSet set) { return set.ids(); }

json contexts_json(const Partition& partition) {
  json out = json::array();
  for (int j = 0; j < partition.num_cells(); ++j) {
    out.push_back({{"da", j + 1},
                   {"members", members_json(partition.cell(j).membership)},
                   {"mass", partition.cell(j).mass}});
  }
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json header(const CliConfig& config, Experiment experiment) {
  return {{"experiment", to_string(experiment)},
          {"generated_at", utc_timestamp()},
          {"seed", config.seed},
          {"creatives", config.creatives},
          {"audiences", config.audiences},
          {"test",
           {{"batch_size", config.test.batch_size},
            {"draws", config.test.draws},
            {"stop_threshold", config.test.stop_threshold},
            {"stop_percentile", config.test.stop_percentile},
            {"max_batches", config.test.max_batches},
            {"stopping", config.test.stopping},
            {"gamma", config.gamma}}}};
}

MetricSummary metric(const std::vector<ReplicationSummary>& runs, double ReplicationSummary::*field) {
  std::vector<double> values;
  for (const auto& r : runs) values.push_back(r.*field);
  return summarize_metric(std::move(values));
}

MetricSummary sample_sizes(const std::vector<ReplicationSummary>& runs) {
  std::vector<double> values;
  for (const auto& r : runs) values.push_back(static_cast<double>(r.sample_size));
  return summarize_metric(std::move(values));
}

// Box-plot panels shared by compare and sweep output. Plotting never fails
// the command.
void write_panels(const fs::path& dir, const std::string& context,
                  const std::vector<std::pair<std::string, const std::vector<ReplicationSummary>*>>& groups,
                  std::ostream& out) {
  struct Panel {
    const char* file;
    const char* title;
    const char* axis;
    std::function<MetricSummary(const std::vector<ReplicationSummary>&)> stat;
  };
  const Panel panels[] = {
      {"sample_size.svg", "Sample size at stop", "users", sample_sizes},
      {"total_regret.svg", "Total expected regret", "clicks",
       [](const auto& runs) { return metric(runs, &ReplicationSummary::total_regret); }},
      {"post_best_prob.svg", "Posterior probability of the true best", "probability",
       [](const auto& runs) { return metric(runs, &ReplicationSummary::post_best_prob); }},
      {"final_max_ppvr.svg", "Final max pPVR", "pPVR",
       [](const auto& runs) { return metric(runs, &ReplicationSummary::final_max_ppvr); }},
  };
  for (const Panel& panel : panels) {
    try {
      std::vector<BoxSeries> series;
      for (const auto& [label, runs] : groups) {
        if (!runs->empty()) series.push_back({label, panel.stat(*runs)});
      }
      write_file(dir / "plots" / panel.file, render_box_plot(panel.title + (" " + context), panel.axis, series));
    } catch (const std::exception& e) {
      out << "warning: plot " << panel.file << " skipped: " << e.what() << "\n";
    }
  }
}

void require_two_audiences(const CliConfig& config) {
  if (config.audiences != 2) throw ConfigError("overlap sweeps need exactly 2 target audiences");
}

}  // namespace

void apply_overrides(CliConfig& config, const Overrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.replications) config.replications = *overrides.replications;
  if (overrides.out) config.output_dir = *overrides.out;
}

fs::path resolve_output_dir(const CliConfig& config) {
  if (config.output_dir) return *config.output_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "audbandit-out";
}

void cmd_partition(const CliConfig& config, std::ostream& out) {
  const Partition partition = configured([&] { return build_partition(config.audiences, config.population); });
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{"DA", "members", "mass"};
  for (int k = 0; k < partition.num_audiences(); ++k) head.push_back("p(j|TA" + std::to_string(k + 1) + ")");
  rows.push_back(head);
  for (int j = 0; j < partition.num_cells(); ++j) {
    std::vector<std::string> row{std::to_string(j + 1), partition.cell(j).membership.label(),
                                 format_number(partition.cell(j).mass)};
    for (int k = 0; k < partition.num_audiences(); ++k) row.push_back(format_number(partition.cond_prob(j, k)));
    rows.push_back(row);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c + 1 < row.size()) {
        out << std::left << std::setw(static_cast<int>(width[c] + 2)) << row[c];
      } else {
        out << row[c] << "\n";
      }
    }
  }
}

void cmd_run(const CliConfig& config, const fs::path& dir, std::ostream& out) {
  const auto [test, env] = configured([&] {
    const Partition partition = build_partition(config.audiences, config.population);
    TestConfig test = make_test_config(config, config.population);
    Environment env;
    if (config.environment.kind == EnvironmentSpec::Kind::kCells) {
      env = make_environment(partition, config.environment.cells, config.creatives);
    } else {
      Rng rng = make_stream(config.seed, Stream::kEnvironment, 0);
      env = sample_ctr_environment(partition, config.environment.supports, config.creatives, rng);
    }
    return std::pair{test, env};
  });
  const RunTrace trace = run_test(test, env);

  const Partition& partition = env.partition;
  const bool split = test.policy == Policy::kSplitTesting;
  const int R = test.creatives, K = partition.num_audiences(), J = partition.num_cells();
  const int columns = split ? K : J;
  auto ctx = [&](int c) { return (split ? "ta" : "da") + std::to_string(c + 1); };

  std::ostringstream csv_text;
  CsvWriter csv(csv_text);
  std::vector<std::string> head{"t", "users", "discarded"};
  for (int k = 0; k < K; ++k) head.push_back("ppvr_ta" + std::to_string(k + 1));
  head.push_back("max_ppvr");
  for (int k = 0; k < K; ++k) head.push_back("best_creative_ta" + std::to_string(k + 1));
  head.push_back("regret_per_impression");
  head.push_back("post_best_prob");
  for (const char* prefix : {"n", "s"})
    for (int r = 0; r < R; ++r)
      for (int c = 0; c < columns; ++c) head.push_back(std::string(prefix) + "_c" + std::to_string(r + 1) + "_" + ctx(c));
  for (int r = 0; r < R; ++r)
    for (int j = 0; j < J; ++j) head.push_back("w_c" + std::to_string(r + 1) + "_da" + std::to_string(j + 1));
  if (test.record_snapshots) {
    for (const char* prefix : {"alpha", "beta"})
      for (int r = 0; r < R; ++r)
        for (int c = 0; c < columns; ++c)
          head.push_back(std::string(prefix) + "_c" + std::to_string(r + 1) + "_" + ctx(c));
  }
  csv.row(head);
  for (const auto& b : trace.batches) {
    csv.field(b.t).field(b.users).field(b.discarded);
    for (double v : b.ppvr) csv.field(v);
    csv.field(b.max_ppvr());
    for (int r : b.best_creative) csv.field(r + 1);
    csv.field(b.expected_regret_per_impression).field(b.post_best_prob);
    for (const CountMatrix* m : {&b.outcome.impressions, &b.outcome.clicks})
      for (int r = 0; r < R; ++r)
        for (int c = 0; c < columns; ++c) csv.field(static_cast<std::int64_t>((*m)(r, c)));
    for (int r = 0; r < R; ++r)
      for (int j = 0; j < J; ++j) csv.field(b.allocation(r, j));
    if (test.record_snapshots) {
      for (const Eigen::MatrixXd* m : {&*b.alpha, &*b.beta})
        for (int r = 0; r < R; ++r)
          for (int c = 0; c < columns; ++c) csv.field((*m)(r, c));
    }
    csv.end_row();
  }

  std::int64_t clicks = 0;
  for (const auto& b : trace.batches) clicks += b.outcome.clicks.sum();
  json summary = header(config, Experiment::kSingleRun);
  summary["policy"] = to_string(test.policy);
  summary["run_seed"] = trace.seed;
  summary["stopped_at"] = trace.stopped_at ? json(*trace.stopped_at) : json(nullptr);
  summary["batches"] = trace.batches.size();
  summary["users"] = trace.users();
  summary["impressions"] = trace.impressions();
  summary["clicks"] = clicks;
  summary["total_regret"] = trace.total_expected_regret();
  json final_best = json::array();
  for (int r : trace.final_best()) final_best.push_back(r + 1);
  summary["final_best"] = final_best;
  summary["final_ppvr"] = trace.final_report.ppvr;
  summary["final_post_best_prob"] = trace.final_report.post_best_prob;
  summary["true_best"] = to_json(trace.true_best);
  summary["identified_best"] = to_json(trace.final_report.identified_best);
  summary["correct"] = trace.correct_identification();
  summary["contexts"] = contexts_json(partition);
  summary["true_ctr"] = matrix_json(env.true_theta);

  write_file(dir / "trace.csv", csv_text.str());
  write_json(dir / "summary.json", summary);
  out << "run: " << trace.batches.size() << " batches, "
      << (trace.stopped_at ? "stopped" : "max batches reached") << "; wrote " << (dir / "trace.csv").string()
      << "\n";
}

void cmd_compare(const CliConfig& config, const fs::path& dir, std::ostream& out) {
  const auto [test, source] = configured([&] {
    const Partition partition = build_partition(config.audiences, config.population);
    return std::pair{make_test_config(config, config.population), make_source(config, partition)};
  });
  const auto result = compare_policies(test, config.policies, source, runner_options(config));

  std::ostringstream csv_text;
  CsvWriter csv(csv_text);
  std::vector<std::string> head{"policy"};
  head.insert(head.end(), replication_columns().begin(), replication_columns().end());
  csv.row(head);
  json policies = json::array();
  std::vector<std::pair<std::string, const std::vector<ReplicationSummary>*>> groups;
  for (const auto& block : result) {
    for (const auto& run : block.runs) {
      csv.field(to_string(block.policy));
      write_replication(csv, run);
      csv.end_row();
    }
    json entry = to_json(block.summary);
    entry["policy"] = to_string(block.policy);
    policies.push_back(entry);
    groups.emplace_back(std::string(to_string(block.policy)), &block.runs);
  }
  json summary = header(config, Experiment::kCompare);
  summary["replications"] = config.replications;
  summary["policies"] = policies;

  write_file(dir / "sweep.csv", csv_text.str());
  write_json(dir / "summary.json", summary);
  write_panels(dir, "by policy", groups, out);
  for (const auto& block : result) {
    out << to_string(block.policy) << ": mean regret " << format_number(block.summary.total_regret.mean)
        << ", mean sample size " << format_number(block.summary.sample_size.mean) << ", correct "
        << format_number(block.summary.correct_fraction) << "\n";
  }
}

void cmd_sweep(const CliConfig& config, SweepMode mode, const fs::path& dir, std::ostream& out) {
  require_two_audiences(config);
  SweepSpec spec;
  spec.grid = config.grid;
  spec.mode = mode;
  if (config.environment.kind == EnvironmentSpec::Kind::kCells) spec.varying_ctrs = config.environment.cells;
  spec.fixed_targets = config.fixed_targets;
  if (!config.costs.empty()) throw ConfigError("overlap sweeps do not take display costs");
  TestConfig test = configured([&] { return make_test_config(config, config.population); });
  test.econ.cost_da.resize(0, 0);
  const SweepResult result = [&] {
    try {
      return overlap_sweep(spec, test, runner_options(config));
    } catch (const Error& e) {
      if (e.code() == Errc::kInvalidOverlap || e.code() == Errc::kInvalidDimensions ||
          e.code() == Errc::kInvalidArgument) {
        throw ConfigError(e.what());
      }
      throw;
    }
  }();

  std::ostringstream csv_text;
  CsvWriter csv(csv_text);
  std::vector<std::string> head{"mode", "point", "overlap"};
  head.insert(head.end(), replication_columns().begin(), replication_columns().end());
  csv.row(head);
  json points = json::array();
  std::vector<std::pair<std::string, const std::vector<ReplicationSummary>*>> groups;
  for (const auto& point : result.points) {
    for (const auto& run : point.runs) {
      csv.field(to_string(mode)).field(point.index + 1).field(point.overlap);
      write_replication(csv, run);
      csv.end_row();
    }
    json entry{{"point", point.index + 1}, {"overlap", point.overlap}, {"feasible", point.feasible}};
    if (point.feasible) {
      entry["top2_gap"] = point.top2_gap;
      entry["true_ctr"] = matrix_json(point.true_theta);
      entry["summary"] = to_json(point.summary);
      groups.emplace_back("q=" + format_number(point.overlap), &point.runs);
    } else {
      entry["error"] = point.error;
      out << "point " << point.index + 1 << " (q=" << format_number(point.overlap) << ") skipped: " << point.error
          << "\n";
    }
    points.push_back(entry);
  }
  json summary = header(config, mode == SweepMode::kVaryingPayoff ? Experiment::kSweepVarying
                                                                    : Experiment::kSweepFixed);
  summary["mode"] = to_string(mode);
  summary["replications"] = config.replications;
  summary["policy"] = to_string(test.policy);
  summary["points"] = points;

  write_file(dir / "sweep.csv", csv_text.str());
  write_json(dir / "summary.json", summary);
  write_panels(dir, "by overlap", groups, out);
  for (const auto& point : result.points) {
    if (!point.feasible) continue;
    out << "q=" << format_number(point.overlap) << ": median sample size "
        << format_number(point.summary.sample_size.median) << ", correct "
        << format_number(point.summary.correct_fraction) << "\n";
  }
}

void cmd_validate(const CliConfig& config, const fs::path& dir, std::ostream& out) {
  const auto [test, source] = configured([&] {
    const Partition partition = build_partition(config.audiences, config.population);
    TestConfig test = make_test_config(config, config.population);
    test.stopping = false;
    return std::pair{test, make_source(config, partition)};
  });
  const FaceValidityResult fv = face_validity(test, source, runner_options(config));

  const std::pair<const char*, const std::vector<std::vector<double>>*> metrics[] = {
      {"max_ppvr", &fv.max_ppvr},
      {"regret_per_impression", &fv.regret_per_impression},
      {"post_best_prob", &fv.post_best_prob}};
  std::ostringstream csv_text;
  CsvWriter csv(csv_text);
  std::vector<std::string> head{"t"};
  for (const auto& [name, data] : metrics)
    for (const char* stat : {"min", "q1", "median", "q3", "max", "mean"}) head.push_back(std::string(name) + "_" + stat);
  csv.row(head);
  for (int t = 1; t <= fv.batches; ++t) {
    csv.field(t);
    for (const auto& [name, data] : metrics) {
      const MetricSummary s = fv.at_batch(*data, t);
      csv.field(s.min).field(s.q1).field(s.median).field(s.q3).field(s.max).field(s.mean);
    }
    csv.end_row();
  }

  std::vector<double> reached;
  for (const auto& f : fv.first_below) {
    if (f) reached.push_back(*f);
  }
  json summary = header(config, Experiment::kValidate);
  summary["replications"] = config.replications;
  summary["policy"] = to_string(test.policy);
  summary["reached_fraction"] = fv.reached_fraction();
  summary["first_below"] = reached.empty() ? json(nullptr) : to_json(summarize_metric(reached));

  write_file(dir / "validate.csv", csv_text.str());
  write_json(dir / "summary.json", summary);

  // Box plots at ten evenly spaced batches.
  const std::pair<const char*, const char*> titles[] = {
      {"max_ppvr.svg", "Max pPVR by batch"},
      {"regret_per_impression.svg", "Expected regret per impression by batch"},
      {"post_best_prob.svg", "Posterior probability of the true best by batch"}};
  for (std::size_t m = 0; m < 3; ++m) {
    try {
      std::vector<BoxSeries> series;
      const int step = std::max(1, fv.batches / 10);
      for (int t = step; t <= fv.batches; t += step) {
        series.push_back({"t=" + std::to_string(t), fv.at_batch(*metrics[m].second, t)});
      }
      write_file(dir / "plots" / titles[m].first, render_box_plot(titles[m].second, metrics[m].first, series));
    } catch (const std::exception& e) {
      out << "warning: plot " << titles[m].first << " skipped: " << e.what() << "\n";
    }
  }
  out << "validate: " << format_number(fv.reached_fraction())
      << " of replications reached max pPVR below the threshold within " << fv.batches << " batches\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive audience evaluation: Thompson sampling over disjoint audiences"};
  app.require_subcommand(1);
  Overrides overrides;
  fs::path config_path;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"partition", "Print the disjoint audiences and p(j|k) for the config's population"},
      {"run", "Run one test and write trace.csv and summary.json"},
      {"compare", "Compare TS, EA and ST over replications"},
      {"sweep-varying", "Overlap sweep with fixed DA-level CTRs"},
      {"sweep-fixed", "Overlap sweep with fixed TA-level CTRs"},
      {"validate", "Face validity: run every replication to max_batches"},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("config", config_path, "JSON config file")->required();
    if (std::string_view(s.name) == "partition") continue;
    sub->add_option("--seed", overrides.seed, "Master seed");
    sub->add_option("--reps", overrides.replications, "Replication count")->check(CLI::PositiveNumber);
    sub->add_option("--out", overrides.out, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    CliConfig config = load_config(config_path);
    apply_overrides(config, overrides);
    if (command == "partition") {
      cmd_partition(config, out);
      return kExitOk;
    }
    const Experiment experiment = command == "run" ? Experiment::kSingleRun : parse_experiment(command);
    if (config.experiment && *config.experiment != experiment) {
      throw ConfigError("config is for experiment '" + std::string(to_string(*config.experiment)) +
                        "', not '" + command + "'");
    }
    const fs::path dir = resolve_output_dir(config);
    switch (experiment) {
      case Experiment::kSingleRun: cmd_run(config, dir, out); break;
      case Experiment::kCompare: cmd_compare(config, dir, out); break;
      case Experiment::kSweepVarying: cmd_sweep(config, SweepMode::kVaryingPayoff, dir, out); break;
      case Experiment::kSweepFixed: cmd_sweep(config, SweepMode::kFixedPayoff, dir, out); break;
      case Experiment::kValidate: cmd_validate(config, dir, out); break;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace audbandit::cli
