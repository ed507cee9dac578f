#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "audbandit/errors.hpp"

namespace audbandit::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// Reads one JSON object, remembering which keys were consumed so that any
// leftover key can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!doc_.contains(key)) fail(path_, "missing key '" + key + "'");
    return doc_.at(key);
  }

  std::string child(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) fail(child(key), "expected a finite number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < INT32_MIN || v.get<std::int64_t>() > INT32_MAX) {
      fail(child(key), "expected an integer");
    }
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) fail(child(key), "expected true or false");
    return v.get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = at(key);
    if (!v.is_string()) fail(child(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) fail(path_, "unknown key '" + key + "'");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) fail(path, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

AudienceSet members(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of TA numbers");
  AudienceSet set;
  for (const auto& x : v) {
    if (!x.is_number_integer() || x.get<int>() < 1 || x.get<int>() > kMaxAudiences) {
      fail(path, "TA numbers must be integers in 1..16");
    }
    set = set.with(x.get<int>() - 1);
  }
  return set;
}

template <typename F>
void each(const json& v, const std::string& path, F&& body) {
  if (!v.is_array()) fail(path, "expected an array");
  for (std::size_t i = 0; i < v.size(); ++i) body(v[i], path + "[" + std::to_string(i) + "]");
}

std::vector<CellCtr> cell_ctrs(const json& v, const std::string& path, const char* field) {
  std::vector<CellCtr> out;
  each(v, path, [&](const json& item, const std::string& p) {
    ObjectReader cell(item, p);
    CellCtr c{members(cell.at("members"), cell.child("members")), numbers(cell.at(field), cell.child(field))};
    cell.finish();
    out.push_back(std::move(c));
  });
  return out;
}

PopulationModel parse_population(const json& doc, const std::string& path) {
  ObjectReader r(doc, path);
  PopulationModel pop;
  if (r.has("overlap") == r.has("cells")) fail(path, "give exactly one of 'overlap' or 'cells'");
  if (r.has("overlap")) {
    pop = overlap_geometry(r.number("overlap", 0.0));
  } else {
    each(r.at("cells"), r.child("cells"), [&](const json& item, const std::string& p) {
      ObjectReader cell(item, p);
      pop.set_mass(members(cell.at("members"), cell.child("members")), cell.number("mass", 0.0));
      cell.finish();
    });
  }
  r.finish();
  return pop;
}

EnvironmentSpec parse_environment(const json& doc, const std::string& path) {
  ObjectReader r(doc, path);
  EnvironmentSpec env;
  const int given = r.has("cells") + r.has("supports") + r.has("preset");
  if (given != 1) fail(path, "give exactly one of 'cells', 'supports' or 'preset'");
  if (r.has("cells")) {
    env.kind = EnvironmentSpec::Kind::kCells;
    env.cells = cell_ctrs(r.at("cells"), r.child("cells"), "ctr");
  } else if (r.has("supports")) {
    env.kind = EnvironmentSpec::Kind::kSupports;
    each(r.at("supports"), r.child("supports"), [&](const json& item, const std::string& p) {
      ObjectReader cell(item, p);
      CellSupport s{members(cell.at("members"), cell.child("members")),
                    numbers(cell.at("low"), cell.child("low")), numbers(cell.at("high"), cell.child("high"))};
      cell.finish();
      if (s.low.size() != s.high.size()) fail(p, "'low' and 'high' differ in length");
      for (std::size_t i = 0; i < s.low.size(); ++i) {
        if (!(0.0 <= s.low[i] && s.low[i] <= s.high[i] && s.high[i] <= 1.0)) {
          fail(p, "supports need 0 <= low <= high <= 1");
        }
      }
      env.supports.push_back(std::move(s));
    });
  } else {
    const std::string preset = *r.string("preset");
    if (preset == "varying-payoff") {
      env.kind = EnvironmentSpec::Kind::kCells;
      env.cells = varying_payoff_ctrs();
    } else if (preset == "default-supports") {
      env.kind = EnvironmentSpec::Kind::kSupports;
      env.supports = default_ctr_supports();
    } else {
      fail(r.child("preset"), "unknown preset '" + preset + "' (varying-payoff, default-supports)");
    }
  }
  r.finish();
  for (const auto& c : env.cells) {
    for (double x : c.ctr) {
      if (!(x >= 0.0 && x <= 1.0)) fail(path, "CTRs must lie in [0,1]");
    }
  }
  return env;
}

void parse_test(const json& doc, const std::string& path, TestConfig& test) {
  ObjectReader r(doc, path);
  test.batch_size = r.integer("batch_size", test.batch_size);
  test.draws = r.integer("draws", test.draws);
  test.stop_threshold = r.number("stop_threshold", test.stop_threshold);
  test.stop_percentile = r.number("stop_percentile", test.stop_percentile);
  test.max_batches = r.integer("max_batches", test.max_batches);
  test.stopping = r.boolean("stopping", test.stopping);
  test.record_snapshots = r.boolean("snapshots", test.record_snapshots);
  if (auto policy = r.string("policy")) {
    try {
      test.policy = parse_policy(*policy);
    } catch (const Error&) {
      fail(r.child("policy"), "unknown policy '" + *policy + "' (TS, EA, ST)");
    }
  }
  r.finish();
}

void parse_sweep(const json& doc, const std::string& path, CliConfig& config) {
  ObjectReader r(doc, path);
  if (r.has("grid")) {
    config.grid = numbers(r.at("grid"), r.child("grid"));
    if (config.grid.empty()) fail(r.child("grid"), "grid must not be empty");
  }
  if (r.has("fixed_targets")) {
    ObjectReader t(r.at("fixed_targets"), r.child("fixed_targets"));
    config.fixed_targets.overlap_ctr = numbers(t.at("overlap_ctr"), t.child("overlap_ctr"));
    config.fixed_targets.audience_ctr.clear();
    each(t.at("audience_ctr"), t.child("audience_ctr"), [&](const json& item, const std::string& p) {
      config.fixed_targets.audience_ctr.push_back(numbers(item, p));
    });
    t.finish();
  }
  r.finish();
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::kSingleRun: return "single-run";
    case Experiment::kCompare: return "compare";
    case Experiment::kSweepVarying: return "sweep-varying";
    case Experiment::kSweepFixed: return "sweep-fixed";
    case Experiment::kValidate: return "validate";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::kSingleRun, Experiment::kCompare, Experiment::kSweepVarying,
                       Experiment::kSweepFixed, Experiment::kValidate}) {
    if (to_string(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

CliConfig parse_config(const json& doc) {
  CliConfig config;
  try {
    ObjectReader r(doc, "config");
    if (auto e = r.string("experiment")) {
      try {
        config.experiment = parse_experiment(*e);
      } catch (const ConfigError&) {
        fail(r.child("experiment"), "unknown experiment '" + *e + "'");
      }
    }
    if (r.has("seed")) {
      const json& v = r.at("seed");
      if (!v.is_number_unsigned()) fail(r.child("seed"), "expected a non-negative integer");
      config.seed = v.get<std::uint64_t>();
    }
    config.replications = r.integer("replications", config.replications);
    if (config.replications < 1) fail(r.child("replications"), "must be >= 1");
    if (auto dir = r.string("output_dir")) config.output_dir = *dir;
    config.threads = r.integer("threads", config.threads);
    if (config.threads < 0) fail(r.child("threads"), "must be >= 0");
    config.creatives = r.integer("creatives", config.creatives);
    config.audiences = r.integer("audiences", config.audiences);
    if (r.has("population")) config.population = parse_population(r.at("population"), r.child("population"));
    if (r.has("environment")) {
      config.environment = parse_environment(r.at("environment"), r.child("environment"));
    } else {
      config.environment.supports = default_ctr_supports();
    }
    if (r.has("economics")) {
      ObjectReader e(r.at("economics"), r.child("economics"));
      config.gamma = e.number("gamma", config.gamma);
      if (!(config.gamma > 0.0)) fail(e.child("gamma"), "must be > 0");
      if (e.has("costs")) config.costs = cell_ctrs(e.at("costs"), e.child("costs"), "cost");
      e.finish();
    }
    if (r.has("test")) parse_test(r.at("test"), r.child("test"), config.test);
    if (r.has("sweep")) parse_sweep(r.at("sweep"), r.child("sweep"), config);
    if (r.has("compare")) {
      ObjectReader c(r.at("compare"), r.child("compare"));
      config.policies.clear();
      each(c.at("policies"), c.child("policies"), [&](const json& item, const std::string& p) {
        if (!item.is_string()) fail(p, "expected a policy name");
        try {
          config.policies.push_back(parse_policy(item.get<std::string>()));
        } catch (const Error&) {
          fail(p, "unknown policy '" + item.get<std::string>() + "' (TS, EA, ST)");
        }
      });
      if (config.policies.empty()) fail(c.child("policies"), "must not be empty");
      c.finish();
    }
    r.finish();

    const Partition partition = build_partition(config.audiences, config.population);
    for (const auto& c : config.environment.cells) {
      if (static_cast<int>(c.ctr.size()) != config.creatives) fail("config.environment", "one CTR per creative required");
    }
    for (const auto& s : config.environment.supports) {
      if (static_cast<int>(s.low.size()) != config.creatives) fail("config.environment", "one support per creative required");
    }
    for (const auto& c : config.costs) {
      if (static_cast<int>(c.ctr.size()) != config.creatives) fail("config.economics", "one cost per creative required");
      for (double x : c.ctr) {
        if (x < 0.0) fail("config.economics", "costs must be >= 0");
      }
    }
    make_test_config(config, config.population).validate();
    cost_matrix(config, partition);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  return config;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

TestConfig make_test_config(const CliConfig& config, const PopulationModel& population) {
  TestConfig test = config.test;
  test.creatives = config.creatives;
  test.audiences = config.audiences;
  test.population = population;
  test.econ.gamma = config.gamma;
  test.econ.cost_da = cost_matrix(config, build_partition(config.audiences, population));
  test.seed = config.seed;
  return test;
}

Eigen::MatrixXd cost_matrix(const CliConfig& config, const Partition& partition) {
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(config.creatives, partition.num_cells());
  for (const auto& c : config.costs) {
    const int j = partition.find(c.membership);
    if (j < 0) continue;
    for (int r = 0; r < config.creatives; ++r) cost(r, j) = c.ctr[r];
  }
  return cost;
}

EnvironmentSource make_source(const CliConfig& config, const Partition& partition) {
  if (config.environment.kind == EnvironmentSpec::Kind::kCells) {
    return fixed_environment(make_environment(partition, config.environment.cells, config.creatives));
  }
  // Surfaces missing cells now rather than inside a replication.
  Rng probe(0);
  sample_ctr_environment(partition, config.environment.supports, config.creatives, probe);
  return sampled_environment(partition, config.environment.supports, config.creatives);
}

}  // namespace audbandit::cli
