#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "audbandit/engine.hpp"
#include "audbandit/simlab.hpp"

namespace audbandit::cli {

// Raised for malformed or schema-violating config documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { kSingleRun, kCompare, kSweepVarying, kSweepFixed, kValidate };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

// How each replication obtains its true CTRs.
struct EnvironmentSpec {
  enum class Kind { kCells, kSupports } kind = Kind::kSupports;
  std::vector<CellCtr> cells;
  std::vector<CellSupport> supports;
};

struct CliConfig {
  std::optional<Experiment> experiment;
  std::uint64_t seed = 42;
  int replications = 200;
  std::optional<std::filesystem::path> output_dir;
  int threads = 0;
  int creatives = 2;
  int audiences = 2;
  PopulationModel population = overlap_geometry(0.5);
  EnvironmentSpec environment;
  double gamma = 1.0;
  // Per-cell display costs, one entry per creative; absent cells cost zero.
  std::vector<CellCtr> costs;
  TestConfig test;
  std::vector<double> grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  FixedPayoffTargets fixed_targets;
  std::vector<Policy> policies{Policy::kThompson, Policy::kEqualAllocation, Policy::kSplitTesting};
};

// Validates the document against the schema. Unknown keys are rejected.
CliConfig parse_config(const nlohmann::json& doc);
CliConfig load_config(const std::filesystem::path& path);

// The engine config for the given population (creatives, audiences, econ
// and test parameters filled in).
TestConfig make_test_config(const CliConfig& config, const PopulationModel& population);

// Display costs as an R x J matrix in partition order.
Eigen::MatrixXd cost_matrix(const CliConfig& config, const Partition& partition);

EnvironmentSource make_source(const CliConfig& config, const Partition& partition);

}  // namespace audbandit::cli
