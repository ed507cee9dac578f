#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "audbandit/simlab.hpp"

namespace audbandit::cli {

// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

// RFC 4180 rows: CRLF line ends, fields quoted when they hold a comma, quote
// or line break.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view text);
  CsvWriter& field(const char* text) { return field(std::string_view(text)); }
  CsvWriter& field(double value) { return field(format_number(value)); }
  CsvWriter& field(std::int64_t value) { return field(std::to_string(value)); }
  CsvWriter& field(int value) { return field(std::to_string(value)); }
  CsvWriter& field(bool value) { return field(value ? std::string_view("1") : std::string_view("0")); }
  CsvWriter& empty() { return field(std::string_view()); }
  void end_row();
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  bool first_ = true;
};

// Column names of the per-replication tidy rows, after any grouping columns.
const std::vector<std::string>& replication_columns();
void write_replication(CsvWriter& csv, const ReplicationSummary& run);

nlohmann::json to_json(const MetricSummary& s);
nlohmann::json to_json(const PointSummary& s);
nlohmann::json to_json(ArmIndex arm);

// UTC, ISO 8601, second resolution.
std::string utc_timestamp();

void write_file(const std::filesystem::path& path, std::string_view contents);
// Pretty-printed with sorted keys and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace audbandit::cli
