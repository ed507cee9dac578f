#include "cli/output.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace audbandit::cli {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvWriter& CsvWriter::field(std::string_view text) {
  if (!first_) out_ << ',';
  first_ = false;
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    out_ << text;
    return *this;
  }
  out_ << '"';
  for (char c : text) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  out_ << "\r\n";
  first_ = true;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (const auto& f : fields) field(f);
  end_row();
}

const std::vector<std::string>& replication_columns() {
  static const std::vector<std::string> columns{
      "replication", "seed", "stopped", "batches", "first_below", "sample_size", "impressions",
      "total_regret", "correct", "post_best_prob", "final_max_ppvr", "true_best_creative",
      "true_best_ta", "identified_creative", "identified_ta"};
  return columns;
}

void write_replication(CsvWriter& csv, const ReplicationSummary& run) {
  csv.field(run.replication + 1).field(std::to_string(run.seed)).field(run.stopped).field(run.batches);
  if (run.first_below) {
    csv.field(*run.first_below);
  } else {
    csv.empty();
  }
  csv.field(run.sample_size)
      .field(run.impressions)
      .field(run.total_regret)
      .field(run.correct)
      .field(run.post_best_prob)
      .field(run.final_max_ppvr)
      .field(run.true_best.creative + 1)
      .field(run.true_best.audience + 1)
      .field(run.identified_best.creative + 1)
      .field(run.identified_best.audience + 1);
}

nlohmann::json to_json(const MetricSummary& s) {
  return {{"min", s.min}, {"q1", s.q1}, {"median", s.median},
          {"q3", s.q3},   {"max", s.max}, {"mean", s.mean}};
}

nlohmann::json to_json(const PointSummary& s) {
  return {{"replications", s.replications},
          {"sample_size", to_json(s.sample_size)},
          {"total_regret", to_json(s.total_regret)},
          {"post_best_prob", to_json(s.post_best_prob)},
          {"correct_fraction", s.correct_fraction},
          {"stopped_fraction", s.stopped_fraction}};
}

nlohmann::json to_json(ArmIndex arm) {
  return {{"creative", arm.creative + 1}, {"ta", arm.audience + 1}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_file(path, doc.dump(2) + "\n");
}

}  // namespace audbandit::cli
