#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seqgap {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

// One CSV line: experiment,m,n,k,algorithm,estimate,ci,trials,seed.
struct ReportRow {
  std::string experiment;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::string algorithm;
  double estimate = 0.0;
  double ci = 0.0;  // 99% half-width
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

// A pass/fail statement `measured relation threshold`, relation "<=" or ">=".
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  std::string relation;
  double threshold = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  std::string config_json;  // canonical echo of the effective config
  std::uint64_t seed = 0;
  std::string version{kLibraryVersion};
  std::vector<ReportRow> rows;
  std::vector<CheckResult> checks;
  std::optional<double> wall_seconds;

  bool all_passed() const;
  CheckResult& check(std::string name, double measured, std::string relation, double threshold);
};

enum class ReportFormat { csv, json };

// %.9g; non-finite values print as inf, -inf, nan.
std::string format_float(double v);
// v rounded to 9 significant digits.
double round_sig9(double v);

std::string to_csv(const ExperimentReport& report);
std::string to_json(const ExperimentReport& report);
// Inverse of to_json; throws ConfigError on malformed input.
ExperimentReport report_from_json(std::string_view text);
// Writes to `path`, or to stdout when path is empty or "-". Throws Error on IO failure.
void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path);

}  // namespace seqgap
