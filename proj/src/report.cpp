#include "seqgap/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include "json.hpp"

#include "seqgap/errors.hpp"

namespace seqgap {
namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
  if (std::isfinite(v)) return round_sig9(v);
  return format_float(v);
}

double read_number(const ordered_json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw ConfigError("bad number '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

bool ExperimentReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

CheckResult& ExperimentReport::check(std::string name, double measured, std::string relation,
                                     double threshold) {
  bool ok = false;
  if (relation == "<=") ok = measured <= threshold;
  else if (relation == ">=") ok = measured >= threshold;
  else throw Error("unknown relation " + relation);
  checks.push_back({std::move(name), ok, measured, std::move(relation), threshold});
  return checks.back();
}

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round_sig9(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_float(v).c_str(), nullptr);
}

std::string to_csv(const ExperimentReport& report) {
  std::string out = "experiment,m,n,k,algorithm,estimate,ci,trials,seed\n";
  for (const auto& r : report.rows) {
    out += r.experiment + ',' + std::to_string(r.m) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.k) + ',' + r.algorithm + ',' + format_float(r.estimate) + ',' +
           format_float(r.ci) + ',' + std::to_string(r.trials) + ',' + std::to_string(r.seed) +
           '\n';
  }
  return out;
}

std::string to_json(const ExperimentReport& report) {
  ordered_json j;
  j["experiment"] = report.experiment;
  j["version"] = report.version;
  j["seed"] = report.seed;
  j["config"] = report.config_json.empty() ? ordered_json::object()
                                           : ordered_json::parse(report.config_json);
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json o;
    o["experiment"] = r.experiment;
    o["m"] = r.m;
    o["n"] = r.n;
    o["k"] = r.k;
    o["algorithm"] = r.algorithm;
    o["estimate"] = number(r.estimate);
    o["ci"] = number(r.ci);
    o["trials"] = r.trials;
    o["seed"] = r.seed;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json o;
    o["name"] = c.name;
    o["passed"] = c.passed;
    o["measured"] = number(c.measured);
    o["relation"] = c.relation;
    o["threshold"] = number(c.threshold);
    checks.push_back(std::move(o));
  }
  j["checks"] = std::move(checks);
  j["all_passed"] = report.all_passed();
  if (report.wall_seconds) j["wall_seconds"] = number(*report.wall_seconds);
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(std::string_view text) {
  try {
    const auto j = ordered_json::parse(text);
    ExperimentReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_json = j.at("config").dump();
    for (const auto& o : j.at("rows")) {
      ReportRow row;
      row.experiment = o.at("experiment").get<std::string>();
      row.m = o.at("m").get<std::size_t>();
      row.n = o.at("n").get<std::size_t>();
      row.k = o.at("k").get<std::size_t>();
      row.algorithm = o.at("algorithm").get<std::string>();
      row.estimate = read_number(o.at("estimate"));
      row.ci = read_number(o.at("ci"));
      row.trials = o.at("trials").get<std::uint64_t>();
      row.seed = o.at("seed").get<std::uint64_t>();
      r.rows.push_back(std::move(row));
    }
    for (const auto& o : j.at("checks")) {
      r.checks.push_back({o.at("name").get<std::string>(), o.at("passed").get<bool>(),
                          read_number(o.at("measured")), o.at("relation").get<std::string>(),
                          read_number(o.at("threshold"))});
    }
    if (j.contains("wall_seconds")) r.wall_seconds = read_number(j.at("wall_seconds"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path) {
  const std::string text = format == ReportFormat::csv ? to_csv(report) : to_json(report);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error("failed writing report to stdout");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << text;
  f.close();
  if (!f) throw Error("failed writing " + path);
}

}  // namespace seqgap
