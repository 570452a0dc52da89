#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "seqgap/errors.hpp"
#include "seqgap/harness.hpp"
#include "seqgap/report.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
  std::string format = "csv";
  bool allow_large_n = false;
  bool timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw seqgap::ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int run(seqgap::ExperimentKind kind, const Options& opt) {
  seqgap::ExperimentConfig cfg;
  try {
    const std::string text = opt.config_path.empty() ? "{}" : read_file(opt.config_path);
    cfg = seqgap::config_from_json(kind, text);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) cfg.threads = *opt.threads;
    if (!opt.out.empty()) cfg.output_path = opt.out;
    if (opt.allow_large_n) cfg.allow_large_n = true;
    if (opt.timing) cfg.timing = true;
    cfg.validate();
  } catch (const seqgap::Error& e) {
    std::cerr << "seqgap: " << e.what() << "\n";
    return kExitConfig;
  }
  for (std::size_t n : {cfg.n}) {
    const std::string note = seqgap::large_n_note(n);
    if (!note.empty()) std::cerr << "seqgap: note: " << note << "\n";
  }

  seqgap::ExperimentReport report;
  try {
    report = seqgap::run_experiment(cfg);
  } catch (const seqgap::ConfigError& e) {
    std::cerr << "seqgap: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "seqgap: run failed: " << e.what() << "\n";
    return kExitCheckFailed;
  }

  const bool to_stdout = cfg.output_path.empty() || cfg.output_path == "-";
  std::ostream& log = to_stdout ? std::cerr : std::cout;
  for (const auto& c : report.checks)
    log << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << seqgap::format_float(c.measured)
        << ' ' << c.relation << ' ' << seqgap::format_float(c.threshold) << "\n";
  try {
    seqgap::emit_report(report,
                        opt.format == "json" ? seqgap::ReportFormat::json : seqgap::ReportFormat::csv,
                        cfg.output_path);
  } catch (const std::exception& e) {
    std::cerr << "seqgap: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return report.all_passed() ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower-bound certificates and sparse-recovery experiments"};
  app.require_subcommand(1);
  Options opt;
  std::optional<seqgap::ExperimentKind> chosen;
  const std::pair<const char*, const char*> subs[] = {
      {"certify-lb", "Certify the non-adaptive lower bound on the hard instance"},
      {"gap", "Adaptive versus non-adaptive error over an m grid"},
      {"recover", "Adaptive sparse recovery benchmark"},
      {"lemma-check", "Property suite for the lemma-level invariants"},
      {"concentration", "Gaussian norm tail bounds"}};
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Override the config seed");
    sub->add_option("--out", opt.out, "Report path (default: stdout)");
    sub->add_option("--threads", opt.threads, "Worker threads (0: all cores)");
    sub->add_option("--format", opt.format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--allow-large-n", opt.allow_large_n, "Lift the n <= 2 cap");
    sub->add_flag("--timing", opt.timing, "Record wall-clock seconds in the JSON report");
    sub->callback([&chosen, n = std::string(name)] { chosen = seqgap::parse_experiment(n); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  return run(*chosen, opt);
}
