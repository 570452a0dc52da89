#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqgap/linalg.hpp"
#include "seqgap/report.hpp"
#include "seqgap/rng.hpp"

namespace seqgap {

enum class ExperimentKind { certify_lb, gap, recover, lemma_check, concentration };

std::string_view experiment_name(ExperimentKind kind);
// Throws ConfigError for an unknown name.
ExperimentKind parse_experiment(std::string_view name);

// Input families for the recover experiment.
enum class RecoveryInput { b1, power_law, sparse };

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::lemma_check;
  std::size_t m = 256;
  std::size_t n = 1;
  std::vector<std::size_t> m_grid;
  std::size_t k = 1;
  double eps = 0.5;
  std::vector<std::string> algorithms;
  std::uint64_t trials = 100000;     // probability cells
  std::uint64_t error_trials = 1000;  // error cells
  std::uint64_t seed = 0;
  std::string output_path;
  // certify-lb: gaussian, rademacher, all-ones, or the path of a JSON n x m array.
  std::vector<std::string> matrices;
  // gap: measurement budget of every algorithm; recover: 0 uses measurement_budget().
  std::size_t budget = 0;
  // gap: n values whose certificate is reported at m >= coupling_threshold(n).
  std::vector<std::size_t> certificate_ns;
  // gap and recover: K for adaptive-ksparse; 0 uses ceil(k / eps).
  std::size_t candidate_sets = 0;
  // recover
  RecoveryInput input = RecoveryInput::power_law;
  double input_exponent = 1.5;
  std::size_t homogeneity_trials = 50;
  double homogeneity_scale = 100.0;
  // lemma-check: shrink the stage-1 ellipsoid by 0.9 to exercise the checker.
  bool inject_bug = false;
  // concentration
  std::vector<std::size_t> dims;
  // Lifts the n <= 2 cap of the hard-instance experiments.
  bool allow_large_n = false;
  unsigned threads = 0;
  bool timing = false;

  // Throws ConfigError.
  void validate() const;
};

// Defaults for one experiment.
ExperimentConfig default_config(ExperimentKind kind);
// Applies the keys of a JSON object on top of default_config(kind). Unknown
// keys, wrong types and an "experiment" key naming a different experiment
// are ConfigErrors. The result is validated.
ExperimentConfig config_from_json(ExperimentKind kind, std::string_view text);
// Canonical echo of the fields that influence results.
std::string config_to_json(const ExperimentConfig& config);
// Note on cost for n above the cap, or empty.
std::string large_n_note(std::size_t n);

ExperimentReport cmd_certify_lb(const ExperimentConfig& config);
ExperimentReport cmd_gap(const ExperimentConfig& config);
ExperimentReport cmd_recover(const ExperimentConfig& config);
ExperimentReport cmd_lemma_check(const ExperimentConfig& config);
ExperimentReport cmd_concentration(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

// Test inputs of the recover experiment, all with ||x||_1 = 1 except b1,
// which is uniform on the unit l1 ball.
DenseVector draw_recovery_input(RecoveryInput kind, std::size_t m, std::size_t k, double exponent,
                                RngStream& rng);
// Named matrix family of certify-lb: n x m.
DenseMatrix matrix_family(const std::string& name, std::size_t n, std::size_t m, RngStream& rng);

// Mixture centers of the points-in-N01 cell: M = ceil(C (r1 + 3)) points in
// R^1 with r1 = 24, the first ceil(M/2) evenly spaced on [-r1, r1] and the rest
// isolated far outside.
DenseMatrix points_cell_centers();

}  // namespace seqgap
