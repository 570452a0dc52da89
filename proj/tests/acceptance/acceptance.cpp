// One PASS/FAIL line per acceptance criterion; exit code 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "seqgap/column_geometry.hpp"
#include "seqgap/harness.hpp"
#include "seqgap/hard_instance.hpp"
#include "seqgap/posterior.hpp"

using namespace seqgap;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

// Appends "name measured rel threshold" and folds it into the outcome.
void expect(Outcome& o, const std::string& name, double measured, const char* rel, double threshold) {
  const bool ok = std::string(rel) == "<=" ? measured <= threshold : measured >= threshold;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s%s %.6g %s %.6g", o.detail.empty() ? "" : "; ", name.c_str(),
                measured, rel, threshold);
  o.detail += buf;
  o.passed = o.passed && ok;
}

void absorb(Outcome& o, const ExperimentReport& rep) {
  for (const auto& c : rep.checks) expect(o, c.name, c.measured, c.relation.c_str(), c.threshold);
}

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  expect(o, "seconds", secs, "<=", limit_seconds);
  if (!o.passed) ++failures;
  std::printf("%s %2d %s: %s\n", o.passed ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
}

std::vector<oracle::Atom> to_atoms(const DiscreteInstance& inst) {
  std::vector<oracle::Atom> out;
  for (const auto& a : inst.atoms)
    out.push_back({oracle::Vec(a.point.begin(), a.point.end()), a.prob, a.in_event});
  return out;
}

void kink(Outcome& o, const std::string& name, const DiscreteInstance& inst, std::size_t steps) {
  const double bound = conditional_average_bound(inst, component_separation(inst));
  const auto grid = oracle::grid_minimum(to_atoms(inst), -0.5, 1.0, steps);
  expect(o, name + " bound - grid inf", bound - static_cast<double>(grid.value), "<=", 1e-12);
  expect(o, name + " bound / grid inf", bound / static_cast<double>(grid.value), ">=", 0.95);
}

}  // namespace

int main() {
  constexpr std::uint64_t kSeed = 20240101;

  criterion(1, "truncation bound", 60, [] {
    Outcome o;
    const ProbabilityEstimate d =
        estimate_truncation_delta(build_spec(256, 1), 1000000, RngStream(kSeed).split(1));
    expect(o, "delta", d.estimate, "<=", std::exp(-4.0));
    return o;
  });

  criterion(2, "gaussian concentration", 120, [] {
    Outcome o;
    ExperimentConfig c = default_config(ExperimentKind::concentration);
    c.trials = 1000000;
    c.seed = kSeed;
    absorb(o, cmd_concentration(c));
    return o;
  });

  criterion(3, "separation distances", 1, [] {
    Outcome o;
    const SeparationDistances d = separation_distances(build_spec(256, 1));
    expect(o, "|dist1 - 2/3|", std::fabs(d.dist1 - 2.0 / 3.0), "<=", 1e-12);
    expect(o, "|dist_inf - 1/3|", std::fabs(d.dist_inf - 1.0 / 3.0), "<=", 1e-12);
    return o;
  });

  criterion(4, "points in N(0,1) cell", 300, [] {
    Outcome o;
    const DenseMatrix centers = points_cell_centers();
    const double r1 = points_radius(1);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < centers.cols(); ++i) inside += std::fabs(centers(0, i)) <= r1;
    expect(o, "M", static_cast<double>(centers.cols()), ">=", std::ceil(4.7552 * (r1 + 3.0)));
    expect(o, "K/M", static_cast<double>(inside) / static_cast<double>(centers.cols()), ">=", 0.5);
    const GaussianMixtureModel model(centers, DenseMatrix::identity(1));
    const ProbabilityEstimate p =
        mixture_distinctness_probability(model, 0.5, 100000, RngStream(kSeed).split(4));
    expect(o, "P(D<=1/2) + 3CI", p.estimate + 3.0 * p.halfwidth, ">=", 0.2);
    return o;
  });

  criterion(5, "shrinkage certificates", 60, [] {
    Outcome o;
    std::size_t columns = 0, rectangles = 0, tight = 0;
    const RngStream root = RngStream(kSeed).split(5);
    for (std::size_t t = 0; t < 100; ++t) {
      RngStream r = root.split(t);
      const std::size_t n = 1 + t % 4;
      const DenseMatrix a = gaussian_matrix(n, 50, r);
      const ShrinkageTrace tr = run_shrinkage(a, sample_subset(50, 2 * n, r));
      for (std::size_t j : tr.final_set) columns += !verify_column_in_rectangle(tr, j);
      for (std::size_t i = 1; i <= n; ++i) rectangles += !verify_rectangle_in_ellipsoid(tr, i);
      tight += std::fabs(check_rectangle_in_ellipsoid(tr, 1).worst_ratio - 1.0) > 1e-9;
    }
    expect(o, "column failures", static_cast<double>(columns), "<=", 0);
    expect(o, "rectangle failures", static_cast<double>(rectangles), "<=", 0);
    expect(o, "stage-1 equality failures", static_cast<double>(tight), "<=", 0);
    return o;
  });

  criterion(6, "inflated ellipsoid count and k_n law", 300, [] {
    Outcome o;
    RngStream r = RngStream(kSeed).split(6);
    const DenseMatrix a = gaussian_matrix(2, 50, r);
    const InflatedCountRun run = inflated_count_probability(a, 1000, r.split(1));
    expect(o, "P(count>=m/2) + 3CI", run.prob.estimate + 3.0 * run.prob.halfwidth, ">=", 0.5);
    expect(o, "proxy violations", static_cast<double>(run.proxy_violations), "<=", 0);
    const KnLawRun kn = kn_law_check(8, 2, 100000, r.split(2));
    expect(o, "k_n TV", kn.tv_distance, "<=", 0.02);
    return o;
  });

  criterion(7, "lower-bound certificates", 600, [] {
    Outcome o;
    ExperimentConfig c = default_config(ExperimentKind::certify_lb);
    c.seed = kSeed;
    c.trials = 100000;
    c.error_trials = 2000;
    c.algorithms = {"zero", "gaussian-linear", "l1min", "greedy", "bayes-mode"};
    absorb(o, cmd_certify_lb(c));
    return o;
  });

  criterion(8, "brute-force oracle equivalence", 60, [] {
    Outcome o;
    const double c = 1.0 / 3.0;
    DiscreteInstance two;
    two.num_components = 2;
    two.atoms = {{DenseVector{0.0}, 0.5, 0, true}, {DenseVector{c}, 0.5, 1, true}};
    kink(o, "two masses", two, 1500);
    DiscreteInstance three;
    three.num_components = 3;
    three.atoms = {{DenseVector{0.0, 0.0}, 1.0 / 3, 0, true},
                   {DenseVector{c, 0.0}, 1.0 / 3, 1, true},
                   {DenseVector{0.0, c}, 1.0 / 3, 2, true}};
    kink(o, "three corners", three, 300);
    // Random discrete instances in R^3: only the upper inequality applies.
    RngStream r = RngStream(kSeed).split(8);
    double worst = -1.0;
    for (int t = 0; t < 10; ++t) {
      DiscreteInstance inst;
      inst.num_components = 2;
      double total = 0.0;
      for (std::size_t a = 0; a < 4; ++a) {
        inst.atoms.push_back({DenseVector{r.uniform(), r.uniform(), r.uniform()}, 0.1 + r.uniform(), a % 2,
                              r.uniform() < 0.8});
        total += inst.atoms.back().prob;
      }
      for (auto& a : inst.atoms) a.prob /= total;
      const auto g = oracle::grid_minimum(to_atoms(inst), -0.2, 1.2, 28);
      worst = std::max(worst, conditional_average_bound(inst, component_separation(inst)) -
                                  static_cast<double>(g.value));
    }
    expect(o, "random m=3 bound - grid inf", worst, "<=", 1e-12);
    return o;
  });

  criterion(9, "adaptive l2/l2 recovery", 600, [] {
    Outcome o;
    ExperimentConfig c = default_config(ExperimentKind::recover);
    c.seed = kSeed;
    c.error_trials = 500;
    absorb(o, cmd_recover(c));
    return o;
  });

  criterion(10, "adaptive vs non-adaptive gap", 1200, [] {
    Outcome o;
    ExperimentConfig c = default_config(ExperimentKind::gap);
    c.seed = kSeed;
    absorb(o, cmd_gap(c));
    return o;
  });

  criterion(11, "byte-identical reruns", 300, [] {
    Outcome o;
    const std::vector<std::pair<ExperimentKind, const char*>> configs = {
        {ExperimentKind::certify_lb, R"({"m": 64, "trials": 500, "error_trials": 50})"},
        {ExperimentKind::gap, R"({"m_grid": [64, 256], "trials": 200, "error_trials": 40, "certificate_ns": [1]})"},
        {ExperimentKind::recover, R"({"m": 512, "k": 2, "error_trials": 40, "homogeneity_trials": 5})"},
        {ExperimentKind::lemma_check, R"({"trials": 2000, "error_trials": 50})"},
        {ExperimentKind::concentration, R"({"trials": 5000})"}};
    std::size_t mismatches = 0;
    for (const auto& [kind, text] : configs) {
      const ExperimentConfig c = config_from_json(kind, text);
      const std::string a = to_csv(run_experiment(c));
      const std::string b = to_csv(run_experiment(c));
      if (a != b || a.empty()) ++mismatches;
    }
    expect(o, "subcommands with differing CSV", static_cast<double>(mismatches), "<=", 0);
    return o;
  });

  return failures == 0 ? 0 : 1;
}
