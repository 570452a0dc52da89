#include "seqgap/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "seqgap/column_geometry.hpp"
#include "seqgap/errors.hpp"
#include "seqgap/gaussian.hpp"
#include "seqgap/hard_instance.hpp"
#include "seqgap/parallel.hpp"
#include "seqgap/posterior.hpp"
#include "seqgap/recovery.hpp"
#include "seqgap/registry.hpp"
#include "seqgap/stats.hpp"

namespace seqgap {
namespace {

using nlohmann::ordered_json;

constexpr std::size_t kMaxDefaultN = 2;

std::string_view input_name(RecoveryInput in) {
  switch (in) {
    case RecoveryInput::b1:
      return "b1";
    case RecoveryInput::power_law:
      return "power-law";
    case RecoveryInput::sparse:
      return "sparse";
  }
  return "";
}

RecoveryInput parse_input(const std::string& s) {
  if (s == "b1") return RecoveryInput::b1;
  if (s == "power-law") return RecoveryInput::power_law;
  if (s == "sparse") return RecoveryInput::sparse;
  throw ConfigError("unknown input family '" + s + "'");
}

ReportRow row(const ExperimentConfig& cfg, std::size_t m, std::size_t n, std::size_t k,
              std::string algorithm, double estimate, double ci, std::uint64_t trials) {
  return {std::string(experiment_name(cfg.experiment)), m, n, k, std::move(algorithm),
          estimate, ci, trials, cfg.seed};
}

ExperimentReport start_report(const ExperimentConfig& cfg) {
  ExperimentReport r;
  r.experiment = std::string(experiment_name(cfg.experiment));
  r.config_json = config_to_json(cfg);
  r.seed = cfg.seed;
  return r;
}

RecoveryConfig recovery_config(const ExperimentConfig& cfg) {
  RecoveryConfig rc;
  rc.k = cfg.k;
  rc.eps = cfg.eps;
  rc.num_candidate_sets = cfg.candidate_sets;
  return rc;
}

// Relative 99% half-width of a ratio of two independent estimates.
double ratio_halfwidth(double a, double ha, double b, double hb) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return (a / b) * std::hypot(ha / a, hb / b);
}

void require_hard_n(const ExperimentConfig& cfg, std::size_t n) {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (n > kMaxDefaultN && !cfg.allow_large_n)
    throw ConfigError("n = " + std::to_string(n) +
                      " exceeds the cap of 2 for hard-instance experiments; set allow_large_n");
}

}  // namespace

std::string_view experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::certify_lb:
      return "certify-lb";
    case ExperimentKind::gap:
      return "gap";
    case ExperimentKind::recover:
      return "recover";
    case ExperimentKind::lemma_check:
      return "lemma-check";
    case ExperimentKind::concentration:
      return "concentration";
  }
  return "";
}

ExperimentKind parse_experiment(std::string_view name) {
  for (auto k : {ExperimentKind::certify_lb, ExperimentKind::gap, ExperimentKind::recover,
                 ExperimentKind::lemma_check, ExperimentKind::concentration})
    if (experiment_name(k) == name) return k;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::certify_lb:
      c.m = 256;
      c.n = 1;
      c.algorithms = {"zero", "gaussian-linear", "greedy", "bayes-mode"};
      c.matrices = {"gaussian", "rademacher", "all-ones"};
      break;
    case ExperimentKind::gap:
      c.n = 1;
      c.m_grid = {1u << 8, 1u << 10, 1u << 12, 1u << 14, 1u << 16, 1u << 18};
      c.algorithms = {"gaussian-linear", "greedy", "adaptive-ksparse"};
      c.budget = 20;
      c.trials = 4000;
      c.error_trials = 400;
      c.certificate_ns = {1, 2};
      c.candidate_sets = 1;
      break;
    case ExperimentKind::recover:
      c.m = 1u << 14;
      c.k = 4;
      c.eps = 0.5;
      c.algorithms = {"adaptive-ksparse"};
      c.error_trials = 500;
      break;
    case ExperimentKind::lemma_check:
      c.m = 256;
      c.n = 1;
      break;
    case ExperimentKind::concentration:
      c.dims = {1, 2, 4, 8};
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (trials < 1 || error_trials < 1) throw ConfigError("trials must be >= 1");
  for (const auto& a : algorithms)
    if (!is_registered(a)) throw ConfigError("unknown algorithm '" + a + "'");
  for (std::size_t i = 1; i < m_grid.size(); ++i)
    if (m_grid[i] <= m_grid[i - 1]) throw ConfigError("m_grid must be strictly increasing");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");
  if (k < 1) throw ConfigError("k must be >= 1");
  switch (experiment) {
    case ExperimentKind::certify_lb:
      require_hard_n(*this, n);
      if (m < 2 * n) throw ConfigError("certify-lb needs m >= 2n");
      if (matrices.empty()) throw ConfigError("certify-lb needs at least one matrix family");
      for (const auto& a : algorithms) {
        if (algorithm_mode(a) != InfoMode::nonadaptive)
          throw ConfigError("certify-lb bounds non-adaptive algorithms only; drop '" + a + "'");
        if (a == "identity" && n < m) throw ConfigError("identity needs n >= m measurements");
      }
      break;
    case ExperimentKind::gap:
      require_hard_n(*this, n);
      for (auto c : certificate_ns) require_hard_n(*this, c);
      if (m_grid.empty()) throw ConfigError("gap needs an m_grid");
      if (m_grid.front() < 2 * n) throw ConfigError("gap needs every m >= 2n");
      if (algorithms.empty()) throw ConfigError("gap needs at least one algorithm");
      break;
    case ExperimentKind::recover:
      if (m < 16 * k) throw ConfigError("recover needs m >= 16k");
      if (algorithms.empty()) throw ConfigError("recover needs at least one algorithm");
      if (!(homogeneity_scale != 0.0 && std::isfinite(homogeneity_scale)))
        throw ConfigError("homogeneity_scale must be finite and nonzero");
      if (!(input_exponent > 0.0)) throw ConfigError("input_exponent must be positive");
      break;
    case ExperimentKind::lemma_check:
      require_hard_n(*this, n);
      if (m < 2 * n) throw ConfigError("lemma-check needs m >= 2n");
      break;
    case ExperimentKind::concentration:
      if (dims.empty()) throw ConfigError("concentration needs dims");
      for (auto d : dims)
        if (d < 1) throw ConfigError("dims must be >= 1");
      break;
  }
}

ExperimentConfig config_from_json(ExperimentKind kind, std::string_view text) {
  ExperimentConfig c = default_config(kind);
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const auto& v = it.value();
      if (key == "experiment") {
        if (parse_experiment(v.get<std::string>()) != kind)
          throw ConfigError("config is for experiment '" + v.get<std::string>() + "'");
      } else if (key == "m") c.m = v.get<std::size_t>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "m_grid") c.m_grid = v.get<std::vector<std::size_t>>();
      else if (key == "k") c.k = v.get<std::size_t>();
      else if (key == "eps") c.eps = v.get<double>();
      else if (key == "algorithms") c.algorithms = v.get<std::vector<std::string>>();
      else if (key == "trials") c.trials = v.get<std::uint64_t>();
      else if (key == "error_trials") c.error_trials = v.get<std::uint64_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "output_path") c.output_path = v.get<std::string>();
      else if (key == "matrices") c.matrices = v.get<std::vector<std::string>>();
      else if (key == "budget") c.budget = v.get<std::size_t>();
      else if (key == "certificate_ns") c.certificate_ns = v.get<std::vector<std::size_t>>();
      else if (key == "candidate_sets") c.candidate_sets = v.get<std::size_t>();
      else if (key == "input") c.input = parse_input(v.get<std::string>());
      else if (key == "input_exponent") c.input_exponent = v.get<double>();
      else if (key == "homogeneity_trials") c.homogeneity_trials = v.get<std::size_t>();
      else if (key == "homogeneity_scale") c.homogeneity_scale = v.get<double>();
      else if (key == "inject_bug") c.inject_bug = v.get<bool>();
      else if (key == "dims") c.dims = v.get<std::vector<std::size_t>>();
      else if (key == "allow_large_n") c.allow_large_n = v.get<bool>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "timing") c.timing = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = experiment_name(c.experiment);
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["error_trials"] = c.error_trials;
  switch (c.experiment) {
    case ExperimentKind::certify_lb:
      j["m"] = c.m;
      j["n"] = c.n;
      j["algorithms"] = c.algorithms;
      j["matrices"] = c.matrices;
      break;
    case ExperimentKind::gap:
      j["n"] = c.n;
      j["m_grid"] = c.m_grid;
      j["k"] = c.k;
      j["eps"] = round_sig9(c.eps);
      j["algorithms"] = c.algorithms;
      j["budget"] = c.budget;
      j["certificate_ns"] = c.certificate_ns;
      j["candidate_sets"] = c.candidate_sets;
      break;
    case ExperimentKind::recover:
      j["m"] = c.m;
      j["k"] = c.k;
      j["eps"] = round_sig9(c.eps);
      j["algorithms"] = c.algorithms;
      j["budget"] = c.budget;
      j["candidate_sets"] = c.candidate_sets;
      j["input"] = input_name(c.input);
      j["input_exponent"] = round_sig9(c.input_exponent);
      j["homogeneity_trials"] = c.homogeneity_trials;
      j["homogeneity_scale"] = round_sig9(c.homogeneity_scale);
      break;
    case ExperimentKind::lemma_check:
      j["m"] = c.m;
      j["n"] = c.n;
      j["inject_bug"] = c.inject_bug;
      break;
    case ExperimentKind::concentration:
      j["dims"] = c.dims;
      break;
  }
  j["allow_large_n"] = c.allow_large_n;
  return j.dump();
}

std::string large_n_note(std::size_t n) {
  if (n <= kMaxDefaultN) return {};
  const double m = kPointsConstant *
                   std::pow(points_radius(n) + 3.0 * std::sqrt(static_cast<double>(n)),
                            static_cast<double>(n));
  std::ostringstream os;
  os.precision(3);
  os << "n = " << n << " needs m >= " << m << " for the certified regime; the centers alone take "
     << m * static_cast<double>(n) * 8.0 / 1e9 << " GB and each certificate trial costs about "
     << m * static_cast<double>(n * n) << " flops";
  return os.str();
}

DenseMatrix matrix_family(const std::string& name, std::size_t n, std::size_t m, RngStream& rng) {
  if (name == "gaussian") return gaussian_matrix(n, m, rng);
  if (name == "rademacher") {
    DenseMatrix a(n, m);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < m; ++c) a(r, c) = rng.sign();
    return a;
  }
  if (name == "all-ones") return DenseMatrix(n, m, 1.0);
  std::ifstream f(name);
  if (!f) throw ConfigError("unknown matrix family or unreadable file '" + name + "'");
  std::vector<std::vector<double>> rows;
  try {
    rows = ordered_json::parse(f).get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("matrix file " + name + ": " + e.what());
  }
  if (rows.size() != n) throw ConfigError("matrix file " + name + " must have n rows");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != m) throw ConfigError("matrix file " + name + " must have m columns");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  try {
    return DenseMatrix(n, m, std::move(flat));
  } catch (const NonFiniteValue&) {
    throw ConfigError("matrix file " + name + " has non-finite entries");
  }
}

ExperimentReport cmd_certify_lb(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = start_report(cfg);
  const RngStream root(cfg.seed);
  auto spec = std::make_shared<const HardInstanceSpec>(build_spec(cfg.m, cfg.n));
  const bool certified_regime = cfg.m >= coupling_threshold(cfg.n);
  for (std::size_t fi = 0; fi < cfg.matrices.size(); ++fi) {
    const std::string& fam = cfg.matrices[fi];
    const RngStream cell = root.split(fi);
    RngStream mrng = cell.split(0);
    auto n_mat = std::make_shared<const DenseMatrix>(matrix_family(fam, cfg.n, cfg.m, mrng));
    const Certificate cert =
        lower_bound_certificate(*spec, *n_mat, cfg.trials, cell.split(1), cfg.threads);
    const double cert_ci = cert.c * (0.5 * cert.prob.halfwidth + cert.delta.halfwidth);
    rep.rows.push_back(row(cfg, cfg.m, cfg.n, 0, fam + "/delta", cert.delta.estimate,
                           cert.delta.halfwidth, cfg.trials));
    rep.rows.push_back(row(cfg, cfg.m, cfg.n, 0, fam + "/prob-d-half", cert.prob.estimate,
                           cert.prob.halfwidth, cfg.trials));
    rep.rows.push_back(
        row(cfg, cfg.m, cfg.n, 0, fam + "/certificate", cert.bound, cert_ci, cfg.trials));
    if (certified_regime) rep.check(fam + ": certificate >= eps0", cert.bound, ">=", kEpsilon0);

    AlgorithmContext ctx;
    ctx.rows = cfg.n;
    ctx.measurement = n_mat;
    ctx.spec = spec;
    for (std::size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
      const std::string& name = cfg.algorithms[ai];
      MuErrorOptions opt;
      opt.budget = cfg.n;
      opt.provide_subset = needs_subset(name);
      opt.threads = cfg.threads;
      const ErrorEstimate e =
          mu_average_error(*spec, algorithm_factory(name, ctx), ErrorNorm::linf,
                           cfg.error_trials, cell.split(2 + ai), opt);
      rep.rows.push_back(
          row(cfg, cfg.m, cfg.n, 0, fam + "/" + name, e.estimate, e.halfwidth, cfg.error_trials));
      rep.check(fam + ": " + name + " error + 3 CI >= certificate", e.estimate + 3.0 * e.halfwidth,
                ">=", cert.bound);
    }
  }
  return rep;
}

ExperimentReport cmd_gap(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = start_report(cfg);
  const RngStream root(cfg.seed);
  std::vector<double> adaptive_err, ratios;
  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    const std::size_t m = cfg.m_grid[mi];
    const RngStream cell = root.split(mi);
    auto spec = std::make_shared<const HardInstanceSpec>(build_spec(m, cfg.n));
    std::shared_ptr<const DenseMatrix> n_mat;
    if (cfg.budget > 0) {
      RngStream mrng = cell.split(0);
      n_mat = std::make_shared<const DenseMatrix>(gaussian_matrix(cfg.budget, m, mrng));
    }
    AlgorithmContext ctx;
    ctx.rows = cfg.budget;
    ctx.measurement = n_mat;
    ctx.spec = spec;
    ctx.recovery = recovery_config(cfg);

    double best_nonadaptive = std::numeric_limits<double>::infinity(), best_hw = 0.0;
    double adaptive = std::numeric_limits<double>::quiet_NaN(), adaptive_hw = 0.0;
    for (std::size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
      const std::string& name = cfg.algorithms[ai];
      const bool is_adaptive = algorithm_mode(name) == InfoMode::adaptive;
      ErrorEstimate e;
      if (cfg.budget == 0 && !is_adaptive && name != "zero") {
        // A sketch with no rows outputs 0.
        e = mu_average_error(*spec, algorithm_factory("zero", ctx), ErrorNorm::linf,
                             cfg.error_trials, cell.split(1 + ai), {0, false, cfg.threads});
      } else {
        MuErrorOptions opt;
        opt.budget = cfg.budget;
        opt.provide_subset = needs_subset(name);
        opt.threads = cfg.threads;
        e = mu_average_error(*spec, algorithm_factory(name, ctx), ErrorNorm::linf,
                             cfg.error_trials, cell.split(1 + ai), opt);
      }
      rep.rows.push_back(
          row(cfg, m, cfg.budget, cfg.k, name, e.estimate, e.halfwidth, cfg.error_trials));
      if (is_adaptive) {
        if (std::isnan(adaptive)) {
          adaptive = e.estimate;
          adaptive_hw = e.halfwidth;
        }
      } else if (e.estimate < best_nonadaptive) {
        best_nonadaptive = e.estimate;
        best_hw = e.halfwidth;
      }
    }
    for (std::size_t ci = 0; ci < cfg.certificate_ns.size(); ++ci) {
      const std::size_t nl = cfg.certificate_ns[ci];
      if (m < coupling_threshold(nl)) continue;
      const HardInstanceSpec lb_spec = build_spec(m, nl);
      RngStream mrng = cell.split(1000 + 2 * ci);
      const DenseMatrix lb_mat = gaussian_matrix(nl, m, mrng);
      const Certificate cert =
          lower_bound_certificate(lb_spec, lb_mat, cfg.trials, cell.split(1001 + 2 * ci), cfg.threads);
      const double cert_ci = cert.c * (0.5 * cert.prob.halfwidth + cert.delta.halfwidth);
      rep.rows.push_back(row(cfg, m, nl, 0, "certificate", cert.bound, cert_ci, cfg.trials));
      rep.check("m=" + std::to_string(m) + " n=" + std::to_string(nl) + ": certificate >= eps0",
                cert.bound, ">=", kEpsilon0);
    }
    if (!std::isnan(adaptive) && std::isfinite(best_nonadaptive) && adaptive > 0.0) {
      const double ratio = best_nonadaptive / adaptive;
      rep.rows.push_back(row(cfg, m, cfg.budget, cfg.k, "ratio", ratio,
                             ratio_halfwidth(best_nonadaptive, best_hw, adaptive, adaptive_hw),
                             cfg.error_trials));
      ratios.push_back(ratio);
    }
    if (!std::isnan(adaptive)) adaptive_err.push_back(adaptive);
  }
  if (adaptive_err.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(adaptive_err.begin(), adaptive_err.end());
    rep.check("adaptive error max/min over the grid <= 2",
              *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity(), "<=", 2.0);
  }
  if (ratios.size() >= 2) {
    double worst_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < ratios.size(); ++i)
      worst_step = std::min(worst_step, ratios[i] - ratios[i - 1]);
    rep.check("ratio non-decreasing in m (smallest step)", worst_step, ">=", 0.0);
  }
  return rep;
}

DenseVector draw_recovery_input(RecoveryInput kind, std::size_t m, std::size_t k, double exponent,
                                RngStream& rng) {
  DenseVector x(m);
  switch (kind) {
    case RecoveryInput::b1: {
      // (E_1..E_m) / (E_1 + ... + E_{m+1}) is uniform on the simplex body.
      double total = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        x[j] = -std::log(rng.uniform_pos());
        total += x[j];
      }
      total += -std::log(rng.uniform_pos());
      for (std::size_t j = 0; j < m; ++j) x[j] = rng.sign() * x[j] / total;
      return x;
    }
    case RecoveryInput::power_law: {
      std::vector<std::size_t> perm(m);
      for (std::size_t j = 0; j < m; ++j) perm[j] = j;
      for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
      double total = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        const double v = std::pow(static_cast<double>(r + 1), -exponent);
        x[perm[r]] = rng.sign() * v;
        total += v;
      }
      return (1.0 / total) * x;
    }
    case RecoveryInput::sparse: {
      const auto support = sample_subset(m, std::min(k, m), rng);
      double total = 0.0;
      for (std::size_t j : support) {
        x[j] = rng.gaussian();
        total += std::fabs(x[j]);
      }
      return total > 0.0 ? (1.0 / total) * x : x;
    }
  }
  return x;
}

ExperimentReport cmd_recover(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = start_report(cfg);
  const RngStream root(cfg.seed);
  const RecoveryConfig rc = recovery_config(cfg);
  const std::size_t budget =
      cfg.budget ? cfg.budget : measurement_budget(cfg.m, cfg.k, cfg.eps, rc.votes_per_round);
  AlgorithmContext ctx;
  ctx.rows = budget;
  ctx.recovery = rc;

  for (std::size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
    const std::string& name = cfg.algorithms[ai];
    const InfoMode mode = algorithm_mode(name);
    const AlgorithmFactory make = algorithm_factory(name, ctx);
    struct Part {
      std::uint64_t success = 0;
      std::uint64_t homogeneous = 0;
      std::uint64_t homogeneity_runs = 0;
      std::size_t max_used = 0;
      MeanAccumulator error;
    };
    const RngStream input_root = root.split(0);
    const RngStream alg_root = root.split(1 + ai);
    constexpr std::size_t kChunk = 8;
    const auto parts = parallel_chunks<Part>(
        cfg.error_trials, kChunk, cfg.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
          Part p;
          for (std::size_t t = begin; t < end; ++t) {
            RngStream in = input_root.split(t);
            const DenseVector x = draw_recovery_input(cfg.input, cfg.m, cfg.k, cfg.input_exponent, in);
            RngStream alg_rng = alg_root.split(t);
            const RngStream alg_start = alg_rng;
            auto alg = make();
            const RunResult r = run_algorithm(*alg, x, budget, mode, alg_rng);
            const double err = (x - r.output).norm2();
            const double tail = best_k_term_error(x, cfg.k, KTermNorm::l2);
            if (err <= 2.0 * tail) ++p.success;
            p.error.add(tail > 0.0 ? err / tail : (err == 0.0 ? 0.0 : 1e300));
            p.max_used = std::max(p.max_used, r.measurements_used);
            if (mode == InfoMode::adaptive && t < cfg.homogeneity_trials) {
              const double s = cfg.homogeneity_scale;
              RngStream again = alg_start;
              auto alg2 = make();
              const RunResult r2 = run_algorithm(*alg2, s * x, budget, mode, again);
              bool same = r2.measurements_used == r.measurements_used;
              for (std::size_t j = 0; same && j < cfg.m; ++j) same = r2.output[j] == s * r.output[j];
              ++p.homogeneity_runs;
              if (same) ++p.homogeneous;
            }
          }
          return p;
        });
    Part total;
    for (const auto& p : parts) {
      total.success += p.success;
      total.homogeneous += p.homogeneous;
      total.homogeneity_runs += p.homogeneity_runs;
      total.max_used = std::max(total.max_used, p.max_used);
      total.error.merge(p.error);
    }
    const ProbabilityEstimate rate = make_probability(total.success, cfg.error_trials);
    rep.rows.push_back(
        row(cfg, cfg.m, budget, cfg.k, name, rate.estimate, rate.halfwidth, cfg.error_trials));
    rep.rows.push_back(row(cfg, cfg.m, budget, cfg.k, name + "/measurements",
                           static_cast<double>(total.max_used), 0.0, cfg.error_trials));
    rep.check(name + ": measurements <= budget", static_cast<double>(total.max_used), "<=",
              static_cast<double>(budget));
    if (mode == InfoMode::adaptive) {
      rep.check(name + ": l2/l2 success rate >= 0.9", rate.estimate, ">=", 0.9);
      if (total.homogeneity_runs > 0) {
        const double frac = static_cast<double>(total.homogeneous) /
                            static_cast<double>(total.homogeneity_runs);
        rep.rows.push_back(row(cfg, cfg.m, budget, cfg.k, name + "/homogeneity", frac, 0.0,
                               total.homogeneity_runs));
        rep.check(name + ": scaled runs bit-identical", frac, ">=", 1.0);
      }
    }
  }
  return rep;
}

DenseMatrix points_cell_centers() {
  const double r1 = points_radius(1);
  const auto total = static_cast<std::size_t>(std::ceil(kPointsConstant * (r1 + 3.0)));
  const std::size_t inside = (total + 1) / 2;
  DenseMatrix c(1, total);
  for (std::size_t i = 0; i < inside; ++i)
    c(0, i) = -r1 + 2.0 * r1 * static_cast<double>(i) / static_cast<double>(inside - 1);
  for (std::size_t i = inside; i < total; ++i)
    c(0, i) = 1000.0 + 100.0 * static_cast<double>(i - inside);
  return c;
}

ExperimentReport cmd_lemma_check(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = start_report(cfg);
  const RngStream root(cfg.seed);
  const HardInstanceSpec spec = build_spec(cfg.m, cfg.n);

  // Truncation: delta <= e^{-4n}.
  const ProbabilityEstimate delta =
      estimate_truncation_delta(spec, cfg.trials, root.split(0), cfg.threads);
  rep.rows.push_back(row(cfg, cfg.m, cfg.n, 0, "truncation-delta", delta.estimate, delta.halfwidth,
                         cfg.trials));
  rep.check("truncation delta <= e^{-4n}", delta.estimate, "<=",
            std::exp(-4.0 * static_cast<double>(cfg.n)));

  // Separation of the axis family.
  const SeparationDistances sep = separation_distances(spec);
  const double sep_err = std::max(std::fabs(sep.dist1 - 2.0 / 3.0), std::fabs(sep.dist_inf - 1.0 / 3.0));
  rep.rows.push_back(row(cfg, cfg.m, cfg.n, 0, "separation-dist1", sep.dist1, 0.0, 1));
  rep.rows.push_back(row(cfg, cfg.m, cfg.n, 0, "separation-dist-inf", sep.dist_inf, 0.0, 1));
  rep.check("separation distances equal (2/3, 1/3)", sep_err, "<=", 1e-12);

  // Points-in-N01 cell.
  const DenseMatrix centers = points_cell_centers();
  const GaussianMixtureModel cell(centers, DenseMatrix::identity(1));
  const ProbabilityEstimate pd =
      mixture_distinctness_probability(cell, 0.5, cfg.trials, root.split(1), cfg.threads);
  rep.rows.push_back(row(cfg, centers.cols(), 1, 0, "points-in-n01", pd.estimate, pd.halfwidth, cfg.trials));
  rep.check("points-in-N01: P(D <= 1/2) + 3 CI >= 1/5", pd.estimate + 3.0 * pd.halfwidth, ">=", 0.2);

  // Deterministic shrinkage certificates.
  constexpr std::size_t kMatrices = 100, kColumns = 50;
  std::uint64_t column_failures = 0, rectangle_failures = 0, equality_failures = 0;
  double worst_ratio = 0.0;
  const RngStream shrink = root.split(2);
  for (std::size_t t = 0; t < kMatrices; ++t) {
    RngStream r = shrink.split(t);
    const std::size_t n = 1 + t % 4;
    const DenseMatrix a = gaussian_matrix(n, kColumns, r);
    const ShrinkageTrace trace = run_shrinkage(a, sample_subset(kColumns, 2 * n, r));
    for (std::size_t j : trace.final_set)
      if (!verify_column_in_rectangle(trace, j)) ++column_failures;
    for (std::size_t i = 1; i <= n; ++i) {
      const double scale = (cfg.inject_bug && i == 1) ? 0.9 : 1.0;
      const RectangleCheck rc = check_rectangle_in_ellipsoid(trace, i, scale);
      worst_ratio = std::max(worst_ratio, rc.worst_ratio);
      if (!rc.passed) ++rectangle_failures;
      if (i == 1 && std::fabs(check_rectangle_in_ellipsoid(trace, 1).worst_ratio - 1.0) > 1e-9)
        ++equality_failures;
    }
  }
  rep.rows.push_back(row(cfg, kColumns, 4, 0, "column-in-rectangle-failures",
                         static_cast<double>(column_failures), 0.0, kMatrices));
  rep.rows.push_back(row(cfg, kColumns, 4, 0, "rectangle-in-ellipsoid-failures",
                         static_cast<double>(rectangle_failures), 0.0, kMatrices));
  rep.rows.push_back(row(cfg, kColumns, 4, 0, "rectangle-worst-ratio", worst_ratio, 0.0, kMatrices));
  rep.check("columns inside their rectangles (failures)", static_cast<double>(column_failures), "<=", 0.0);
  rep.check("rectangles inside inflated ellipsoids (failures)", static_cast<double>(rectangle_failures),
            "<=", 0.0);
  rep.check("stage-1 inclusion is tight (failures)", static_cast<double>(equality_failures), "<=", 0.0);

  // At least half the columns inside 2^n E_J with probability >= 1/2.
  {
    RngStream r = root.split(3);
    const DenseMatrix a = gaussian_matrix(2, kColumns, r);
    const InflatedCountRun run = inflated_count_probability(a, cfg.error_trials, root.split(4), cfg.threads);
    rep.rows.push_back(row(cfg, kColumns, 2, 0, "half-columns-inflated", run.prob.estimate,
                           run.prob.halfwidth, cfg.error_trials));
    rep.check("P(count >= m/2) + 3 CI >= 1/2", run.prob.estimate + 3.0 * run.prob.halfwidth, ">=", 0.5);
    rep.check("count below certified final set (trials)", static_cast<double>(run.proxy_violations),
              "<=", 0.0);
  }

  // Law of k_n.
  {
    const KnLawRun run = kn_law_check(8, 2, cfg.trials, root.split(5), cfg.threads);
    rep.rows.push_back(row(cfg, 8, 2, 0, "kn-law-tv", run.tv_distance, 0.0, cfg.trials));
    rep.check("k_n law total variation <= 0.02", run.tv_distance, "<=", 0.02);
  }

  // Conditional-average bound against a grid of constant outputs on a toy instance.
  {
    RngStream r = root.split(6);
    DiscreteInstance inst;
    inst.num_components = 3;
    const double c = 1.0 / 3.0;
    const double base[3][2] = {{0.0, 0.0}, {2.0 * c, 0.0}, {0.0, 2.0 * c}};
    double total = 0.0;
    for (std::size_t comp = 0; comp < 3; ++comp)
      for (double shift : {-0.05, 0.05}) {
        DiscreteAtom atom;
        atom.point = DenseVector{base[comp][0] + shift, base[comp][1] - shift};
        atom.prob = 0.5 + r.uniform();
        atom.component = comp;
        atom.in_event = r.uniform() < 0.9;
        total += atom.prob;
        inst.atoms.push_back(atom);
      }
    for (auto& atom : inst.atoms) atom.prob /= total;
    const double sep_c = component_separation(inst);
    const double bound = conditional_average_bound(inst, sep_c);
    double best = std::numeric_limits<double>::infinity();
    constexpr int kSteps = 100;
    for (int a = 0; a <= kSteps; ++a)
      for (int b = 0; b <= kSteps; ++b) {
        const DenseVector g{-0.2 + a * 1.2 / kSteps, -0.2 + b * 1.2 / kSteps};
        best = std::min(best, expected_event_error(inst, g));
      }
    rep.rows.push_back(row(cfg, 2, 0, 0, "cond-avg-bound", bound, 0.0, 1));
    rep.rows.push_back(row(cfg, 2, 0, 0, "cond-avg-grid-min", best, 0.0, 1));
    rep.check("conditional-average bound <= grid minimum", bound - best, "<=", 1e-12);
  }
  return rep;
}

ExperimentReport cmd_concentration(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = start_report(cfg);
  const RngStream root(cfg.seed);
  for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
    const std::size_t d = cfg.dims[di];
    for (auto [kind, label] : {std::pair{NormKind::l2, "l2-tail"}, std::pair{NormKind::l1, "l1-tail"}}) {
      const TailCheck tc = tail_bound_check(d, kind, cfg.trials,
                                            root.split(2 * di + (kind == NormKind::l1)), cfg.threads);
      rep.rows.push_back(row(cfg, 0, d, 0, label, tc.empirical, tc.halfwidth, cfg.trials));
      rep.rows.push_back(row(cfg, 0, d, 0, std::string(label) + "-bound", tc.bound, 0.0, cfg.trials));
      rep.check("dim " + std::to_string(d) + " " + label + " <= e^{-2 dim}", tc.empirical, "<=", tc.bound);
    }
  }
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  switch (cfg.experiment) {
    case ExperimentKind::certify_lb:
      rep = cmd_certify_lb(cfg);
      break;
    case ExperimentKind::gap:
      rep = cmd_gap(cfg);
      break;
    case ExperimentKind::recover:
      rep = cmd_recover(cfg);
      break;
    case ExperimentKind::lemma_check:
      rep = cmd_lemma_check(cfg);
      break;
    case ExperimentKind::concentration:
      rep = cmd_concentration(cfg);
      break;
  }
  if (cfg.timing)
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace seqgap
