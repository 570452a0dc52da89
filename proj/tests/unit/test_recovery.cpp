#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "seqgap/column_geometry.hpp"
#include "seqgap/errors.hpp"
#include "seqgap/harness.hpp"
#include "seqgap/recovery.hpp"

using namespace seqgap;

namespace {

oracle::Mat to_oracle(const DenseMatrix& a) {
  oracle::Mat m(a.rows(), oracle::Vec(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = a(i, j);
  return m;
}

// One heavy coordinate plus a small tail of total mass `tail`.
DenseVector heavy_input(std::size_t m, std::size_t heavy, double tail, RngStream& rng) {
  DenseVector x(m);
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    x[j] = rng.gaussian();
    total += std::fabs(x[j]);
  }
  for (std::size_t j = 0; j < m; ++j) x[j] *= tail / total;
  x[heavy] = 1.0;
  return x;
}

std::vector<std::size_t> iota_vec(std::size_t m) {
  std::vector<std::size_t> v(m);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("measurement budget") {
  CHECK(measurement_budget(1u << 16, 1, 0.5) <= 200);
  CHECK_THROWS_AS(measurement_budget(8, 1, 0.5), DomainError);
  CHECK_NOTHROW(measurement_budget(16, 1, 0.5));
  // Doubly-logarithmic growth: m from 2^10 to 2^20 at most doubles the budget.
  CHECK(measurement_budget(1u << 20, 4, 0.5) <= 2 * measurement_budget(1u << 10, 4, 0.5));
  for (std::size_t m = 64; m <= (1u << 22); m *= 2)
    CHECK(measurement_budget(2 * m, 2, 0.25) >= measurement_budget(m, 2, 0.25));
  CHECK(default_rounds(2) == 2);
  CHECK(default_rounds(1u << 16) == 4);
  CHECK(default_rounds(1u << 17) == 5);
  RecoveryConfig bad;
  bad.eps = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.eps = 0.5;
  bad.num_candidate_sets = 0;
  bad.k = 3;
  CHECK(bad.candidate_sets() == 6);
}

TEST_CASE("one-sparse search finds an exactly one-sparse vector") {
  RngStream rng(31);
  RecoveryConfig cfg;
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1u << 12;
    DenseVector x(m);
    const std::size_t j = rng.below(m);
    x[j] = rng.gaussian();
    InformationSession s(x, 200, InfoMode::adaptive);
    const OneSparseResult r = adaptive_one_sparse(s, iota_vec(m), cfg, 200, rng);
    REQUIRE(r.index.has_value());
    CHECK(*r.index == j);
    CHECK(r.measurements <= 200);
  }
  InformationSession s(DenseVector(8), 10, InfoMode::adaptive);
  CHECK_FALSE(adaptive_one_sparse(s, {}, cfg, 10, rng).index.has_value());
  CHECK(adaptive_one_sparse(s, {5}, cfg, 10, rng).index == std::optional<std::size_t>(5));
  CHECK(s.used() == 0);
  CHECK_FALSE(adaptive_one_sparse(s, iota_vec(8), cfg, 10, rng).index.has_value());
}

TEST_CASE("one-sparse search with a heavy coordinate and a 10% tail") {
  RngStream rng(32);
  RecoveryConfig cfg;
  cfg.votes_per_round = 9;
  const std::size_t m = 1u << 16;
  const std::size_t budget = measurement_budget(m, 1, 0.5, 9);
  int found = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const std::size_t j = rng.below(m);
    const DenseVector x = heavy_input(m, j, 0.1, rng);
    InformationSession s(x, budget, InfoMode::adaptive);
    const OneSparseResult r = adaptive_one_sparse(s, iota_vec(m), cfg, budget, rng);
    found += r.index == std::optional<std::size_t>(j);
  }
  CHECK(found >= 0.9 * trials);
}

TEST_CASE("k-sparse recovery of exactly sparse inputs and the l2/l2 guarantee") {
  RngStream rng(33);
  RecoveryConfig cfg;
  cfg.k = 4;
  const std::size_t m = 1u << 12;
  const std::size_t budget = measurement_budget(m, 4, 0.5);
  int exact = 0, within = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const DenseVector x = draw_recovery_input(RecoveryInput::sparse, m, 4, 1.0, rng);
    InformationSession s(x, budget, InfoMode::adaptive);
    const KSparseResult r = adaptive_k_sparse_recover(s, cfg, rng);
    CHECK(r.measurements <= budget);
    CHECK(s.used() == r.measurements);
    exact += (r.output - x).norm_inf() == 0.0;
    const DenseVector y = draw_recovery_input(RecoveryInput::power_law, m, 4, 1.5, rng);
    InformationSession s2(y, budget, InfoMode::adaptive);
    const KSparseResult r2 = adaptive_k_sparse_recover(s2, cfg, rng);
    within += (r2.output - y).norm2() <= 2.0 * best_k_term_error(y, 4, KTermNorm::l2);
  }
  CHECK(exact >= 0.9 * trials);
  CHECK(within >= 0.9 * trials);
}

TEST_CASE("adaptive recovery is positively homogeneous and exact on zero") {
  RngStream rng(34);
  RecoveryConfig cfg;
  cfg.k = 2;
  const std::size_t m = 1024;
  const std::size_t budget = measurement_budget(m, 2, 0.5);
  for (int t = 0; t < 20; ++t) {
    const DenseVector x = draw_recovery_input(RecoveryInput::power_law, m, 2, 1.2, rng);
    for (double scale : {100.0, 1.0 / 64.0, -3.0}) {
      RngStream a = rng.split(t), b = rng.split(t);
      AdaptiveKSparse alg1(cfg), alg2(cfg);
      const RunResult r1 = run_algorithm(alg1, x, budget, InfoMode::adaptive, a);
      const RunResult r2 = run_algorithm(alg2, scale * x, budget, InfoMode::adaptive, b);
      CHECK(r2.measurements_used == r1.measurements_used);
      bool same = true;
      for (std::size_t j = 0; j < m; ++j) same = same && r2.output[j] == scale * r1.output[j];
      CHECK(same);
    }
  }
  AdaptiveKSparse alg(cfg);
  const RunResult z = run_algorithm(alg, DenseVector(m), budget, InfoMode::adaptive, rng);
  CHECK(z.output.norm_inf() == 0.0);
}

TEST_CASE("l1 minimization agrees with vertex enumeration") {
  RngStream rng(35);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 2 + t % 3, m = 7;
    const DenseMatrix a = gaussian_matrix(n, m, rng);
    DenseVector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.gaussian();
    const L1Result r = l1_min_decode(a, y, 1e-10);
    const auto want = oracle::l1_minimum(to_oracle(a), oracle::Vec(y.begin(), y.end()));
    REQUIRE(want.has_value());
    CHECK(r.z.norm1() == doctest::Approx(double(want->value)).epsilon(1e-6));
    CHECK((a * r.z - y).norm_inf() <= 1e-8 * (1.0 + y.norm2()));
  }
  const DenseMatrix sq{{2.0, 1.0}, {1.0, 3.0}};
  const L1Result inv = l1_min_decode(sq, DenseVector{3.0, 4.0});
  CHECK(inv.z[0] == doctest::Approx(1.0));
  CHECK(inv.z[1] == doctest::Approx(1.0));
  CHECK(l1_min_decode(gaussian_matrix(3, 9, rng), DenseVector(3)).z.norm_inf() == 0.0);
  CHECK_THROWS_AS(l1_min_decode(DenseMatrix{{1.0, 1.0}, {2.0, 2.0}}, DenseVector{1.0, 0.0}), Infeasible);
}

TEST_CASE("l1 minimization recovers one-sparse vectors from few Gaussian rows") {
  RngStream rng(36);
  int ok = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    const std::size_t m = 200;
    const DenseMatrix a = gaussian_matrix(20, m, rng);
    DenseVector x(m);
    x[rng.below(m)] = rng.gaussian();
    const L1Result r = l1_min_decode(a, a * x);
    ok += (r.z - x).norm_inf() <= 1e-4 * x.norm_inf();
  }
  CHECK(ok >= 0.95 * trials);
}

TEST_CASE("greedy decoding") {
  RngStream rng(37);
  int ok = 0;
  for (int t = 0; t < 30; ++t) {
    const std::size_t m = 120;
    const DenseMatrix a = gaussian_matrix(30, m, rng);
    DenseVector x(m);
    for (std::size_t j : sample_subset(m, 3, rng)) x[j] = rng.gaussian();
    ok += (greedy_decode(a, a * x, 3) - x).norm_inf() <= 1e-9;
  }
  CHECK(ok >= 27);
  CHECK(greedy_decode(gaussian_matrix(4, 10, rng), DenseVector(4), 3).norm_inf() == 0.0);
}

TEST_CASE("linear decode is unbiased for Gaussian rows") {
  RngStream rng(38);
  const DenseVector x{1.0, -2.0, 0.5};
  DenseVector mean(3);
  const int reps = 4000;
  for (int t = 0; t < reps; ++t) {
    const DenseMatrix a = gaussian_matrix(5, 3, rng);
    mean = mean + (1.0 / reps) * linear_decode(a, a * x);
  }
  // Each coordinate has variance ||x||^2 (1 + e_j^2 terms) / 5 per draw; 5 sigma slack.
  for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(mean[j] - x[j]) < 5.0 * std::sqrt(2.0 * 5.25 / 5.0 / reps));
}

TEST_CASE("best k-term error") {
  const DenseVector x{0.5, -3.0, 1.0, 3.0, -0.25};
  CHECK(top_k_indices(x, 2) == std::vector<std::size_t>{1, 3});
  CHECK(best_k_term_error(x, 2, KTermNorm::l1) == doctest::Approx(1.75));
  CHECK(best_k_term_error(x, 2, KTermNorm::l2) == doctest::Approx(std::sqrt(1.3125)));
  CHECK(best_k_term_error(x, 2, KTermNorm::linf) == 1.0);
  CHECK(best_k_term_error(x, 5, KTermNorm::l2) == 0.0);
  CHECK_THROWS_AS(best_k_term_error(x, 9, KTermNorm::l2), DomainError);
  // ||x - x_k||_2 <= ||x||_1 / (2 sqrt k).
  RngStream rng(39);
  for (int t = 0; t < 200; ++t) {
    DenseVector v(50);
    for (std::size_t j = 0; j < 50; ++j) v[j] = rng.gaussian();
    const std::size_t k = 1 + rng.below(20);
    CHECK(best_k_term_error(v, k, KTermNorm::l2) <= v.norm1() / (2.0 * std::sqrt(double(k))) + 1e-12);
  }
}

TEST_CASE("sketch decoders through the protocol") {
  RngStream rng(40);
  const std::size_t m = 60;
  DenseVector x(m);
  x[7] = 2.0;
  for (auto d : {LinearDecoder::l1min, LinearDecoder::greedy}) {
    SketchDecoder alg(d, 15);
    const RunResult r = run_algorithm(alg, x, 15, InfoMode::nonadaptive, rng);
    CHECK(r.measurements_used == 15);
    CHECK((r.output - x).norm_inf() < 1e-4);
  }
  SketchDecoder too_many(LinearDecoder::gaussian_linear, 16);
  CHECK_THROWS_AS(run_algorithm(too_many, x, 15, InfoMode::nonadaptive, rng), BudgetExceeded);
}
