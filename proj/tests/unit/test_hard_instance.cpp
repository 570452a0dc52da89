#include <cmath>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "seqgap/errors.hpp"
#include "seqgap/hard_instance.hpp"

using namespace seqgap;

TEST_CASE("default spec and constants") {
  const HardInstanceSpec s = build_spec(100, 2);
  CHECK(s.m == 100);
  CHECK(s.num_points == 100);
  CHECK(s.sigma == doctest::Approx(1.0 / 36.0));
  CHECK(s.r0 == doctest::Approx(1.0 / 3.0));
  CHECK(s.separation_c == doctest::Approx(1.0 / 3.0));
  CHECK(s.subset_size() == 4);
  CHECK(s.point(7)[7] == doctest::Approx(2.0 / 3.0));
  CHECK(kPointsConstant == doctest::Approx(10.0 * std::exp(1.5) / (3.0 * M_PI)).epsilon(1e-14));
  CHECK(kEpsilon0 == doctest::Approx((0.05 - std::exp(-4.0)) / 3.0).epsilon(1e-14));
  CHECK(points_radius(1) == 24.0);
  CHECK(points_radius(2) == 96.0);
  CHECK(coupling_threshold(1) == 129);
  CHECK(coupling_threshold(2) ==
        static_cast<std::size_t>(std::ceil(kPointsConstant * std::pow(96.0 + 3.0 * std::sqrt(2.0), 2))));
}

TEST_CASE("spec validation") {
  CHECK_THROWS(build_spec(3, 2));
  CHECK_THROWS(make_spec(10, 1, -0.1, 1.0 / 3, 1.0 / 3));
  CHECK_THROWS(make_spec(10, 1, 0.1, -1.0, 1.0 / 3));
  CHECK_THROWS(make_spec(10, 0, 0.1, 1.0 / 3, 1.0 / 3));
  CHECK_NOTHROW(make_spec(10, 1, 0.0, 1.0 / 3, 1.0 / 3));
  // Points whose balls overlap violate the separation.
  std::vector<SparsePoint> close{{{{0, 0.5}}}, {{{0, 0.6}}}};
  CHECK_THROWS(make_spec(10, 1, 0.01, 0.2, 0.2, close));
  std::vector<SparsePoint> big{{{{0, 0.95}}}, {{{1, 0.5}}}};
  CHECK_THROWS(make_spec(10, 1, 0.01, 0.1, 0.1, big));
  std::vector<SparsePoint> far{{{{0, 0.5}}}, {{{1, 0.4}, {2, -0.4}}}};
  CHECK_NOTHROW(make_spec(10, 1, 0.01, 0.1, 0.1, far));
}

TEST_CASE("l_inf distance of l1 balls matches the bisection oracle") {
  RngStream rng(11);
  for (int t = 0; t < 200; ++t) {
    SparsePoint a, b;
    oracle::Vec da(6, 0), db(6, 0);
    for (std::size_t j = 0; j < 6; ++j) {
      if (rng.uniform() < 0.6) {
        const double v = rng.gaussian();
        a.entries.push_back({j, v});
        da[j] = v;
      }
      if (rng.uniform() < 0.6) {
        const double v = rng.gaussian();
        b.entries.push_back({j, v});
        db[j] = v;
      }
    }
    const double r = 0.5 * rng.uniform();
    const double got = linf_distance_l1_balls(a, b, r);
    const auto want = static_cast<double>(oracle::linf_distance_l1_balls(da, db, r));
    CHECK(got == doctest::Approx(want).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("axis-family separation") {
  const HardInstanceSpec s = build_spec(50, 1);
  const SeparationDistances d = separation_distances(s);
  CHECK(d.dist1 == doctest::Approx(2.0 / 3.0));
  CHECK(d.dist_inf == doctest::Approx(1.0 / 3.0));
  RngStream rng(2);
  CHECK(sampled_linf_separation(s, 500, rng) >= d.dist_inf - 1e-12);
}

TEST_CASE("sample_subset is uniform over subsets") {
  RngStream rng(17);
  std::map<std::vector<std::size_t>, int> counts;
  const int trials = 60000;
  for (int t = 0; t < trials; ++t) {
    auto s = sample_subset(6, 2, rng);
    REQUIRE(s.size() == 2);
    CHECK(s[0] != s[1]);
    std::sort(s.begin(), s.end());
    ++counts[s];
  }
  CHECK(counts.size() == 15);
  const double expect = trials / 15.0;
  double chi2 = 0.0;
  for (const auto& [k, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 36.1);  // 0.999 quantile, 14 degrees of freedom
  CHECK(sample_subset(1u << 30, 3, rng).size() == 3);
}

TEST_CASE("draws are reproducible and consistent") {
  const HardInstanceSpec s = build_spec(40, 2);
  RngStream a(5), b(5);
  const HardDraw d = draw_sparse(s, a);
  const HardSample full = draw_sample(s, b);
  CHECK(d.index_i == full.index_i);
  CHECK(d.subset_j == full.subset_j);
  CHECK(d.z_on_j == full.z_on_j);
  DenseVector x = s.point(full.index_i);
  for (std::size_t t = 0; t < d.subset_j.size(); ++t) x[d.subset_j[t]] += s.sigma * d.z_on_j[t];
  CHECK((x - full.x).norm_inf() < 1e-15);
  CHECK(full.truncated_flag == (full.disturbance_w.norm1() <= s.r0 / s.sigma));
}

TEST_CASE("truncation probability is below e^{-4n}") {
  for (std::size_t n : {1u, 2u}) {
    const ProbabilityEstimate p = estimate_truncation_delta(build_spec(64, n), 100000, RngStream(n), 2);
    CHECK(p.estimate <= std::exp(-4.0 * double(n)));
    CHECK(p.lower <= p.estimate);
    CHECK(p.upper >= p.estimate);
  }
}

TEST_CASE("mu-average error of trivial algorithms") {
  const HardInstanceSpec s = build_spec(16, 1);
  MuErrorOptions opt;
  opt.budget = 16;
  const ErrorEstimate readout = mu_average_error(
      s, [] { return std::make_unique<CoordinateReadout>(); }, ErrorNorm::linf, 200, RngStream(1), opt);
  CHECK(readout.estimate == 0.0);
  CHECK(readout.max_measurements == 16);
  opt.budget = 0;
  const ErrorEstimate zero = mu_average_error(
      s, [] { return std::make_unique<ZeroAlgorithm>(); }, ErrorNorm::linf, 4000, RngStream(1), opt);
  // On the truncation event ||x||_inf lies within r0 of 2/3.
  CHECK(zero.estimate <= 2.0 / 3.0 + s.r0);
  CHECK(zero.estimate >= (2.0 / 3.0 - s.r0) * (1.0 - std::exp(-4.0)));
  CHECK(error_norm(DenseVector{1, -3}, DenseVector{0, 1}, ErrorNorm::linf) == 4.0);
  CHECK(error_norm(DenseVector{3, 0}, DenseVector{0, 4}, ErrorNorm::l2) == 5.0);
  // Thread count does not matter.
  opt.threads = 3;
  CHECK(mu_average_error(s, [] { return std::make_unique<ZeroAlgorithm>(); }, ErrorNorm::linf, 4000,
                         RngStream(1), opt)
            .estimate == zero.estimate);
}
