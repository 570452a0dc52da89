#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "seqgap/column_geometry.hpp"
#include "seqgap/errors.hpp"
#include "seqgap/posterior.hpp"

using namespace seqgap;

namespace {

oracle::Mat to_oracle(const DenseMatrix& a) {
  oracle::Mat m(a.rows(), oracle::Vec(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = a(i, j);
  return m;
}

std::vector<oracle::Atom> to_atoms(const DiscreteInstance& inst) {
  std::vector<oracle::Atom> out;
  for (const auto& a : inst.atoms) out.push_back({oracle::Vec(a.point.begin(), a.point.end()), a.prob, a.in_event});
  return out;
}

}  // namespace

TEST_CASE("mixture posterior matches the extended-precision oracle") {
  RngStream rng(21);
  for (int t = 0; t < 20; ++t) {
    const DenseMatrix centers = gaussian_matrix(2, 5, rng);
    const DenseMatrix g = gaussian_matrix(2, 3, rng);
    const DenseMatrix cov = 0.3 * (g * g.transpose());
    const GaussianMixtureModel model(centers, cov);
    const DenseVector y{rng.gaussian(), rng.gaussian()};
    const PosteriorVector p = model.posterior(y);
    const oracle::Mat ct = to_oracle(centers.transpose());
    const oracle::Vec want = oracle::mixture_posterior(ct, to_oracle(cov), {y[0], y[1]});
    for (std::size_t i = 0; i < 5; ++i) CHECK(p.probs[i] == doctest::Approx(double(want[i])).epsilon(1e-9));
    CHECK(model.distinctness(y) == doctest::Approx(p.max_prob()));
    CHECK(model.map_index(y) == p.argmax());
  }
}

TEST_CASE("singular covariance excludes components off its range") {
  const DenseMatrix centers{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  const DenseMatrix cov{{1.0, 0.0}, {0.0, 0.0}};
  const GaussianMixtureModel model(centers, cov);
  CHECK(model.covariance_rank() == 1);
  const PosteriorVector p = model.posterior(DenseVector{0.3, 0.0});
  CHECK(p.probs[2] == 0.0);
  const double w0 = std::exp(-0.5 * 0.09), w1 = std::exp(-0.5 * 0.49);
  CHECK(p.probs[0] == doctest::Approx(w0 / (w0 + w1)));
  CHECK_THROWS_AS(model.posterior(DenseVector{0.3, 0.5}), InconsistentObservation);
  CHECK_THROWS_AS(normalize_log_weights({-std::numeric_limits<double>::infinity()}),
                  InconsistentObservation);
  const PosteriorVector tie = normalize_log_weights({0.0, 0.0});
  CHECK(tie.argmax() == 0);
  CHECK(tie.max_prob() == doctest::Approx(0.5));
}

TEST_CASE("distinctness probability extremes") {
  const GaussianMixtureModel same(DenseMatrix{{0.0, 0.0}}, DenseMatrix{{1.0}});
  CHECK(mixture_distinctness_probability(same, 0.5, 2000, RngStream(1)).estimate == 1.0);
  const GaussianMixtureModel far(DenseMatrix{{0.0, 100.0}}, DenseMatrix{{1.0}});
  CHECK(mixture_distinctness_probability(far, 0.5, 2000, RngStream(1)).estimate == 0.0);
  // Components at -1 and 1 with unit variance: D <= 0.6 iff |y| <= atanh(0.2).
  const GaussianMixtureModel mid(DenseMatrix{{-1.0, 1.0}}, DenseMatrix{{1.0}});
  const double a = std::atanh(0.2);
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  const ProbabilityEstimate p = mixture_distinctness_probability(mid, 0.6, 40000, RngStream(2), 2);
  CHECK(std::fabs(p.estimate - (phi(a - 1.0) - phi(-a - 1.0))) <= p.halfwidth);
}

TEST_CASE("certificate arithmetic and a certified cell") {
  CHECK(certificate_value(1.0 / 3.0, 0.8, 0.01) == doctest::Approx((0.4 - 0.01) / 3.0));
  CHECK(certificate_value(1.0 / 3.0, 0.0, 0.01) == 0.0);
  const HardInstanceSpec s = build_spec(256, 1);
  RngStream r(4);
  const DenseMatrix n = gaussian_matrix(1, 256, r);
  const Certificate c = lower_bound_certificate(s, n, 20000, RngStream(5), 2);
  CHECK(c.bound >= kEpsilon0);
  CHECK(c.bound == doctest::Approx(certificate_value(c.c, c.prob.lower, c.delta.upper)));
  CHECK(c.delta.estimate <= std::exp(-4.0));
}

TEST_CASE("conditional-average bound at its kinks equals the grid optimum") {
  const double c = 1.0 / 3.0;
  // Two masses at distance c.
  DiscreteInstance two;
  two.num_components = 2;
  two.atoms = {{DenseVector{0.0}, 0.5, 0, true}, {DenseVector{c}, 0.5, 1, true}};
  const auto g2 = oracle::grid_minimum(to_atoms(two), -0.5, 1.0, 600);
  const double b2 = conditional_average_bound(two, component_separation(two));
  CHECK(component_separation(two) == doctest::Approx(c));
  CHECK(b2 <= double(g2.value) + 1e-12);
  CHECK(b2 >= 0.95 * double(g2.value));
  // Three corners; the optimum sits at (c/2, c/2).
  DiscreteInstance three;
  three.num_components = 3;
  three.atoms = {{DenseVector{0.0, 0.0}, 1.0 / 3, 0, true},
                 {DenseVector{c, 0.0}, 1.0 / 3, 1, true},
                 {DenseVector{0.0, c}, 1.0 / 3, 2, true}};
  const auto g3 = oracle::grid_minimum(to_atoms(three), -0.5, 1.0, 150);
  const double b3 = conditional_average_bound(three, component_separation(three));
  CHECK(b3 <= double(g3.value) + 1e-12);
  CHECK(b3 >= 0.95 * double(g3.value));
  CHECK(expected_event_error(three, DenseVector{c / 2, c / 2}) == doctest::Approx(c / 2));
  // Random instances: the bound never exceeds the achievable error.
  RngStream rng(9);
  for (int t = 0; t < 20; ++t) {
    DiscreteInstance inst;
    inst.num_components = 3;
    double total = 0;
    for (std::size_t a = 0; a < 6; ++a) {
      inst.atoms.push_back({DenseVector{rng.uniform(), rng.uniform()}, rng.uniform() + 0.1, a % 3, rng.uniform() < 0.8});
      total += inst.atoms.back().prob;
    }
    for (auto& a : inst.atoms) a.prob /= total;
    const auto gm = oracle::grid_minimum(to_atoms(inst), -0.2, 1.2, 70);
    CHECK(conditional_average_bound(inst, component_separation(inst)) <= double(gm.value) + 1e-12);
    const DenseVector g{double(gm.argmin[0]), double(gm.argmin[1])};
    CHECK(expected_event_error(inst, g) == doctest::Approx(double(gm.value)).epsilon(1e-12));
  }
}

TEST_CASE("discrete certificate groups atoms by their measurement") {
  const double c = 1.0 / 3.0;
  DiscreteInstance inst;
  inst.num_components = 2;
  inst.atoms = {{DenseVector{0.0, 0.0}, 0.25, 0, true},
                {DenseVector{1.0, 0.0}, 0.25, 1, true},
                {DenseVector{0.0, 1.0}, 0.25, 0, true},
                {DenseVector{1.0, 1.0}, 0.25, 1, false}};
  // Reading the second coordinate leaves the component undetermined: D = 1/2 everywhere.
  const DenseMatrix second{{0.0, 1.0}};
  CHECK(information_groups(inst, second).size() == 2);
  CHECK(discrete_certificate(inst, second, c) == doctest::Approx(c * (0.5 - 0.25)));
  // Reading the first coordinate identifies it: D = 1.
  const DenseMatrix first{{1.0, 0.0}};
  CHECK(discrete_certificate(inst, first, c) == 0.0);
}

TEST_CASE("bayes-mode decoder with the subset beats the zero output") {
  const HardInstanceSpec s = build_spec(32, 1);
  RngStream r(3);
  const DenseMatrix n = gaussian_matrix(1, 32, r);
  MuErrorOptions opt;
  opt.budget = 1;
  opt.provide_subset = true;
  const ErrorEstimate bayes = mu_average_error(s, bayes_mode_decoder(s, n), ErrorNorm::linf, 3000, RngStream(8), opt);
  opt.provide_subset = false;
  opt.budget = 0;
  const ErrorEstimate zero = mu_average_error(
      s, [] { return std::make_unique<ZeroAlgorithm>(); }, ErrorNorm::linf, 3000, RngStream(8), opt);
  CHECK(bayes.estimate < zero.estimate);
  opt.budget = 1;
  opt.provide_subset = false;
  CHECK_THROWS(mu_average_error(s, bayes_mode_decoder(s, n), ErrorNorm::linf, 10, RngStream(8), opt));
}

TEST_CASE("marginal-mode decoder at small m") {
  auto spec = std::make_shared<const HardInstanceSpec>(build_spec(6, 1));
  RngStream r(10);
  auto n = std::make_shared<const DenseMatrix>(gaussian_matrix(1, 6, r));
  MuErrorOptions opt;
  opt.budget = 1;
  const ErrorEstimate marginal = mu_average_error(
      *spec, [&] { return std::make_unique<MarginalModeDecoder>(spec, n); }, ErrorNorm::linf, 3000,
      RngStream(11), opt);
  opt.budget = 0;
  const ErrorEstimate zero = mu_average_error(
      *spec, [] { return std::make_unique<ZeroAlgorithm>(); }, ErrorNorm::linf, 3000, RngStream(11), opt);
  CHECK(marginal.estimate < zero.estimate);
  MarginalModeDecoder dec(spec, n);
  const auto ll = dec.log_likelihoods(DenseVector{0.0});
  CHECK(ll.size() == 6);
}
