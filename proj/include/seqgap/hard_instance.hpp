#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqgap/info_protocol.hpp"
#include "seqgap/linalg.hpp"
#include "seqgap/rng.hpp"
#include "seqgap/stats.hpp"

namespace seqgap {

struct SparsePoint {
  std::vector<std::pair<std::size_t, double>> entries;  // (coordinate, value), distinct coordinates
  double norm1() const;
};

// Parameters of the random input X = u_I + sigma * W, where I is uniform on
// the M points and W is a standard Gaussian vector on a uniform random
// 2n-subset J of the m coordinates. Build through build_spec() or
// make_spec(); both validate every invariant.
struct HardInstanceSpec {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t num_points = 0;  // M
  double sigma = 0.0;
  double r0 = 0.0;
  double separation_c = 0.0;
  // Empty for the axis family u_i = axis_amplitude * e_i (M = m).
  std::vector<SparsePoint> custom_points;
  double axis_amplitude = 2.0 / 3.0;

  bool axis_points() const { return custom_points.empty(); }
  std::size_t subset_size() const { return 2 * n; }
  // Nonzero entries of u_i.
  std::vector<std::pair<std::size_t, double>> point_entries(std::size_t i) const;
  DenseVector point(std::size_t i) const;
  // Throws InvalidDimensions / InvalidGeometry on any violated invariant.
  void validate() const;
};

// C = 10 e^{3/2} / (3 pi) in the point-count condition M >= C (r1 + 3)^n.
inline constexpr double kPointsConstant = 4.75521979296816;
// eps0 = (1/20 - e^{-4}) / 3, the error level certified for n = 1.
inline constexpr double kEpsilon0 = (0.05 - 0.018315638888734179) / 3.0;
// r1 = 12 n 2^n.
double points_radius(std::size_t n);
// ceil(C (r1 + 3 sqrt(n))^n): the smallest m with a certified gap at n measurements.
std::size_t coupling_threshold(std::size_t n);

// Defaults: sigma = 1/(18n), r0 = 1/3, c = 1/3, u_i = (2/3) e_i, M = m.
HardInstanceSpec build_spec(std::size_t m, std::size_t n);

// Custom spec; an empty `points` keeps the axis family with M = m.
HardInstanceSpec make_spec(std::size_t m, std::size_t n, double sigma, double r0,
                           double separation_c, std::vector<SparsePoint> points = {});

// Exact l_inf distance between the l1 balls a + r B_1 and b + r B_1.
double linf_distance_l1_balls(const SparsePoint& a, const SparsePoint& b, double r);

struct HardSample {
  std::size_t index_i = 0;
  std::vector<std::size_t> subset_j;  // in draw order
  std::vector<double> z_on_j;         // W restricted to subset_j, same order
  DenseVector disturbance_w;          // W in R^m
  DenseVector x;                      // u_I + sigma W
  bool truncated_flag = false;        // ||W||_1 <= r0 / sigma
};

// The random ingredients of a sample without the dense vectors.
struct HardDraw {
  std::size_t index_i = 0;
  std::vector<std::size_t> subset_j;
  std::vector<double> z_on_j;
  bool truncated_flag = false;
};

// Draw order: I, then J (partial Fisher-Yates of [m], first 2n entries),
// then Z on J. draw_sample() consumes the stream exactly like draw_sparse().
HardDraw draw_sparse(const HardInstanceSpec& spec, RngStream& rng);
HardSample draw_sample(const HardInstanceSpec& spec, RngStream& rng);

// Uniform 2n-subset via a partial Fisher-Yates shuffle of [m], tracking only
// displaced entries so memory is O(k) rather than O(m).
std::vector<std::size_t> sample_subset(std::size_t m, std::size_t k, RngStream& rng);

struct SeparationDistances {
  double dist1 = 0.0;
  double dist_inf = 0.0;
};

// Closed-form minima over pairs for the axis family; +inf when M = 1.
// Custom families throw UnsupportedGeometry.
SeparationDistances separation_distances(const HardInstanceSpec& spec);

// Sampled check for any family: minimum over `pairs` random pairs of
// distinct points of the l_inf distance between random members of the two
// balls. Never below the true distance.
double sampled_linf_separation(const HardInstanceSpec& spec, std::size_t pairs, RngStream& rng);

struct ProbabilityEstimate {
  double estimate = 0.0;
  double halfwidth = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

ProbabilityEstimate make_probability(std::uint64_t hits, std::uint64_t trials);

// Monte Carlo estimate of P(||W||_1 > r0 / sigma) with a Wilson 99% interval.
ProbabilityEstimate estimate_truncation_delta(const HardInstanceSpec& spec, std::uint64_t trials,
                                              const RngStream& rng, unsigned threads = 0);

enum class ErrorNorm { l2, linf };
double error_norm(const DenseVector& a, const DenseVector& b, ErrorNorm q);

struct ErrorEstimate {
  double estimate = 0.0;
  double halfwidth = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t truncated = 0;
  std::size_t max_measurements = 0;
};

using AlgorithmFactory = std::function<std::unique_ptr<Algorithm>()>;

struct MuErrorOptions {
  std::size_t budget = 0;
  // When set, the algorithm also receives the disturbance support J.
  bool provide_subset = false;
  unsigned threads = 0;
};

// E[ ||A(X) - X||_q * 1{truncated} ] over draws of the hard instance; samples
// outside the truncation event count as 0.
ErrorEstimate mu_average_error(const HardInstanceSpec& spec, const AlgorithmFactory& make_alg,
                               ErrorNorm q, std::uint64_t trials, const RngStream& rng,
                               const MuErrorOptions& options);

}  // namespace seqgap
