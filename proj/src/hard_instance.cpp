#include "seqgap/hard_instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "seqgap/errors.hpp"
#include "seqgap/parallel.hpp"
#include "seqgap/simd.hpp"

namespace seqgap {
namespace {

constexpr double kGeometrySlack = 1e-12;

}  // namespace

double SparsePoint::norm1() const {
  double s = 0.0;
  for (const auto& [j, v] : entries) s += std::fabs(v);
  return s;
}

std::vector<std::pair<std::size_t, double>> HardInstanceSpec::point_entries(std::size_t i) const {
  if (i >= num_points) throw DimensionMismatch("point index out of range");
  if (axis_points()) return {{i, axis_amplitude}};
  return custom_points[i].entries;
}

DenseVector HardInstanceSpec::point(std::size_t i) const {
  DenseVector u(m);
  for (const auto& [j, v] : point_entries(i)) u[j] = v;
  return u;
}

double linf_distance_l1_balls(const SparsePoint& a, const SparsePoint& b, double r) {
  std::map<std::size_t, double> diff;
  for (const auto& [j, v] : a.entries) diff[j] += v;
  for (const auto& [j, v] : b.entries) diff[j] -= v;
  std::vector<double> mags;
  for (const auto& [j, v] : diff) mags.push_back(std::fabs(v));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  // Shave the largest magnitudes down to a common level t using l1 mass 2r.
  double budget = 2.0 * r;
  double prefix = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    prefix += mags[k];
    const double next = k + 1 < mags.size() ? mags[k + 1] : 0.0;
    const double cost_to_next = prefix - static_cast<double>(k + 1) * next;
    if (cost_to_next >= budget) return (prefix - budget) / static_cast<double>(k + 1);
  }
  return 0.0;
}

void HardInstanceSpec::validate() const {
  if (n == 0) throw InvalidDimensions("n must be >= 1");
  if (2 * n >= m)
    throw InvalidDimensions("need 2n < m, got n=" + std::to_string(n) + ", m=" + std::to_string(m));
  if (!(std::isfinite(sigma) && sigma >= 0.0)) throw InvalidGeometry("sigma must be finite and >= 0");
  if (!(std::isfinite(r0) && r0 >= 0.0)) throw InvalidGeometry("r0 must be finite and >= 0");
  if (!(std::isfinite(separation_c) && separation_c >= 0.0))
    throw InvalidGeometry("separation_c must be finite and >= 0");
  if (axis_points()) {
    if (num_points != m) throw InvalidGeometry("axis family requires M = m");
    if (std::fabs(axis_amplitude) + r0 > 1.0 + kGeometrySlack)
      throw InvalidGeometry("ball u_i + r0 B_1 escapes the unit ball");
    if (num_points > 1 && std::fabs(axis_amplitude) - r0 < separation_c - kGeometrySlack)
      throw InvalidGeometry("axis family violates the l_inf separation");
    return;
  }
  if (num_points != custom_points.size()) throw InvalidGeometry("M differs from the point count");
  for (const auto& p : custom_points) {
    for (std::size_t k = 0; k < p.entries.size(); ++k) {
      if (p.entries[k].first >= m) throw InvalidGeometry("point coordinate out of range");
      if (!std::isfinite(p.entries[k].second)) throw InvalidGeometry("non-finite point entry");
      for (std::size_t l = 0; l < k; ++l)
        if (p.entries[l].first == p.entries[k].first)
          throw InvalidGeometry("repeated coordinate in point");
    }
    if (p.norm1() + r0 > 1.0 + kGeometrySlack)
      throw InvalidGeometry("ball u_i + r0 B_1 escapes the unit ball");
  }
  for (std::size_t i = 0; i < custom_points.size(); ++i)
    for (std::size_t k = i + 1; k < custom_points.size(); ++k)
      if (linf_distance_l1_balls(custom_points[i], custom_points[k], r0) <
          separation_c - kGeometrySlack)
        throw InvalidGeometry("points " + std::to_string(i) + " and " + std::to_string(k) +
                              " violate the l_inf separation");
}

double points_radius(std::size_t n) {
  return 12.0 * static_cast<double>(n) * std::ldexp(1.0, static_cast<int>(n));
}

std::size_t coupling_threshold(std::size_t n) {
  if (n == 0) throw DomainError("coupling_threshold needs n >= 1");
  const double base = points_radius(n) + 3.0 * std::sqrt(static_cast<double>(n));
  return static_cast<std::size_t>(
      std::ceil(kPointsConstant * std::pow(base, static_cast<double>(n))));
}

HardInstanceSpec build_spec(std::size_t m, std::size_t n) {
  if (n == 0 || 2 * n >= m) throw InvalidDimensions("need n >= 1 and 2n < m");
  return make_spec(m, n, 1.0 / (18.0 * static_cast<double>(n)), 1.0 / 3.0, 1.0 / 3.0);
}

HardInstanceSpec make_spec(std::size_t m, std::size_t n, double sigma, double r0,
                           double separation_c, std::vector<SparsePoint> points) {
  HardInstanceSpec spec;
  spec.m = m;
  spec.n = n;
  spec.sigma = sigma;
  spec.r0 = r0;
  spec.separation_c = separation_c;
  spec.num_points = points.empty() ? m : points.size();
  spec.custom_points = std::move(points);
  spec.validate();
  return spec;
}

std::vector<std::size_t> sample_subset(std::size_t m, std::size_t k, RngStream& rng) {
  if (k > m) throw InvalidDimensions("subset larger than ground set");
  std::unordered_map<std::size_t, std::size_t> displaced;
  auto at = [&](std::size_t p) {
    auto it = displaced.find(p);
    return it == displaced.end() ? p : it->second;
  };
  std::vector<std::size_t> out(k);
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t r = s + static_cast<std::size_t>(rng.below(m - s));
    const std::size_t vs = at(s), vr = at(r);
    out[s] = vr;
    displaced[r] = vs;
    displaced[s] = vr;
  }
  return out;
}

HardDraw draw_sparse(const HardInstanceSpec& spec, RngStream& rng) {
  HardDraw d;
  d.index_i = static_cast<std::size_t>(rng.below(spec.num_points));
  d.subset_j = sample_subset(spec.m, spec.subset_size(), rng);
  d.z_on_j.resize(d.subset_j.size());
  double w1 = 0.0;
  for (auto& z : d.z_on_j) {
    z = rng.gaussian();
    w1 += std::fabs(z);
  }
  d.truncated_flag = w1 <= spec.r0 / spec.sigma;
  return d;
}

HardSample draw_sample(const HardInstanceSpec& spec, RngStream& rng) {
  HardDraw d = draw_sparse(spec, rng);
  HardSample s;
  s.index_i = d.index_i;
  s.truncated_flag = d.truncated_flag;
  s.disturbance_w = DenseVector(spec.m);
  for (std::size_t k = 0; k < d.subset_j.size(); ++k) s.disturbance_w[d.subset_j[k]] = d.z_on_j[k];
  s.x = DenseVector(spec.m);
  for (const auto& [j, v] : spec.point_entries(s.index_i)) s.x[j] = v;
  for (std::size_t j : d.subset_j) s.x[j] = s.x[j] + spec.sigma * s.disturbance_w[j];
  s.subset_j = std::move(d.subset_j);
  s.z_on_j = std::move(d.z_on_j);
  return s;
}

SeparationDistances separation_distances(const HardInstanceSpec& spec) {
  if (!spec.axis_points())
    throw UnsupportedGeometry("closed form only for the axis family; use sampled_linf_separation");
  if (spec.num_points < 2) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  const double d1 = std::max(0.0, 2.0 * std::fabs(spec.axis_amplitude) - 2.0 * spec.r0);
  return {d1, d1 / 2.0};
}

namespace {

// Uniform point of r * B_1 restricted to `coords` (a random sign times a
// uniform point of the simplex, scaled by r * U^{1/k}).
void add_random_l1_ball_point(std::vector<double>& f, const std::vector<std::size_t>& coords,
                              double r, RngStream& rng) {
  const std::size_t k = coords.size();
  std::vector<double> e(k);
  double total = 0.0;
  for (auto& v : e) {
    v = -std::log(rng.uniform_pos());
    total += v;
  }
  const double radius = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(k));
  for (std::size_t t = 0; t < k; ++t) f[coords[t]] += rng.sign() * radius * e[t] / total;
}

}  // namespace

double sampled_linf_separation(const HardInstanceSpec& spec, std::size_t pairs, RngStream& rng) {
  if (spec.num_points < 2) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t i = static_cast<std::size_t>(rng.below(spec.num_points));
    std::size_t k = static_cast<std::size_t>(rng.below(spec.num_points - 1));
    if (k >= i) ++k;
    const auto ei = spec.point_entries(i);
    const auto ek = spec.point_entries(k);
    // Only coordinates in either support can make the distance small; the
    // perturbations are drawn on that union.
    std::vector<std::size_t> coords;
    for (const auto& [j, v] : ei) coords.push_back(j);
    for (const auto& [j, v] : ek) coords.push_back(j);
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    std::vector<std::size_t> local(coords.size());
    for (std::size_t t = 0; t < coords.size(); ++t) local[t] = t;
    std::vector<double> f(coords.size()), g(coords.size());
    auto pos = [&](std::size_t j) {
      return static_cast<std::size_t>(std::lower_bound(coords.begin(), coords.end(), j) - coords.begin());
    };
    for (const auto& [j, v] : ei) f[pos(j)] = v;
    for (const auto& [j, v] : ek) g[pos(j)] = v;
    add_random_l1_ball_point(f, local, spec.r0, rng);
    add_random_l1_ball_point(g, local, spec.r0, rng);
    best = std::min(best, simd::max_abs_diff(f, g));
  }
  return best;
}

ProbabilityEstimate make_probability(std::uint64_t hits, std::uint64_t trials) {
  const Interval ci = wilson_interval(hits, trials);
  ProbabilityEstimate p;
  p.hits = hits;
  p.trials = trials;
  p.estimate = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  p.lower = ci.lower;
  p.upper = ci.upper;
  p.halfwidth = ci.halfwidth();
  return p;
}

ProbabilityEstimate estimate_truncation_delta(const HardInstanceSpec& spec, std::uint64_t trials,
                                              const RngStream& rng, unsigned threads) {
  // ||W||_1 does not depend on I or J, so only the 2n Gaussians are drawn.
  const double level = spec.r0 / spec.sigma;
  const std::size_t k = spec.subset_size();
  constexpr std::size_t kChunk = 1 << 14;
  const auto counts = parallel_chunks<std::uint64_t>(
      trials, kChunk, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RngStream local = rng.split(chunk);
        std::uint64_t hits = 0;
        for (std::size_t t = begin; t < end; ++t) {
          double w1 = 0.0;
          for (std::size_t j = 0; j < k; ++j) w1 += std::fabs(local.gaussian());
          if (!(w1 <= level)) ++hits;
        }
        return hits;
      });
  std::uint64_t hits = 0;
  for (auto c : counts) hits += c;
  return make_probability(hits, trials);
}

double error_norm(const DenseVector& a, const DenseVector& b, ErrorNorm q) {
  if (a.size() != b.size()) throw DimensionMismatch("error between vectors of different size");
  return q == ErrorNorm::l2 ? std::sqrt(simd::sum_sq_diff(a, b)) : simd::max_abs_diff(a, b);
}

ErrorEstimate mu_average_error(const HardInstanceSpec& spec, const AlgorithmFactory& make_alg,
                               ErrorNorm q, std::uint64_t trials, const RngStream& rng,
                               const MuErrorOptions& options) {
  struct Partial {
    MeanAccumulator acc;
    std::uint64_t truncated = 0;
    std::size_t max_used = 0;
  };
  const InfoMode mode = make_alg()->mode();
  constexpr std::size_t kChunk = 32;
  const auto parts = parallel_chunks<Partial>(
      trials, kChunk, options.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        Partial part;
        for (std::size_t t = begin; t < end; ++t) {
          const RngStream trial = rng.split(t);
          RngStream input_rng = trial.split(0);
          RngStream alg_rng = trial.split(1);
          const HardSample s = draw_sample(spec, input_rng);
          if (!s.truncated_flag) {
            part.acc.add(0.0);
            continue;
          }
          ++part.truncated;
          auto alg = make_alg();
          SideInfo side;
          if (options.provide_subset) side.subset = s.subset_j;
          const RunResult r = run_algorithm(*alg, s.x, options.budget, mode, alg_rng, side);
          part.max_used = std::max(part.max_used, r.measurements_used);
          part.acc.add(error_norm(r.output, s.x, q));
        }
        return part;
      });
  Partial total;
  for (const auto& p : parts) {
    total.acc.merge(p.acc);
    total.truncated += p.truncated;
    total.max_used = std::max(total.max_used, p.max_used);
  }
  return {total.acc.mean(), total.acc.halfwidth(), trials, total.truncated, total.max_used};
}

}  // namespace seqgap
