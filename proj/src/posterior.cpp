#include "seqgap/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "seqgap/errors.hpp"
#include "seqgap/gaussian.hpp"
#include "seqgap/parallel.hpp"
#include "seqgap/simd.hpp"

namespace seqgap {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::size_t PosteriorVector::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

double PosteriorVector::max_prob() const { return probs.empty() ? 0.0 : probs[argmax()]; }

PosteriorVector normalize_log_weights(std::vector<double> log_weights) {
  if (log_weights.empty()) throw InvalidDimensions("posterior over zero components");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == kNegInf) throw InconsistentObservation("observation off the support of every component");
  for (double w : log_weights)
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
      throw NonFiniteValue("log-weight");
  const double total = simd::sum_exp_shifted(log_weights, top);
  PosteriorVector p;
  p.probs.resize(log_weights.size());
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double t = log_weights[i] - top;
    p.probs[i] = t < -708.0 ? 0.0 : std::exp(t) / total;
  }
  p.log_weights = std::move(log_weights);
  return p;
}

GaussianMixtureModel::GaussianMixtureModel(std::shared_ptr<const DenseMatrix> centers,
                                           const DenseMatrix& covariance)
    : centers_(std::move(centers)), covariance_(covariance) {
  const std::size_t n = centers_->rows();
  if (n == 0) throw InvalidDimensions("mixture needs dimension >= 1");
  if (centers_->cols() == 0) throw InvalidDimensions("mixture needs at least one component");
  if (covariance_.rows() != n || covariance_.cols() != n)
    throw DimensionMismatch("covariance must be n x n with n the center dimension");
  if (!covariance_.is_symmetric(1e-10 * std::max(1.0, covariance_.max_abs())))
    throw NotSymmetric("mixture covariance");

  const auto eig = symmetric_eigen(covariance_);
  const double top = std::max(0.0, eig.values.back());
  if (eig.values.front() < -1e-10 * std::max(top, -eig.values.front()))
    throw IndefiniteMatrix("mixture covariance has a negative eigenvalue");

  // Kept directions (largest eigenvalues) first.
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = n - 1 - k;
  basis_ = eig.vectors.select_cols(order);
  while (rank_ < n && top > 0.0 && eig.values[order[rank_]] > kRankCut * top) ++rank_;
  inv_sqrt_eig_.resize(rank_);
  for (std::size_t k = 0; k < rank_; ++k) inv_sqrt_eig_[k] = 1.0 / std::sqrt(eig.values[order[k]]);

  const std::size_t count = centers_->cols();
  projected_centers_ = DenseMatrix(count, n);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) acc += basis_(r, k) * (*centers_)(r, i);
      projected_centers_(i, k) = k < rank_ ? acc * inv_sqrt_eig_[k] : acc;
    }
}

std::vector<double> GaussianMixtureModel::log_weights(const DenseVector& y) const {
  const std::size_t n = dim();
  if (y.size() != n) throw DimensionMismatch("observation dimension != mixture dimension");
  std::vector<double> proj(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) acc += basis_(r, k) * y[r];
    proj[k] = k < rank_ ? acc * inv_sqrt_eig_[k] : acc;
  }
  const double tol = kOffSupportTolerance * (1.0 + y.norm2());
  const double tol_sq = tol * tol;
  std::vector<double> lw(num_components());
  for (std::size_t i = 0; i < lw.size(); ++i) {
    const auto c = projected_centers_.row(i);
    double off = 0.0;
    for (std::size_t k = rank_; k < n; ++k) {
      const double d = proj[k] - c[k];
      off += d * d;
    }
    if (off > tol_sq) {
      lw[i] = kNegInf;
      continue;
    }
    double q = 0.0;
    for (std::size_t k = 0; k < rank_; ++k) {
      const double d = proj[k] - c[k];
      q += d * d;
    }
    lw[i] = -0.5 * q;
  }
  return lw;
}

PosteriorVector GaussianMixtureModel::posterior(const DenseVector& y) const {
  return normalize_log_weights(log_weights(y));
}

double GaussianMixtureModel::distinctness(const DenseVector& y) const {
  const auto lw = log_weights(y);
  const double top = *std::max_element(lw.begin(), lw.end());
  if (top == kNegInf) throw InconsistentObservation("observation off the support of every component");
  return 1.0 / simd::sum_exp_shifted(lw, top);
}

std::size_t GaussianMixtureModel::map_index(const DenseVector& y) const {
  const auto lw = log_weights(y);
  std::size_t best = 0;
  for (std::size_t i = 1; i < lw.size(); ++i)
    if (lw[i] > lw[best]) best = i;
  if (lw[best] == kNegInf) throw InconsistentObservation("observation off the support of every component");
  return best;
}

PosteriorVector posterior(const GaussianMixtureModel& model, const DenseVector& y) {
  return model.posterior(y);
}

DenseMatrix mixture_centers(const HardInstanceSpec& spec, const DenseMatrix& measurement) {
  if (measurement.cols() != spec.m) throw DimensionMismatch("measurement matrix must have m columns");
  DenseMatrix centers(measurement.rows(), spec.num_points);
  for (std::size_t i = 0; i < spec.num_points; ++i)
    for (const auto& [j, v] : spec.point_entries(i))
      for (std::size_t r = 0; r < measurement.rows(); ++r) centers(r, i) += v * measurement(r, j);
  return centers;
}

DenseMatrix conditioned_covariance(const HardInstanceSpec& spec, const DenseMatrix& measurement,
                                   const std::vector<std::size_t>& subset_j) {
  if (measurement.cols() != spec.m) throw DimensionMismatch("measurement matrix must have m columns");
  const std::size_t n = measurement.rows();
  DenseMatrix cov(n, n);
  const double s2 = spec.sigma * spec.sigma;
  for (std::size_t j : subset_j) {
    if (j >= spec.m) throw DimensionMismatch("subset index out of range");
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) cov(a, b) += measurement(a, j) * measurement(b, j);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) cov(a, b) *= s2;
  return cov;
}

GaussianMixtureModel conditioned_mixture(const HardInstanceSpec& spec,
                                         const DenseMatrix& measurement,
                                         const std::vector<std::size_t>& subset_j) {
  return GaussianMixtureModel(mixture_centers(spec, measurement),
                              conditioned_covariance(spec, measurement, subset_j));
}

DenseVector observe(const HardInstanceSpec& spec, const DenseMatrix& measurement,
                    const HardDraw& draw) {
  const std::size_t n = measurement.rows();
  DenseVector y(n);
  for (const auto& [j, v] : spec.point_entries(draw.index_i))
    for (std::size_t r = 0; r < n; ++r) y[r] += v * measurement(r, j);
  for (std::size_t k = 0; k < draw.subset_j.size(); ++k) {
    const double w = spec.sigma * draw.z_on_j[k];
    for (std::size_t r = 0; r < n; ++r) y[r] += w * measurement(r, draw.subset_j[k]);
  }
  return y;
}

DistinctnessRun distinctness_probability(const HardInstanceSpec& spec,
                                         const DenseMatrix& measurement, double threshold,
                                         std::uint64_t trials, const RngStream& rng,
                                         unsigned threads) {
  auto centers = std::make_shared<const DenseMatrix>(mixture_centers(spec, measurement));
  struct Counts {
    std::uint64_t small_d = 0;
    std::uint64_t untruncated = 0;
  };
  constexpr std::size_t kChunk = 256;
  const auto parts = parallel_chunks<Counts>(
      trials, kChunk, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        Counts c;
        for (std::size_t t = begin; t < end; ++t) {
          RngStream trial = rng.split(t);
          const HardDraw d = draw_sparse(spec, trial);
          if (!d.truncated_flag) ++c.untruncated;
          const GaussianMixtureModel model(
              centers, conditioned_covariance(spec, measurement, d.subset_j));
          if (model.distinctness(observe(spec, measurement, d)) <= threshold) ++c.small_d;
        }
        return c;
      });
  Counts total;
  for (const auto& p : parts) {
    total.small_d += p.small_d;
    total.untruncated += p.untruncated;
  }
  return {make_probability(total.small_d, trials), make_probability(total.untruncated, trials)};
}

ProbabilityEstimate mixture_distinctness_probability(const GaussianMixtureModel& model,
                                                     double threshold, std::uint64_t trials,
                                                     const RngStream& rng, unsigned threads) {
  const DenseMatrix root = psd_sqrt(model.covariance());
  const std::size_t n = model.dim();
  constexpr std::size_t kChunk = 256;
  const auto parts = parallel_chunks<std::uint64_t>(
      trials, kChunk, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::uint64_t hits = 0;
        for (std::size_t t = begin; t < end; ++t) {
          RngStream trial = rng.split(t);
          const std::size_t i = trial.below(model.num_components());
          DenseVector y = root * sample_std_gaussian(n, trial);
          for (std::size_t r = 0; r < n; ++r) y[r] += model.centers()(r, i);
          if (model.distinctness(y) <= threshold) ++hits;
        }
        return hits;
      });
  std::uint64_t hits = 0;
  for (auto h : parts) hits += h;
  return make_probability(hits, trials);
}

double certificate_value(double c, double prob, double delta) {
  return std::max(0.0, c * (0.5 * prob - delta));
}

Certificate lower_bound_certificate(const HardInstanceSpec& spec, const DenseMatrix& measurement,
                                    std::uint64_t trials, const RngStream& rng, unsigned threads) {
  const auto run = distinctness_probability(spec, measurement, 0.5, trials, rng, threads);
  Certificate cert;
  cert.prob = run.prob;
  cert.delta = run.delta;
  cert.c = spec.separation_c;
  cert.bound = certificate_value(cert.c, run.prob.lower, run.delta.upper);
  return cert;
}

BayesModeDecoder::BayesModeDecoder(std::shared_ptr<const HardInstanceSpec> spec,
                                   std::shared_ptr<const DenseMatrix> measurement)
    : spec_(std::move(spec)),
      measurement_(std::move(measurement)),
      centers_(std::make_shared<const DenseMatrix>(mixture_centers(*spec_, *measurement_))) {}

namespace {

// Shared by the two MAP decoders: register the rows, reveal, collect y.
std::optional<Action> measure_rows(const DenseMatrix& n, const std::vector<LedgerEntry>& history,
                                   DenseVector& y) {
  if (history.empty()) {
    action::Register reg;
    for (std::size_t r = 0; r < n.rows(); ++r)
      reg.functionals.emplace_back(DenseVector(std::vector<double>(n.row(r).begin(), n.row(r).end())));
    if (reg.functionals.empty()) return std::nullopt;
    return reg;
  }
  if (!history.front().value) return action::Reveal{};
  y = DenseVector(history.size());
  for (std::size_t r = 0; r < history.size(); ++r) y[r] = *history[r].value;
  return std::nullopt;
}

}  // namespace

Action BayesModeDecoder::next_action(const std::vector<LedgerEntry>& history, RngStream&) {
  DenseVector y;
  if (auto a = measure_rows(*measurement_, history, y)) return std::move(*a);
  if (!info_.side.subset)
    throw ProtocolViolation("bayes-mode decoder needs the disturbance subset as side information");
  const GaussianMixtureModel model(centers_,
                                   conditioned_covariance(*spec_, *measurement_, *info_.side.subset));
  return action::Finish{spec_->point(model.map_index(y))};
}

AlgorithmFactory bayes_mode_decoder(const HardInstanceSpec& spec, const DenseMatrix& measurement) {
  auto s = std::make_shared<const HardInstanceSpec>(spec);
  auto n = std::make_shared<const DenseMatrix>(measurement);
  auto proto = std::make_shared<const BayesModeDecoder>(s, n);
  return [proto] { return std::make_unique<BayesModeDecoder>(*proto); };
}

MarginalModeDecoder::MarginalModeDecoder(std::shared_ptr<const HardInstanceSpec> spec,
                                         std::shared_ptr<const DenseMatrix> measurement)
    : spec_(std::move(spec)), measurement_(std::move(measurement)) {
  const std::size_t m = spec_->m, k = spec_->subset_size();
  // Enumerate k-subsets of [m] in lexicographic order.
  std::vector<std::size_t> subset(k);
  for (std::size_t t = 0; t < k; ++t) subset[t] = t;
  const std::size_t kMaxSubsets = 100000;
  while (true) {
    if (inverse_covariances_.size() >= kMaxSubsets)
      throw DomainError("too many subsets for the marginal decoder");
    const DenseMatrix cov = conditioned_covariance(*spec_, *measurement_, subset);
    const auto eig = symmetric_eigen(cov);
    const double top = eig.values.empty() ? 0.0 : eig.values.back();
    if (eig.values.empty() || !(eig.values.front() > 1e-12 * top) || top <= 0.0)
      throw DomainError("marginal decoder needs nonsingular conditioned covariances");
    const std::size_t n = cov.rows();
    DenseMatrix inv(n, n);
    double logdet = 0.0;
    for (std::size_t e = 0; e < n; ++e) logdet += std::log(eig.values[e]);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        double acc = 0.0;
        for (std::size_t e = 0; e < n; ++e)
          acc += eig.vectors(a, e) * eig.vectors(b, e) / eig.values[e];
        inv(a, b) = acc;
      }
    inverse_covariances_.push_back(std::move(inv));
    log_dets_.push_back(logdet);

    std::size_t pos = k;
    while (pos > 0 && subset[pos - 1] == m - k + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t t = pos; t < k; ++t) subset[t] = subset[t - 1] + 1;
  }
  centers_ = mixture_centers(*spec_, *measurement_);
}

std::vector<double> MarginalModeDecoder::log_likelihoods(const DenseVector& y) const {
  const std::size_t n = centers_.rows();
  if (y.size() != n) throw DimensionMismatch("observation dimension");
  std::vector<double> out(centers_.cols());
  std::vector<double> terms(inverse_covariances_.size());
  std::vector<double> d(n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t r = 0; r < n; ++r) d[r] = y[r] - centers_(r, i);
    for (std::size_t s = 0; s < terms.size(); ++s) {
      const DenseMatrix& inv = inverse_covariances_[s];
      double q = 0.0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) q += d[a] * inv(a, b) * d[b];
      terms[s] = -0.5 * q - 0.5 * log_dets_[s];
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    out[i] = top + std::log(simd::sum_exp_shifted(terms, top));
  }
  return out;
}

Action MarginalModeDecoder::next_action(const std::vector<LedgerEntry>& history, RngStream&) {
  DenseVector y;
  if (auto a = measure_rows(*measurement_, history, y)) return std::move(*a);
  const auto ll = log_likelihoods(y);
  std::size_t best = 0;
  for (std::size_t i = 1; i < ll.size(); ++i)
    if (ll[i] > ll[best]) best = i;
  return action::Finish{spec_->point(best)};
}

double component_separation(const DiscreteInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < inst.atoms.size(); ++a)
    for (std::size_t b = a + 1; b < inst.atoms.size(); ++b)
      if (inst.atoms[a].component != inst.atoms[b].component)
        best = std::min(best, simd::max_abs_diff(inst.atoms[a].point, inst.atoms[b].point));
  return best;
}

double conditional_average_bound(const DiscreteInstance& inst, double c) {
  std::vector<double> t(inst.num_components, 0.0);
  double total = 0.0;
  for (const auto& a : inst.atoms) {
    if (a.component >= inst.num_components) throw DimensionMismatch("atom component out of range");
    if (!a.in_event) continue;
    total += a.prob;
    t[a.component] += a.prob;
  }
  const double tmax = t.empty() ? 0.0 : *std::max_element(t.begin(), t.end());
  return c * std::min(total / 2.0, total - tmax);
}

double expected_event_error(const DiscreteInstance& inst, const DenseVector& g) {
  double e = 0.0;
  for (const auto& a : inst.atoms)
    if (a.in_event) e += a.prob * simd::max_abs_diff(a.point, g);
  return e;
}

std::vector<std::vector<std::size_t>> information_groups(const DiscreteInstance& inst,
                                                         const DenseMatrix& measurement) {
  std::map<std::vector<double>, std::vector<std::size_t>> groups;
  for (std::size_t a = 0; a < inst.atoms.size(); ++a) {
    const DenseVector y = measurement * inst.atoms[a].point;
    groups[y.values()].push_back(a);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& [key, members] : groups) out.push_back(std::move(members));
  return out;
}

double discrete_certificate(const DiscreteInstance& inst, const DenseMatrix& measurement,
                            double c) {
  double small_d = 0.0, delta = 0.0;
  for (const auto& a : inst.atoms)
    if (!a.in_event) delta += a.prob;
  for (const auto& group : information_groups(inst, measurement)) {
    std::vector<double> t(inst.num_components, 0.0);
    double mass = 0.0;
    for (std::size_t a : group) {
      t[inst.atoms[a].component] += inst.atoms[a].prob;
      mass += inst.atoms[a].prob;
    }
    if (mass <= 0.0) continue;
    const double d = *std::max_element(t.begin(), t.end()) / mass;
    if (d <= 0.5) small_d += mass;
  }
  return certificate_value(c, small_d, delta);
}

}  // namespace seqgap
