#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "seqgap/hard_instance.hpp"
#include "seqgap/info_protocol.hpp"
#include "seqgap/linalg.hpp"
#include "seqgap/rng.hpp"

namespace seqgap {

struct PosteriorVector {
  std::vector<double> log_weights;  // unnormalized; -inf for excluded components
  std::vector<double> probs;

  // Index of the largest probability, smallest index on ties.
  std::size_t argmax() const;
  double max_prob() const;
};

// Normalizes log-weights with max subtraction. Throws InconsistentObservation
// if every weight is -inf.
PosteriorVector normalize_log_weights(std::vector<double> log_weights);

// Uniform mixture of N(v_i, covariance) in R^n, centers stored as the columns
// of an n x M matrix. A singular covariance is handled by restricting to its
// eigen-subspace: components whose center disagrees with the observation off
// that subspace get probability 0.
class GaussianMixtureModel {
 public:
  static constexpr double kRankCut = 1e-12;
  static constexpr double kOffSupportTolerance = 1e-8;

  GaussianMixtureModel(std::shared_ptr<const DenseMatrix> centers, const DenseMatrix& covariance);
  GaussianMixtureModel(DenseMatrix centers, const DenseMatrix& covariance)
      : GaussianMixtureModel(std::make_shared<const DenseMatrix>(std::move(centers)), covariance) {}

  std::size_t dim() const { return centers_->rows(); }
  std::size_t num_components() const { return centers_->cols(); }
  const DenseMatrix& centers() const { return *centers_; }
  const DenseMatrix& covariance() const { return covariance_; }
  std::size_t covariance_rank() const { return rank_; }

  // log N(y; v_i, Sigma) up to a constant shared by all components.
  std::vector<double> log_weights(const DenseVector& y) const;
  PosteriorVector posterior(const DenseVector& y) const;
  // D(y) = max_i P(I = i | Y = y).
  double distinctness(const DenseVector& y) const;
  std::size_t map_index(const DenseVector& y) const;

 private:
  std::shared_ptr<const DenseMatrix> centers_;
  DenseMatrix covariance_;
  std::size_t rank_ = 0;
  DenseMatrix basis_;                 // n x n eigenvectors, kept directions first
  std::vector<double> inv_sqrt_eig_;  // for the kept directions
  DenseMatrix projected_centers_;     // n x M, basis^T v_i with whitening on kept rows
};

PosteriorVector posterior(const GaussianMixtureModel& model, const DenseVector& y);

// v_i = N u_i for every point of the spec, as the columns of an n x M matrix.
DenseMatrix mixture_centers(const HardInstanceSpec& spec, const DenseMatrix& measurement);

// sigma^2 N P_J N^T.
DenseMatrix conditioned_covariance(const HardInstanceSpec& spec, const DenseMatrix& measurement,
                                   const std::vector<std::size_t>& subset_j);

GaussianMixtureModel conditioned_mixture(const HardInstanceSpec& spec,
                                         const DenseMatrix& measurement,
                                         const std::vector<std::size_t>& subset_j);

// Y = N x computed from the sparse draw: N u_I + sigma * sum_{j in J} z_j c_j.
DenseVector observe(const HardInstanceSpec& spec, const DenseMatrix& measurement,
                    const HardDraw& draw);

struct DistinctnessRun {
  ProbabilityEstimate prob;   // P(D <= threshold)
  ProbabilityEstimate delta;  // P(not truncated), from the same draws
};

// Monte Carlo over the untruncated hard instance: per trial draw (I, J, Z),
// observe Y = N x, condition on J, and evaluate D.
DistinctnessRun distinctness_probability(const HardInstanceSpec& spec,
                                         const DenseMatrix& measurement, double threshold,
                                         std::uint64_t trials, const RngStream& rng,
                                         unsigned threads = 0);

// P(D(Y) <= threshold) for Y = v_I + G with I uniform over the components and
// G ~ N(0, covariance) of the model.
ProbabilityEstimate mixture_distinctness_probability(const GaussianMixtureModel& model,
                                                     double threshold, std::uint64_t trials,
                                                     const RngStream& rng, unsigned threads = 0);

struct Certificate {
  double bound = 0.0;
  ProbabilityEstimate prob;
  ProbabilityEstimate delta;
  double c = 0.0;
};

// c * (p/2 - delta) clipped at 0.
double certificate_value(double c, double prob, double delta);

// c * (prob_lower/2 - delta_upper) with both Wilson ends chosen conservatively.
Certificate lower_bound_certificate(const HardInstanceSpec& spec, const DenseMatrix& measurement,
                                    std::uint64_t trials, const RngStream& rng,
                                    unsigned threads = 0);

// Registers the rows of N, reads y, and outputs u_i for the MAP index given
// (y, J). Needs the subset as side information.
class BayesModeDecoder final : public Algorithm {
 public:
  BayesModeDecoder(std::shared_ptr<const HardInstanceSpec> spec,
                   std::shared_ptr<const DenseMatrix> measurement);
  std::string name() const override { return "bayes-mode"; }
  InfoMode mode() const override { return InfoMode::nonadaptive; }
  Action next_action(const std::vector<LedgerEntry>& history, RngStream& rng) override;

 private:
  std::shared_ptr<const HardInstanceSpec> spec_;
  std::shared_ptr<const DenseMatrix> measurement_;
  std::shared_ptr<const DenseMatrix> centers_;
};

AlgorithmFactory bayes_mode_decoder(const HardInstanceSpec& spec, const DenseMatrix& measurement);

// MAP decoder from y alone: the posterior averages the mixture over all
// C(m, 2n) subsets, so it is only for small m. Every conditioned covariance
// must be nonsingular.
class MarginalModeDecoder final : public Algorithm {
 public:
  MarginalModeDecoder(std::shared_ptr<const HardInstanceSpec> spec,
                      std::shared_ptr<const DenseMatrix> measurement);
  std::string name() const override { return "marginal-mode"; }
  InfoMode mode() const override { return InfoMode::nonadaptive; }
  Action next_action(const std::vector<LedgerEntry>& history, RngStream& rng) override;

  // log p(y | I = i) up to a shared constant.
  std::vector<double> log_likelihoods(const DenseVector& y) const;

 private:
  std::shared_ptr<const HardInstanceSpec> spec_;
  std::shared_ptr<const DenseMatrix> measurement_;
  std::vector<DenseMatrix> inverse_covariances_;
  std::vector<double> log_dets_;
  DenseMatrix centers_;
};

// Finite instance for the conditional-average bound: atoms x with
// probabilities, component labels and a membership flag for the event.
struct DiscreteAtom {
  DenseVector point;
  double prob = 0.0;
  std::size_t component = 0;
  bool in_event = true;
};

struct DiscreteInstance {
  std::vector<DiscreteAtom> atoms;
  std::size_t num_components = 0;
};

// Smallest l_inf distance between atoms of different components.
double component_separation(const DiscreteInstance& inst);

// c * min{T/2, T - max_i t_i} with T = P(event), t_i = P(event, component i).
double conditional_average_bound(const DiscreteInstance& inst, double c);

// E[ ||X - g||_inf * 1{event} ].
double expected_event_error(const DiscreteInstance& inst, const DenseVector& g);

// Groups atoms by the exact value of N x. For each group, D is the largest
// conditional component probability. Returns c * (P(D <= 1/2)/2 - P(not event)).
double discrete_certificate(const DiscreteInstance& inst, const DenseMatrix& measurement,
                            double c);

// Partition of the atom indices by identical N x.
std::vector<std::vector<std::size_t>> information_groups(const DiscreteInstance& inst,
                                                         const DenseMatrix& measurement);

}  // namespace seqgap
