#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "seqgap/hard_instance.hpp"
#include "seqgap/info_protocol.hpp"
#include "seqgap/linalg.hpp"
#include "seqgap/rng.hpp"

namespace seqgap {

// Multiplier c1 on the measurement count in measurement_budget(), and the
// number of measurement pairs per search round. Both were calibrated by
// Monte Carlo at m = 2^14, k = 4, eps = 1/2 on power-law inputs.
inline constexpr double kBudgetScale = 2.7;
inline constexpr std::size_t kDefaultVotes = 5;

struct RecoveryConfig {
  std::size_t k = 1;
  double eps = 0.5;
  // Cap on position-regression rounds per candidate set; 0 picks
  // default_rounds(s) for a set of size s.
  std::size_t rounds_per_candidate = 0;
  // Measurement pairs per round.
  std::size_t votes_per_round = kDefaultVotes;
  // K; 0 picks ceil(k / eps).
  std::size_t num_candidate_sets = 0;
  // Width of the kept position window in estimated standard errors.
  double window_sigmas = 5.0;
  // Stage-1 passes; 0 repeats until the budget runs out.
  std::size_t max_passes = 0;

  std::size_t candidate_sets() const;
  void validate() const;
};

// max(2, ceil(log2 log2 s)).
std::size_t default_rounds(std::size_t set_size);

// ceil(c1 * ceil((k/eps) * R * votes)) + K with R = ceil(log2 log2(m eps/k + 4)) + 2.
std::size_t measurement_budget(std::size_t m, std::size_t k, double eps,
                               std::size_t votes_per_round = kDefaultVotes);

struct OneSparseResult {
  std::optional<std::size_t> index;
  std::size_t rounds = 0;
  std::size_t measurements = 0;
};

// Locates a single dominant coordinate of x inside `candidates` using at most
// `max_measurements` adaptive queries. Each round assigns the surviving
// candidates distinct random positions p_j in [0, 1), measures `votes`
// Gaussian pairs u = <g, x_S>, w = <g p, x_S>, estimates p* by the
// least-squares slope of w on u, and keeps the candidates whose position is
// within window_sigmas standard errors of the slope. All decisions compare
// ratios of measured values, so scaling x leaves them unchanged.
OneSparseResult adaptive_one_sparse(InformationSession& session,
                                    const std::vector<std::size_t>& candidates,
                                    const RecoveryConfig& config, std::size_t max_measurements,
                                    RngStream& rng);

struct KSparseResult {
  DenseVector output;
  std::vector<std::size_t> found;  // the index set read out exactly
  std::size_t measurements = 0;
};

// Stage 1 splits a random permutation of the unresolved indices into K
// near-equal candidate sets; stage 2 searches each set for its dominant
// coordinate and reads every found index with e_j. Budget left over when the
// searches converge early funds further passes over the indices not yet
// found. The output is x on the found set and 0 elsewhere.
KSparseResult adaptive_k_sparse_recover(InformationSession& session, const RecoveryConfig& config,
                                        RngStream& rng);

class AdaptiveKSparse final : public DirectAlgorithm {
 public:
  explicit AdaptiveKSparse(RecoveryConfig config) : config_(config) { config_.validate(); }
  std::string name() const override { return "adaptive-ksparse"; }
  InfoMode mode() const override { return InfoMode::adaptive; }
  DenseVector run(InformationSession& session, RngStream& rng) override;

 private:
  RecoveryConfig config_;
};

// Non-adaptive decoders. Each registers the rows of a measurement matrix
// (fixed at construction, or a fresh n x m standard Gaussian drawn from the
// run's stream when none is given) and decodes after the reveal.
enum class LinearDecoder { gaussian_linear, l1min, greedy };

class SketchDecoder final : public Algorithm {
 public:
  SketchDecoder(LinearDecoder decoder, std::size_t rows,
                std::shared_ptr<const DenseMatrix> fixed_matrix = nullptr,
                std::size_t greedy_sparsity = 0);
  std::string name() const override;
  InfoMode mode() const override { return InfoMode::nonadaptive; }
  void begin(const ProblemInfo& info, RngStream& rng) override;
  Action next_action(const std::vector<LedgerEntry>& history, RngStream& rng) override;

 private:
  LinearDecoder decoder_;
  std::size_t rows_;
  std::shared_ptr<const DenseMatrix> fixed_;
  std::shared_ptr<const DenseMatrix> matrix_;
  std::size_t greedy_sparsity_;
};

struct L1Result {
  DenseVector z;
  bool converged = false;
  std::size_t iterations = 0;
};

inline constexpr double kL1Tolerance = 1e-6;
inline constexpr std::size_t kL1MaxIterations = 100000;

// argmin ||z||_1 subject to N z = y by ADMM. Throws Infeasible when y is
// farther than 1e-8 (1 + ||y||) from the range of N. A run that hits the
// iteration cap returns its last feasible iterate with converged = false.
L1Result l1_min_decode(const DenseMatrix& measurement, const DenseVector& y,
                       double tolerance = kL1Tolerance, std::size_t max_iterations = kL1MaxIterations);

// Orthogonal matching pursuit with at most `max_sparsity` atoms.
DenseVector greedy_decode(const DenseMatrix& measurement, const DenseVector& y,
                          std::size_t max_sparsity);

// (1/n) N^T y.
DenseVector linear_decode(const DenseMatrix& measurement, const DenseVector& y);

enum class KTermNorm { l1, l2, linf };
// ||x - x_k||_q with x_k keeping the k largest magnitudes (smaller index wins ties).
double best_k_term_error(const DenseVector& x, std::size_t k, KTermNorm q);
std::vector<std::size_t> top_k_indices(const DenseVector& x, std::size_t k);

}  // namespace seqgap
