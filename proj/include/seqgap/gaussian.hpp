#pragma once

#include <cstdint>

#include "seqgap/linalg.hpp"
#include "seqgap/rng.hpp"

namespace seqgap {

DenseVector sample_std_gaussian(std::size_t dim, RngStream& rng);

// Symmetric square root Q sqrt(D) Q^T. Eigenvalues in [-1e-10 ||sigma||, 0)
// are clamped to zero.
DenseMatrix psd_sqrt(const DenseMatrix& sigma);

// E = A(B_2^k) for an n x k factor A, possibly rank deficient.
class Ellipsoid {
 public:
  static constexpr double kDefaultRankTolerance = 1e-8;

  explicit Ellipsoid(DenseMatrix factor, double rank_tolerance = kDefaultRankTolerance);
  // E = sqrt(sigma)(B_2^n).
  static Ellipsoid from_covariance(const DenseMatrix& sigma,
                                   double rank_tolerance = kDefaultRankTolerance);

  const DenseMatrix& factor() const { return factor_; }
  std::size_t ambient_dim() const { return factor_.rows(); }
  double rank_tolerance() const { return rank_tolerance_; }
  std::size_t rank() const { return rank_; }

  // Minimum-norm least-squares preimage z = A^+ x.
  DenseVector preimage(const DenseVector& x) const;
  // Smallest r with x in r*E, or +inf if x is off the range of A (by the
  // rank_tolerance band).
  double gauge(const DenseVector& x) const;
  bool contains(const DenseVector& x, double radius) const;

 private:
  DenseMatrix factor_;
  double rank_tolerance_;
  std::size_t rank_ = 0;
  // Pseudo-inverse pieces: A^+ = V diag(1/s) U^T restricted to the rank.
  DenseMatrix u_;
  std::vector<double> inv_s_;
  DenseMatrix v_;
};

bool ellipsoid_membership(const Ellipsoid& e, const DenseVector& x, double radius);

enum class NormKind { l1, l2 };

struct TailCheck {
  double empirical = 0.0;  // fraction of draws beyond the threshold
  double bound = 0.0;      // e^{-2 dim}
  double halfwidth = 0.0;  // Wilson 99% half-width of `empirical`
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;

  // empirical <= bound + 3 * halfwidth
  bool within_bound() const { return empirical <= bound + 3.0 * halfwidth; }
};

// Monte Carlo estimate of P(||Z||_2 > 3 sqrt(dim)) or P(||Z||_1 > 3 dim).
// Trials are split into fixed chunks with their own sub-streams, so the
// result does not depend on `threads`.
TailCheck tail_bound_check(std::size_t dim, NormKind kind, std::uint64_t trials,
                           const RngStream& rng, unsigned threads = 0);

}  // namespace seqgap
