#include "seqgap/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqgap/errors.hpp"
#include "seqgap/parallel.hpp"
#include "seqgap/simd.hpp"
#include "seqgap/stats.hpp"

namespace seqgap {

DenseVector sample_std_gaussian(std::size_t dim, RngStream& rng) {
  if (dim == 0) throw InvalidDimensions("Gaussian vector needs dim >= 1");
  DenseVector z(dim);
  for (std::size_t i = 0; i < dim; ++i) z[i] = rng.gaussian();
  return z;
}

DenseMatrix psd_sqrt(const DenseMatrix& sigma) {
  if (sigma.rows() != sigma.cols()) throw DimensionMismatch("psd_sqrt needs a square matrix");
  const std::size_t n = sigma.rows();
  const double scale = sigma.max_abs();
  if (!sigma.is_symmetric(1e-10 * std::max(1.0, scale)))
    throw NotSymmetric("asymmetry exceeds 1e-10");
  const auto eig = symmetric_eigen(sigma);
  const double norm = std::max(std::fabs(eig.values.empty() ? 0.0 : eig.values.front()),
                               std::fabs(eig.values.empty() ? 0.0 : eig.values.back()));
  std::vector<double> root(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (lambda < -1e-10 * norm)
      throw IndefiniteMatrix("eigenvalue " + std::to_string(lambda) + " below -1e-10*||sigma||");
    root[k] = std::sqrt(std::max(lambda, 0.0));
  }
  const DenseMatrix& q = eig.vectors;
  DenseMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += q(i, k) * root[k] * q(j, k);
      s(i, j) = acc;
      s(j, i) = acc;
    }
  return s;
}

Ellipsoid::Ellipsoid(DenseMatrix factor, double rank_tolerance)
    : factor_(std::move(factor)), rank_tolerance_(rank_tolerance) {
  if (!(rank_tolerance_ >= 0.0)) throw DomainError("rank_tolerance must be >= 0");
  if (factor_.rows() == 0) throw InvalidDimensions("ellipsoid needs ambient dimension >= 1");
  if (factor_.cols() == 0) return;
  auto svd = thin_svd(factor_);
  const double smax = svd.singular_values.empty() ? 0.0 : svd.singular_values.front();
  const double cut = smax * std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(factor_.rows(), factor_.cols()));
  while (rank_ < svd.singular_values.size() && svd.singular_values[rank_] > cut &&
         svd.singular_values[rank_] > 0.0)
    ++rank_;
  std::vector<std::size_t> keep(rank_);
  for (std::size_t k = 0; k < rank_; ++k) keep[k] = k;
  u_ = svd.u.select_cols(keep);
  v_ = svd.v.select_cols(keep);
  inv_s_.resize(rank_);
  for (std::size_t k = 0; k < rank_; ++k) inv_s_[k] = 1.0 / svd.singular_values[k];
}

Ellipsoid Ellipsoid::from_covariance(const DenseMatrix& sigma, double rank_tolerance) {
  return Ellipsoid(psd_sqrt(sigma), rank_tolerance);
}

DenseVector Ellipsoid::preimage(const DenseVector& x) const {
  if (x.size() != ambient_dim()) throw DimensionMismatch("point dimension != ellipsoid dimension");
  DenseVector z(factor_.cols());
  if (rank_ == 0) return z;
  const DenseVector coeff = transpose_times(u_, x);
  DenseVector scaled(rank_);
  for (std::size_t k = 0; k < rank_; ++k) scaled[k] = coeff[k] * inv_s_[k];
  return v_ * scaled;
}

double Ellipsoid::gauge(const DenseVector& x) const {
  const DenseVector z = preimage(x);
  const double residual = std::sqrt(simd::sum_sq_diff(factor_ * z, x));
  if (residual > rank_tolerance_ * (1.0 + x.norm2())) return std::numeric_limits<double>::infinity();
  return z.norm2();
}

bool Ellipsoid::contains(const DenseVector& x, double radius) const {
  if (!(radius >= 0.0)) throw DomainError("radius must be >= 0");
  return gauge(x) <= radius * (1.0 + rank_tolerance_);
}

bool ellipsoid_membership(const Ellipsoid& e, const DenseVector& x, double radius) {
  return e.contains(x, radius);
}

TailCheck tail_bound_check(std::size_t dim, NormKind kind, std::uint64_t trials,
                           const RngStream& rng, unsigned threads) {
  if (dim == 0) throw InvalidDimensions("tail check needs dim >= 1");
  const double d = static_cast<double>(dim);
  const double threshold = kind == NormKind::l2 ? 9.0 * d : 3.0 * d;
  constexpr std::size_t kChunk = 1 << 14;
  const auto counts = parallel_chunks<std::uint64_t>(
      trials, kChunk, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        RngStream local = rng.split(chunk);
        std::vector<double> z(dim);
        std::uint64_t hits = 0;
        for (std::size_t t = begin; t < end; ++t) {
          for (auto& v : z) v = local.gaussian();
          // squared l2 norm against 9 dim avoids the square root
          const double stat = kind == NormKind::l2 ? simd::sum_sq(z) : simd::sum_abs(z);
          if (stat > threshold) ++hits;
        }
        return hits;
      });
  TailCheck out;
  for (auto c : counts) out.hits += c;
  out.trials = trials;
  out.empirical = trials ? static_cast<double>(out.hits) / static_cast<double>(trials) : 0.0;
  out.bound = std::exp(-2.0 * d);
  out.halfwidth = wilson_interval(out.hits, trials).halfwidth();
  return out;
}

}  // namespace seqgap
