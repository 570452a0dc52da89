#include "seqgap/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "seqgap/column_geometry.hpp"
#include "seqgap/errors.hpp"
#include "seqgap/simd.hpp"

namespace seqgap {
namespace {

std::vector<std::size_t> random_permutation(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

std::size_t ceil_log2_log2(double x) {
  const double inner = std::log2(std::max(x, 2.0));
  return static_cast<std::size_t>(std::ceil(std::log2(std::max(inner, 1.0))));
}

}  // namespace

std::size_t RecoveryConfig::candidate_sets() const {
  if (num_candidate_sets > 0) return num_candidate_sets;
  return static_cast<std::size_t>(std::ceil(static_cast<double>(k) / eps));
}

void RecoveryConfig::validate() const {
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (votes_per_round < 2) throw DomainError("votes_per_round must be >= 2");
  if (candidate_sets() < k) throw DomainError("need K >= k candidate sets");
  if (!(window_sigmas > 0.0)) throw DomainError("window_sigmas must be positive");
}

std::size_t default_rounds(std::size_t set_size) {
  return std::max<std::size_t>(2, ceil_log2_log2(static_cast<double>(set_size)));
}

std::size_t measurement_budget(std::size_t m, std::size_t k, double eps,
                               std::size_t votes_per_round) {
  if (k < 1 || !(eps > 0.0 && eps < 1.0)) throw DomainError("need k >= 1 and eps in (0, 1)");
  if (m < 16 * k) throw DomainError("measurement budget needs m >= 16k");
  const double ratio = static_cast<double>(k) / eps;
  const double rounds =
      static_cast<double>(ceil_log2_log2(static_cast<double>(m) * eps / static_cast<double>(k) + 4.0) + 2);
  const double searches = std::ceil(ratio * rounds * static_cast<double>(votes_per_round));
  const auto sets = static_cast<std::size_t>(std::ceil(ratio));
  return static_cast<std::size_t>(std::ceil(kBudgetScale * searches)) + sets;
}

OneSparseResult adaptive_one_sparse(InformationSession& session,
                                    const std::vector<std::size_t>& candidates,
                                    const RecoveryConfig& config, std::size_t max_measurements,
                                    RngStream& rng) {
  if (session.mode() != InfoMode::adaptive)
    throw ProtocolViolation("adaptive search needs an adaptive session");
  OneSparseResult result;
  std::vector<std::size_t> set = candidates;
  if (set.empty()) return result;
  if (set.size() == 1) {
    result.index = set.front();
    return result;
  }
  const std::size_t budget = std::min(max_measurements, session.remaining());
  const std::size_t max_rounds =
      config.rounds_per_candidate ? config.rounds_per_candidate : default_rounds(set.size());
  const std::size_t m = session.dim();

  std::vector<double> position;
  double slope = 0.0;
  while (set.size() > 1 && result.rounds < max_rounds) {
    const std::size_t pairs = std::min(config.votes_per_round, (budget - result.measurements) / 2);
    if (pairs < 2) break;
    const std::size_t s = set.size();
    const auto ranks = random_permutation(s, rng);
    position.assign(s, 0.0);
    for (std::size_t t = 0; t < s; ++t)
      position[t] = static_cast<double>(ranks[t]) / static_cast<double>(s);

    std::vector<double> u(pairs), w(pairs), g(s), gp(s);
    for (std::size_t v = 0; v < pairs; ++v) {
      for (std::size_t t = 0; t < s; ++t) {
        g[t] = rng.gaussian();
        gp[t] = g[t] * position[t];
      }
      u[v] = session.query(LinearFunctional::sparse(m, set, g));
      w[v] = session.query(LinearFunctional::sparse(m, set, gp));
      result.measurements += 2;
    }
    ++result.rounds;

    double suu = 0.0, suw = 0.0;
    for (std::size_t v = 0; v < pairs; ++v) {
      suu += u[v] * u[v];
      suw += u[v] * w[v];
    }
    if (suu == 0.0) return {std::nullopt, result.rounds, result.measurements};
    slope = suw / suu;
    double rss = 0.0;
    for (std::size_t v = 0; v < pairs; ++v) {
      const double r = w[v] - slope * u[v];
      rss += r * r;
    }
    const double se = std::sqrt(rss / (static_cast<double>(pairs - 1) * suu));
    const double half = config.window_sigmas * se + 0.5 / static_cast<double>(s);

    std::vector<std::size_t> kept;
    std::vector<double> kept_pos;
    std::size_t nearest = 0;
    for (std::size_t t = 0; t < s; ++t) {
      const double d = std::fabs(position[t] - slope);
      if (d < std::fabs(position[nearest] - slope)) nearest = t;
      if (d <= half) {
        kept.push_back(set[t]);
        kept_pos.push_back(position[t]);
      }
    }
    if (kept.empty()) {
      kept.push_back(set[nearest]);
      kept_pos.push_back(position[nearest]);
    }
    set = std::move(kept);
    position = std::move(kept_pos);
  }
  if (set.size() == 1) {
    result.index = set.front();
  } else if (result.rounds > 0) {
    std::size_t nearest = 0;
    for (std::size_t t = 1; t < set.size(); ++t)
      if (std::fabs(position[t] - slope) < std::fabs(position[nearest] - slope)) nearest = t;
    result.index = set[nearest];
  }
  return result;
}

KSparseResult adaptive_k_sparse_recover(InformationSession& session, const RecoveryConfig& config,
                                        RngStream& rng) {
  config.validate();
  const std::size_t m = session.dim();
  KSparseResult out;
  out.output = DenseVector(m);
  const std::size_t start_used = session.used();

  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t pass = 0; config.max_passes == 0 || pass < config.max_passes; ++pass) {
    const std::size_t sets = std::min(config.candidate_sets(), pool.size());
    if (sets == 0) break;
    const auto perm = random_permutation(pool.size(), rng);
    std::vector<std::size_t> found;
    bool searched = false;
    for (std::size_t b = 0; b < sets; ++b) {
      std::vector<std::size_t> bucket;
      for (std::size_t t = b * pool.size() / sets; t < (b + 1) * pool.size() / sets; ++t)
        bucket.push_back(pool[perm[t]]);
      // One exact readout stays in reserve for this set and every later one.
      const std::size_t reserve = sets - b;
      const std::size_t remaining = session.remaining();
      if (remaining <= reserve) break;
      const std::size_t share = (remaining - reserve) / (sets - b);
      const auto r = adaptive_one_sparse(session, bucket, config, share, rng);
      searched = searched || r.measurements > 0;
      if (r.index) {
        out.output[*r.index] = session.query(LinearFunctional::coordinate(m, *r.index));
        found.push_back(*r.index);
      }
    }
    if (found.empty() || !searched) break;
    out.found.insert(out.found.end(), found.begin(), found.end());
    std::sort(found.begin(), found.end());
    std::erase_if(pool, [&](std::size_t j) { return std::binary_search(found.begin(), found.end(), j); });
  }
  std::sort(out.found.begin(), out.found.end());
  out.measurements = session.used() - start_used;
  return out;
}

DenseVector AdaptiveKSparse::run(InformationSession& session, RngStream& rng) {
  return adaptive_k_sparse_recover(session, config_, rng).output;
}

SketchDecoder::SketchDecoder(LinearDecoder decoder, std::size_t rows,
                             std::shared_ptr<const DenseMatrix> fixed_matrix,
                             std::size_t greedy_sparsity)
    : decoder_(decoder), rows_(rows), fixed_(std::move(fixed_matrix)),
      greedy_sparsity_(greedy_sparsity) {
  if (fixed_ && fixed_->rows() != rows_) throw DimensionMismatch("fixed matrix row count != rows");
}

std::string SketchDecoder::name() const {
  switch (decoder_) {
    case LinearDecoder::gaussian_linear:
      return "gaussian-linear";
    case LinearDecoder::l1min:
      return "l1min";
    case LinearDecoder::greedy:
      return "greedy";
  }
  return "sketch";
}

void SketchDecoder::begin(const ProblemInfo& info, RngStream& rng) {
  Algorithm::begin(info, rng);
  if (fixed_) {
    if (fixed_->cols() != info.dim) throw DimensionMismatch("fixed matrix column count != dim");
    matrix_ = fixed_;
  } else {
    matrix_ = std::make_shared<const DenseMatrix>(gaussian_matrix(rows_, info.dim, rng));
  }
}

Action SketchDecoder::next_action(const std::vector<LedgerEntry>& history, RngStream&) {
  const DenseMatrix& a = *matrix_;
  if (a.rows() == 0) return action::Finish{DenseVector(info_.dim)};
  if (history.empty()) {
    action::Register reg;
    for (std::size_t r = 0; r < a.rows(); ++r)
      reg.functionals.emplace_back(DenseVector(std::vector<double>(a.row(r).begin(), a.row(r).end())));
    return reg;
  }
  if (!history.front().value) return action::Reveal{};
  DenseVector y(history.size());
  for (std::size_t r = 0; r < history.size(); ++r) y[r] = *history[r].value;
  switch (decoder_) {
    case LinearDecoder::gaussian_linear:
      return action::Finish{linear_decode(a, y)};
    case LinearDecoder::l1min:
      return action::Finish{l1_min_decode(a, y).z};
    case LinearDecoder::greedy: {
      const std::size_t s = greedy_sparsity_ ? greedy_sparsity_ : std::max<std::size_t>(1, (a.rows() + 3) / 4);
      return action::Finish{greedy_decode(a, y, s)};
    }
  }
  throw Error("unknown decoder");
}

DenseVector linear_decode(const DenseMatrix& measurement, const DenseVector& y) {
  if (measurement.rows() == 0) return DenseVector(measurement.cols());
  return (1.0 / static_cast<double>(measurement.rows())) * transpose_times(measurement, y);
}

namespace {

// Moore-Penrose inverse of a symmetric PSD matrix.
DenseMatrix psd_pinv(const DenseMatrix& g, std::size_t& rank) {
  const auto eig = symmetric_eigen(g);
  const std::size_t n = g.rows();
  const double top = eig.values.empty() ? 0.0 : std::max(0.0, eig.values.back());
  const double cut = top * 1e-12 * static_cast<double>(std::max<std::size_t>(n, 1));
  DenseMatrix p(n, n);
  rank = 0;
  for (std::size_t e = 0; e < n; ++e) {
    if (!(eig.values[e] > cut)) continue;
    ++rank;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        p(a, b) += eig.vectors(a, e) * eig.vectors(b, e) / eig.values[e];
  }
  return p;
}

double soft(double v, double t) {
  return v > t ? v - t : (v < -t ? v + t : 0.0);
}

}  // namespace

L1Result l1_min_decode(const DenseMatrix& measurement, const DenseVector& y, double tolerance,
                       std::size_t max_iterations) {
  const std::size_t n = measurement.rows(), m = measurement.cols();
  if (y.size() != n) throw DimensionMismatch("y must have one entry per row of N");
  L1Result res;
  res.z = DenseVector(m);
  if (n == 0) {
    res.converged = true;
    return res;
  }
  std::size_t rank = 0;
  const DenseMatrix pinv = psd_pinv(gram_rows(measurement), rank);
  const DenseVector x_ln = transpose_times(measurement, pinv * y);
  const double gap = (measurement * x_ln - y).norm2();
  if (gap > 1e-8 * (1.0 + y.norm2())) throw Infeasible("y is not in the range of N");
  const double scale = x_ln.norm_inf();
  if (scale == 0.0) {
    res.converged = true;
    return res;
  }
  if (rank == m) {
    res.z = x_ln;
    res.converged = true;
    return res;
  }

  const DenseVector ys = (1.0 / scale) * y;
  auto project = [&](const DenseVector& v) {
    DenseVector r = measurement * v - ys;
    DenseVector corr = transpose_times(measurement, pinv * r);
    return v - corr;
  };

  DenseVector z = (1.0 / scale) * x_ln, u(m), x(m);
  double rho = 1.0;
  constexpr double kRelax = 1.5;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    x = project(z - u);
    DenseVector z_old = z;
    DenseVector xr(m);
    for (std::size_t j = 0; j < m; ++j) xr[j] = kRelax * x[j] + (1.0 - kRelax) * z_old[j];
    for (std::size_t j = 0; j < m; ++j) z[j] = soft(xr[j] + u[j], 1.0 / rho);
    for (std::size_t j = 0; j < m; ++j) u[j] += xr[j] - z[j];
    const double primal = std::sqrt(simd::sum_sq_diff(x, z));
    const double dual = rho * std::sqrt(simd::sum_sq_diff(z, z_old));
    res.iterations = it;
    if (primal <= tolerance * (1.0 + z.norm2()) && dual <= tolerance * (1.0 + rho * u.norm2())) {
      res.converged = true;
      break;
    }
    if (it % 16 == 0) {
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        u = 0.5 * u;
      } else if (dual > 10.0 * primal) {
        rho *= 0.5;
        u = 2.0 * u;
      }
    }
  }
  // Final iterate from the feasible side, sparsified through z's support.
  res.z = scale * project(z);
  return res;
}

DenseVector greedy_decode(const DenseMatrix& measurement, const DenseVector& y,
                          std::size_t max_sparsity) {
  const std::size_t n = measurement.rows(), m = measurement.cols();
  if (y.size() != n) throw DimensionMismatch("y must have one entry per row of N");
  DenseVector z(m);
  if (n == 0) return z;
  std::vector<double> norms(m);
  for (std::size_t j = 0; j < m; ++j) norms[j] = measurement.col(j).norm2();

  std::vector<DenseVector> q;
  std::vector<std::size_t> support;
  std::vector<std::vector<double>> r_cols;  // column t of R: <q_l, a_t>, l <= t
  std::vector<bool> used(m, false);
  DenseVector residual = y;
  const double stop = 1e-10 * y.norm2();
  while (support.size() < std::min(max_sparsity, n) && residual.norm2() > stop) {
    const DenseVector corr = transpose_times(measurement, residual);
    std::size_t best = m;
    double best_score = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j] || norms[j] == 0.0) continue;
      const double score = std::fabs(corr[j]) / norms[j];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best == m) break;
    used[best] = true;
    const DenseVector a = measurement.col(best);
    DenseVector v = a;
    std::vector<double> rc(q.size() + 1, 0.0);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t l = 0; l < q.size(); ++l) {
        const double c = simd::dot(q[l], v);
        rc[l] += c;
        simd::axpy(-c, q[l], v.span());
      }
    const double vn = v.norm2();
    if (vn <= 1e-12 * norms[best]) continue;
    rc.back() = vn;
    q.push_back((1.0 / vn) * v);
    support.push_back(best);
    r_cols.push_back(rc);
    simd::axpy(-simd::dot(q.back(), residual), q.back(), residual.span());
  }
  // Solve R c = Q^T y by back substitution.
  const std::size_t s = support.size();
  std::vector<double> rhs(s), coef(s);
  for (std::size_t l = 0; l < s; ++l) rhs[l] = simd::dot(q[l], y);
  for (std::size_t l = s; l-- > 0;) {
    double acc = rhs[l];
    for (std::size_t t = l + 1; t < s; ++t) acc -= r_cols[t][l] * coef[t];
    coef[l] = acc / r_cols[l][l];
  }
  for (std::size_t l = 0; l < s; ++l) z[support[l]] = coef[l];
  return z;
}

std::vector<std::size_t> top_k_indices(const DenseVector& x, std::size_t k) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, x.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double fa = std::fabs(x[a]), fb = std::fabs(x[b]);
                      return fa != fb ? fa > fb : a < b;
                    });
  idx.resize(k);
  return idx;
}

double best_k_term_error(const DenseVector& x, std::size_t k, KTermNorm q) {
  if (k > x.size()) throw DomainError("k exceeds the dimension");
  DenseVector rest = x;
  for (std::size_t j : top_k_indices(x, k)) rest[j] = 0.0;
  switch (q) {
    case KTermNorm::l1:
      return rest.norm1();
    case KTermNorm::l2:
      return rest.norm2();
    case KTermNorm::linf:
      return rest.norm_inf();
  }
  return 0.0;
}

}  // namespace seqgap
