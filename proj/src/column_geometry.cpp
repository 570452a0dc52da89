#include "seqgap/column_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "seqgap/errors.hpp"
#include "seqgap/parallel.hpp"
#include "seqgap/simd.hpp"

namespace seqgap {
namespace {

constexpr double kCoefficientSlack = 1e-8;

DenseVector column(const DenseMatrix& a, std::size_t j) { return a.col(j); }

// Pi c for the projector onto the complement of span(q), q orthonormal.
DenseVector project_out(const std::vector<DenseVector>& q, DenseVector c) {
  for (const auto& u : q) simd::axpy(-simd::dot(u, c), u, c.span());
  return c;
}

}  // namespace

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
  DenseMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = rng.gaussian();
  return a;
}

ShrinkageTrace run_shrinkage(const DenseMatrix& measurement, std::vector<std::size_t> subset_j) {
  const std::size_t n = measurement.rows(), m = measurement.cols();
  if (n == 0) throw InvalidDimensions("measurement matrix needs at least one row");
  if (2 * n > m) throw DimensionMismatch("need 2n <= m");
  std::sort(subset_j.begin(), subset_j.end());
  if (subset_j.size() != 2 * n) throw DimensionMismatch("subset must have exactly 2n elements");
  if (std::adjacent_find(subset_j.begin(), subset_j.end()) != subset_j.end())
    throw DimensionMismatch("subset has repeated indices");
  if (subset_j.back() >= m) throw DimensionMismatch("subset index out of range");

  ShrinkageTrace t;
  t.measurement = measurement;
  t.subset_j = subset_j;
  std::vector<bool> in_j(m, false);
  for (std::size_t j : subset_j) in_j[j] = true;

  std::vector<std::size_t> current(m);
  std::iota(current.begin(), current.end(), 0);
  t.candidate_sets.push_back(current);

  std::vector<DenseVector> orthonormal;
  std::vector<DenseVector> columns(m);
  for (std::size_t j = 0; j < m; ++j) columns[j] = column(measurement, j);

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> norms(m, 0.0);
    for (std::size_t j : current) {
      const double full = columns[j].norm2();
      const double proj = project_out(orthonormal, columns[j]).norm2();
      norms[j] = proj <= kZeroProjection * full ? 0.0 : proj;
    }
    std::vector<std::size_t> order = current;  // already in index order
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });
    std::size_t k = 0;
    for (std::size_t pos = 0; pos < order.size(); ++pos)
      if (in_j[order[pos]]) k = pos + 1;
    const std::size_t j_next = order[k - 1];
    t.k_values.push_back(k);
    t.selected.push_back(j_next);

    const DenseVector& b = columns[j_next];
    t.basis.push_back(b);
    DenseVector p = project_out(orthonormal, b);
    const double pn = p.norm2();
    if (pn <= kZeroProjection * b.norm2() || pn == 0.0) {
      p = DenseVector(n);
    } else {
      orthonormal.push_back((1.0 / pn) * p);
    }
    t.projected_basis.push_back(p);

    current.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1));
    std::sort(current.begin(), current.end());
    t.candidate_sets.push_back(current);
  }
  t.n0 = orthonormal.size();
  t.final_set = current;
  t.final_set.insert(t.final_set.end(), t.selected.begin(), t.selected.end());
  std::sort(t.final_set.begin(), t.final_set.end());
  return t;
}

bool verify_column_in_rectangle(const ShrinkageTrace& trace, std::size_t column_index) {
  if (column_index >= trace.m()) throw DimensionMismatch("column index out of range");
  const DenseVector c = column(trace.measurement, column_index);
  DenseVector residual = c;
  for (const auto& p : trace.projected_basis) {
    const double p2 = simd::sum_sq(p);
    if (p2 == 0.0) continue;
    const double alpha = simd::dot(p, c) / p2;
    if (std::fabs(alpha) > 1.0 + kCoefficientSlack) return false;
    simd::axpy(-alpha, p, residual.span());
  }
  return residual.norm2() <= kCoefficientSlack * c.norm2();
}

Ellipsoid subset_ellipsoid(const DenseMatrix& measurement, const std::vector<std::size_t>& subset) {
  return Ellipsoid(measurement.select_cols(subset));
}

RectangleCheck check_rectangle_in_ellipsoid(const ShrinkageTrace& trace, std::size_t stage,
                                            double scale) {
  if (stage < 1 || stage > trace.selected.size()) throw DomainError("stage out of range");
  if (stage > 20) throw DomainError("vertex enumeration limited to stage <= 20");
  const std::vector<std::size_t> first(trace.selected.begin(),
                                       trace.selected.begin() + static_cast<std::ptrdiff_t>(stage));
  const Ellipsoid e = subset_ellipsoid(trace.measurement, first);
  const double base = std::sqrt((std::pow(4.0, static_cast<double>(stage)) - 1.0) / 3.0);
  const double radius = scale * base;
  RectangleCheck out{true, 0.0};
  const std::size_t n = trace.n();
  for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << stage); ++signs) {
    DenseVector v(n);
    for (std::size_t l = 0; l < stage; ++l)
      simd::axpy((signs >> l) & 1 ? -1.0 : 1.0, trace.projected_basis[l], v.span());
    const double g = e.gauge(v);
    out.worst_ratio = std::max(out.worst_ratio, g / base);
    if (!(g <= radius * (1.0 + e.rank_tolerance()))) out.passed = false;
  }
  return out;
}

bool verify_rectangle_in_ellipsoid(const ShrinkageTrace& trace, std::size_t stage) {
  return check_rectangle_in_ellipsoid(trace, stage).passed;
}

double measured_inflation(const ShrinkageTrace& trace) {
  const Ellipsoid e = subset_ellipsoid(trace.measurement, trace.subset_j);
  double worst = 0.0;
  for (std::size_t j : trace.final_set) worst = std::max(worst, e.gauge(trace.measurement.col(j)));
  return worst;
}

std::size_t count_columns_in_inflated_ellipsoid(const DenseMatrix& measurement,
                                                const std::vector<std::size_t>& subset,
                                                double inflation) {
  const Ellipsoid e = subset_ellipsoid(measurement, subset);
  std::size_t count = 0;
  for (std::size_t j = 0; j < measurement.cols(); ++j)
    if (e.contains(measurement.col(j), inflation)) ++count;
  return count;
}

InflatedCountRun inflated_count_probability(const DenseMatrix& measurement, std::uint64_t trials,
                                            const RngStream& rng, unsigned threads) {
  const std::size_t n = measurement.rows(), m = measurement.cols();
  if (n == 0 || 2 * n >= m) throw InvalidDimensions("need 2n < m");
  const double inflation = std::ldexp(1.0, static_cast<int>(n));
  struct Part {
    std::uint64_t hits = 0, violations = 0;
    double count_sum = 0.0;
  };
  const auto parts = parallel_chunks<Part>(
      trials, 64, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        Part p;
        for (std::size_t t = begin; t < end; ++t) {
          RngStream local = rng.split(t);
          const auto subset = sample_subset(m, 2 * n, local);
          const std::size_t count = count_columns_in_inflated_ellipsoid(measurement, subset, inflation);
          if (2 * count >= m) ++p.hits;
          const ShrinkageTrace trace = run_shrinkage(measurement, subset);
          if (count < trace.final_set.size()) ++p.violations;
          p.count_sum += static_cast<double>(count);
        }
        return p;
      });
  InflatedCountRun run;
  std::uint64_t hits = 0;
  double sum = 0.0;
  for (const auto& p : parts) {
    hits += p.hits;
    run.proxy_violations += p.violations;
    sum += p.count_sum;
  }
  run.prob = make_probability(hits, trials);
  run.mean_count = trials ? sum / static_cast<double>(trials) : 0.0;
  return run;
}

std::vector<double> kn_exact_law(std::size_t m, std::size_t n) {
  const std::size_t k = 2 * n;
  if (n == 0 || k > m) throw InvalidDimensions("need 1 <= n and 2n <= m");
  if (m > 30) throw DomainError("exact enumeration limited to m <= 30");
  std::vector<double> counts(m + 1, 0.0);
  double total = 0.0;
  std::vector<std::size_t> subset(k);
  std::iota(subset.begin(), subset.end(), 1);
  while (true) {
    counts[subset[k - n]] += 1.0;  // n-th largest, values are 1-based
    total += 1.0;
    std::size_t pos = k;
    while (pos > 0 && subset[pos - 1] == m - k + pos) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t t = pos; t < k; ++t) subset[t] = subset[t - 1] + 1;
  }
  for (auto& c : counts) c /= total;
  return counts;
}

KnLawRun kn_law_check(std::size_t m, std::size_t n, std::uint64_t trials, const RngStream& rng,
                      unsigned threads) {
  KnLawRun run;
  run.exact = kn_exact_law(m, n);
  const auto parts = parallel_chunks<std::vector<std::uint64_t>>(
      trials, 1024, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<std::uint64_t> hist(m + 1, 0);
        for (std::size_t t = begin; t < end; ++t) {
          RngStream local = rng.split(t);
          const DenseMatrix a = gaussian_matrix(n, m, local);
          const auto subset = sample_subset(m, 2 * n, local);
          ++hist[run_shrinkage(a, subset).k_values.back()];
        }
        return hist;
      });
  std::vector<std::uint64_t> hist(m + 1, 0);
  for (const auto& p : parts)
    for (std::size_t k = 0; k <= m; ++k) hist[k] += p[k];
  run.empirical.assign(m + 1, 0.0);
  double tv = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    run.empirical[k] = trials ? static_cast<double>(hist[k]) / static_cast<double>(trials) : 0.0;
    tv += std::fabs(run.empirical[k] - run.exact[k]);
  }
  run.tv_distance = 0.5 * tv;
  return run;
}

}  // namespace seqgap
