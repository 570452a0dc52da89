#pragma once

#include <cstdint>
#include <vector>

#include "seqgap/gaussian.hpp"
#include "seqgap/hard_instance.hpp"
#include "seqgap/linalg.hpp"
#include "seqgap/rng.hpp"

namespace seqgap {

// Record of the column selection for a fixed matrix N (n x m) and subset J.
// Stage i (0-based) sorts the candidate set m_i by ||Pi_i c_j|| with index
// tie-break, selects the last element of J in that order at 1-based position
// k_{i+1}, and keeps the elements before it as m_{i+1}.
struct ShrinkageTrace {
  DenseMatrix measurement;
  std::vector<std::size_t> subset_j;  // sorted
  std::vector<std::size_t> selected;  // j_1..j_n
  std::vector<std::vector<std::size_t>> candidate_sets;  // m_0..m_n, each in sorted order
  std::vector<DenseVector> basis;            // b_i = c_{j_i}
  std::vector<DenseVector> projected_basis;  // Pi_{i-1} b_i; exactly 0 below threshold
  std::vector<std::size_t> k_values;         // k_1..k_n
  std::vector<std::size_t> final_set;        // selected union m_n, sorted
  std::size_t n0 = 0;                        // dim span{b_1..b_n}

  std::size_t n() const { return measurement.rows(); }
  std::size_t m() const { return measurement.cols(); }
};

// Relative size below which a projected norm counts as zero.
inline constexpr double kZeroProjection = 1e-10;

ShrinkageTrace run_shrinkage(const DenseMatrix& measurement, std::vector<std::size_t> subset_j);

// c_j expands in the orthogonal basis with every coefficient in [-1-1e-8, 1+1e-8]
// and residual off the span <= 1e-8 ||c_j||.
bool verify_column_in_rectangle(const ShrinkageTrace& trace, std::size_t column);

struct RectangleCheck {
  bool passed = false;
  // Largest gauge of a vertex of R_i in E_{j_i} divided by sqrt((4^i - 1)/3).
  double worst_ratio = 0.0;
};

// R_i within scale * sqrt((4^i - 1)/3) * E_{j_i}, checked on all 2^i vertices.
// stage is 1-based, at most 20.
RectangleCheck check_rectangle_in_ellipsoid(const ShrinkageTrace& trace, std::size_t stage,
                                            double scale = 1.0);
bool verify_rectangle_in_ellipsoid(const ShrinkageTrace& trace, std::size_t stage);

// Ellipsoid E_j = N P_j (B_2^m) for an index set j.
Ellipsoid subset_ellipsoid(const DenseMatrix& measurement, const std::vector<std::size_t>& subset);

// Smallest r with c_j in r * E_J over j in the final set (the measured
// inflation; the lemma guarantees <= 2^n).
double measured_inflation(const ShrinkageTrace& trace);

std::size_t count_columns_in_inflated_ellipsoid(const DenseMatrix& measurement,
                                                const std::vector<std::size_t>& subset,
                                                double inflation);

struct InflatedCountRun {
  ProbabilityEstimate prob;  // P(count >= m/2)
  // Trials where the count fell below #final_set, contradicting the
  // certified inclusions. Always 0 for a correct implementation.
  std::uint64_t proxy_violations = 0;
  double mean_count = 0.0;
};

InflatedCountRun inflated_count_probability(const DenseMatrix& measurement, std::uint64_t trials,
                                            const RngStream& rng, unsigned threads = 0);

// P(K'_n = k), k = 1..m, for the n-th largest element of a uniform 2n-subset
// of [m], by enumerating every subset. Index 0 is unused.
std::vector<double> kn_exact_law(std::size_t m, std::size_t n);

struct KnLawRun {
  double tv_distance = 0.0;
  std::vector<double> empirical;  // indexed by k
  std::vector<double> exact;
};

// Empirical law of k_n from traces of fresh Gaussian matrices and uniform
// subsets, compared with kn_exact_law in total variation.
KnLawRun kn_law_check(std::size_t m, std::size_t n, std::uint64_t trials, const RngStream& rng,
                      unsigned threads = 0);

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng);

}  // namespace seqgap
