#pragma once

// Reference computations for the test suites. They share no code with the
// library beyond the plain data types, and favour brute force and extended
// precision over speed.

#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

using Vec = std::vector<long double>;
using Mat = std::vector<Vec>;  // row-major

// Solves a x = b by Gaussian elimination with partial pivoting; empty when a
// pivot falls below 1e-14 times the largest entry.
std::optional<Vec> solve(Mat a, Vec b);
std::optional<Mat> inverse(const Mat& a);
long double determinant(Mat a);

// min ||z||_1 subject to N z = y for an n x m matrix of full row rank, by
// enumerating every basic solution (supports of size n).
struct L1Optimum {
  long double value = 0;
  Vec z;
};
std::optional<L1Optimum> l1_minimum(const Mat& n, const Vec& y);

// Posterior over the components of a uniform Gaussian mixture with a shared
// nonsingular covariance, evaluated in long double.
Vec mixture_posterior(const Mat& centers_by_component, const Mat& covariance, const Vec& y);

// Smallest t with x in t * A(B_2^k) for a full-row-rank A: sqrt(x^T (A A^T)^{-1} x).
long double ellipsoid_gauge(const Mat& factor, const Vec& x);

// P(K = k), k = 0..m, for the n-th largest element of a uniform 2n-subset of
// {1..m}: C(k-1, n) C(m-k, n-1) / C(m, 2n).
Vec kn_law(std::size_t m, std::size_t n);

// l_inf distance between a + r B_1 and b + r B_1 (dense, same length) by
// bisection on t: the smallest t with sum_i max(|a_i - b_i| - t, 0) <= 2r.
long double linf_distance_l1_balls(const Vec& a, const Vec& b, long double r);

// E[ ||X - g||_inf 1{event} ] for a finite distribution.
struct Atom {
  Vec point;
  long double prob = 0;
  bool in_event = true;
};
long double event_error(const std::vector<Atom>& atoms, const Vec& g);
// Minimum of event_error over the grid lo + i (hi - lo)/steps in every coordinate.
struct GridMinimum {
  long double value = 0;
  Vec argmin;
};
GridMinimum grid_minimum(const std::vector<Atom>& atoms, long double lo, long double hi,
                         std::size_t steps);

// Binomial coefficient as long double.
long double choose(std::size_t n, std::size_t k);

}  // namespace oracle
