#include "seqgap/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "seqgap/errors.hpp"
#include "seqgap/simd.hpp"

namespace seqgap {
namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw NonFiniteValue(what);
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_eigen(const DenseMatrix& a) {
  return {a.row_major().data(), static_cast<Eigen::Index>(a.rows()),
          static_cast<Eigen::Index>(a.cols())};
}

DenseMatrix from_eigen(const Eigen::MatrixXd& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace

DenseVector::DenseVector(std::size_t n, double fill) : values_(n, fill) {
  require_finite(values_, "DenseVector fill value");
}

DenseVector::DenseVector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "DenseVector entries");
}

DenseVector::DenseVector(std::initializer_list<double> values) : values_(values) {
  require_finite(values_, "DenseVector entries");
}

double DenseVector::norm1() const { return simd::sum_abs(values_); }
double DenseVector::norm2() const { return std::sqrt(simd::sum_sq(values_)); }
double DenseVector::norm_inf() const { return simd::max_abs(values_); }

DenseVector operator+(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sum");
  DenseVector r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

DenseVector operator-(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector difference");
  DenseVector r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

DenseVector operator*(double s, const DenseVector& a) {
  DenseVector r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] *= s;
  return r;
}

double dot(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot product");
  return simd::dot(a, b);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  require_finite(data_, "DenseMatrix fill value");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols)
    throw DimensionMismatch("matrix entry count " + std::to_string(data_.size()) +
                            " != " + std::to_string(rows) + "x" + std::to_string(cols));
  require_finite(data_, "DenseMatrix entries");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "DenseMatrix entries");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  require_finite(m.data_, "diagonal entries");
  return m;
}

DenseVector DenseMatrix::col(std::size_t j) const {
  DenseVector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::select_cols(std::span<const std::size_t> indices) const {
  DenseMatrix s(rows_, indices.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (indices[k] >= cols_) throw DimensionMismatch("column index out of range");
      s(i, k) = (*this)(i, indices[k]);
    }
  return s;
}

double DenseMatrix::frobenius_norm() const { return std::sqrt(simd::sum_sq(data_)); }
double DenseMatrix::max_abs() const { return simd::max_abs(data_); }

bool DenseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

DenseVector operator*(const DenseMatrix& a, const DenseVector& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product");
  DenseVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = simd::dot(a.row(i), x);
  return y;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) simd::axpy(a(i, k), b.row(k), c.row(i));
  return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix difference");
  DenseMatrix c(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix c(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

DenseVector transpose_times(const DenseMatrix& a, const DenseVector& y) {
  if (a.rows() != y.size()) throw DimensionMismatch("transpose product");
  DenseVector x(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) simd::axpy(y[i], a.row(i), x.span());
  return x;
}

DenseMatrix gram_rows(const DenseMatrix& a) {
  DenseMatrix g(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.rows(); ++j) {
      const double v = simd::dot(a.row(i), a.row(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

SymmetricEigen symmetric_eigen(const DenseMatrix& s) {
  if (s.rows() != s.cols()) throw DimensionMismatch("eigendecomposition of non-square matrix");
  if (s.rows() == 0) return {};
  const Eigen::MatrixXd m = as_eigen(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  return {std::vector<double>(ev.data(), ev.data() + ev.size()), from_eigen(solver.eigenvectors())};
}

ThinSvd thin_svd(const DenseMatrix& a) {
  const Eigen::MatrixXd m = as_eigen(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  return {from_eigen(svd.matrixU()), std::vector<double>(sv.data(), sv.data() + sv.size()),
          from_eigen(svd.matrixV())};
}

double spectral_norm_symmetric(const DenseMatrix& s) {
  const auto eig = symmetric_eigen(s);
  double r = 0.0;
  for (double v : eig.values) r = std::max(r, std::fabs(v));
  return r;
}

}  // namespace seqgap
