#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace seqgap {

// Vector of finite reals. Finiteness is checked on construction from external
// data; element writes through operator[] are trusted.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, double fill = 0.0);
  explicit DenseVector(std::vector<double> values);
  DenseVector(std::initializer_list<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const double* data() const { return values_.data(); }
  double* data() { return values_.data(); }
  std::span<const double> span() const { return values_; }
  std::span<double> span() { return values_; }
  operator std::span<const double>() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }
  const std::vector<double>& values() const { return values_; }

  double norm1() const;
  double norm2() const;
  double norm_inf() const;

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> values_;
};

DenseVector operator+(const DenseVector& a, const DenseVector& b);
DenseVector operator-(const DenseVector& a, const DenseVector& b);
DenseVector operator*(double s, const DenseVector& a);
double dot(const DenseVector& a, const DenseVector& b);

// Row-major dense matrix of finite reals.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  DenseVector col(std::size_t j) const;
  const std::vector<double>& row_major() const { return data_; }

  DenseMatrix transpose() const;
  // Columns listed in `indices`, in that order.
  DenseMatrix select_cols(std::span<const std::size_t> indices) const;
  double frobenius_norm() const;
  double max_abs() const;
  bool is_symmetric(double tol) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseVector operator*(const DenseMatrix& a, const DenseVector& x);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);
// A^T y without forming the transpose.
DenseVector transpose_times(const DenseMatrix& a, const DenseVector& y);
// A A^T
DenseMatrix gram_rows(const DenseMatrix& a);

// Symmetric eigendecomposition s = V diag(values) V^T, values ascending,
// eigenvectors in the columns of V.
struct SymmetricEigen {
  std::vector<double> values;
  DenseMatrix vectors;
};
SymmetricEigen symmetric_eigen(const DenseMatrix& s);

// Thin SVD a = U diag(s) V^T with s descending; U is rows x r, V is cols x r,
// r = min(rows, cols).
struct ThinSvd {
  DenseMatrix u;
  std::vector<double> singular_values;
  DenseMatrix v;
};
ThinSvd thin_svd(const DenseMatrix& a);

// Largest |eigenvalue| of a symmetric matrix.
double spectral_norm_symmetric(const DenseMatrix& s);

}  // namespace seqgap
