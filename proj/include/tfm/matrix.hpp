#pragma once

#include <cstddef>
#include <vector>

namespace tfm {

/// Dense column-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* col(std::size_t j) { return data_.data() + j * rows_; }
  const double* col(std::size_t j) const { return data_.data() + j * rows_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// All products allocate the result and route through the active kernel
// backend. Shapes are checked and raise tfm::DimensionError.

Matrix matmul(const Matrix& a, const Matrix& b);     // A * B
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // A * B^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // A^T * B
Matrix gram(const Matrix& a);                         // A * A^T
Matrix transpose(const Matrix& a);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);
std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& a);

// Euclidean helpers used throughout.
double norm2(const std::vector<double>& x);
void normalize(std::vector<double>& x);

}  // namespace tfm
