#include "tfm/matrix.hpp"

#include <cmath>
#include <string>

#include "tfm/error.hpp"
#include "tfm/kernels.hpp"

namespace tfm {
namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  kernels::active().gemm_nn(a.data(), a.rows(), b.data(), b.rows(), c.data(),
                            c.rows(), a.rows(), b.cols(), a.cols());
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: inner dimensions differ");
  Matrix c(a.rows(), b.rows());
  kernels::active().gemm_nt(a.data(), a.rows(), b.data(), b.rows(), c.data(),
                            c.rows(), a.rows(), b.rows(), a.cols());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: inner dimensions differ");
  Matrix c(a.cols(), b.cols());
  kernels::active().gemm_tn(a.data(), a.rows(), b.data(), b.rows(), c.data(),
                            c.rows(), a.cols(), b.cols(), a.rows());
  return c;
}

Matrix gram(const Matrix& a) { return matmul_nt(a, a); }

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "matrix add: shapes differ");
  Matrix c = a;
  kernels::active().axpy(1.0, b.data(), c.data(), c.size());
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "matrix subtract: shapes differ");
  Matrix c = a;
  kernels::active().axpy(-1.0, b.data(), c.data(), c.size());
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  kernels::active().scale(s, c.data(), c.size());
  return c;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  require(a.cols() == x.size(), "matvec: dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  const auto& ops = kernels::active();
  for (std::size_t j = 0; j < a.cols(); ++j) ops.axpy(x[j], a.col(j), y.data(), a.rows());
  return y;
}

std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x) {
  require(a.rows() == x.size(), "matvec_t: dimension mismatch");
  std::vector<double> y(a.cols());
  const auto& ops = kernels::active();
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = ops.dot(a.col(j), x.data(), a.rows());
  return y;
}

double frobenius_norm(const Matrix& a) {
  return std::sqrt(kernels::active().sum_sq(a.data(), a.size()));
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.data()[i]));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw DimensionError("max_abs_diff: shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  return m;
}

bool all_finite(const Matrix& a) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.data()[i])) return false;
  return true;
}

double norm2(const std::vector<double>& x) {
  return std::sqrt(kernels::active().sum_sq(x.data(), x.size()));
}

void normalize(std::vector<double>& x) {
  const double n = norm2(x);
  if (n > 0.0) kernels::active().scale(1.0 / n, x.data(), x.size());
}

}  // namespace tfm
