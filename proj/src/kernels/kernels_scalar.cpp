#include "tfm/kernels.hpp"

// Reference kernels. Plain loops, no manual vectorization; these define the
// semantics the SIMD variants are tested against.

namespace tfm::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sum_sq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void ger_scalar(double alpha, const double* x, const double* y, double* a,
                std::size_t lda, std::size_t m, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double s = alpha * y[j];
    double* col = a + j * lda;
    for (std::size_t i = 0; i < m; ++i) col[i] += s * x[i];
  }
}

void gemm_nn_scalar(const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                    std::size_t n, std::size_t k) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    const double* bj = b + j * ldb;
    for (std::size_t l = 0; l < k; ++l) {
      const double s = bj[l];
      const double* al = a + l * lda;
      for (std::size_t i = 0; i < m; ++i) cj[i] += s * al[i];
    }
  }
}

void gemm_nt_scalar(const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                    std::size_t n, std::size_t k) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    for (std::size_t l = 0; l < k; ++l) {
      const double s = b[j + l * ldb];
      const double* al = a + l * lda;
      for (std::size_t i = 0; i < m; ++i) cj[i] += s * al[i];
    }
  }
}

void gemm_tn_scalar(const double* a, std::size_t lda, const double* b,
                    std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                    std::size_t n, std::size_t k) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    const double* bj = b + j * ldb;
    for (std::size_t i = 0; i < m; ++i) {
      cj[i] += dot_scalar(a + i * lda, bj, k);
    }
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",        dot_scalar,     axpy_scalar,    scale_scalar,
      sum_sq_scalar,   ger_scalar,     gemm_nn_scalar, gemm_nt_scalar,
      gemm_tn_scalar,
  };
  return ops;
}

}  // namespace tfm::kernels
