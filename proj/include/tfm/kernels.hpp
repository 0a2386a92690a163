#pragma once

#include <cstddef>
#include <string_view>

// Dense double-precision kernels underlying all matrix/tensor arithmetic.
//
// Every kernel exists in a scalar reference version and, on x86-64 with
// AVX2+FMA, a vectorized version. The active backend is resolved once at
// startup (overridable via set_backend() or the TFM_KERNEL_BACKEND
// environment variable) and the two implementations are equivalence-tested
// against each other. All matrices are column-major with an explicit
// leading dimension.

namespace tfm::kernels {

struct Ops {
  const char* name;

  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // sum_i x[i]^2
  double (*sum_sq)(const double* x, std::size_t n);
  // A(m x n) += alpha * x * y^T
  void (*ger)(double alpha, const double* x, const double* y, double* a,
              std::size_t lda, std::size_t m, std::size_t n);
  // C(m x n) += A(m x k) * B(k x n)
  void (*gemm_nn)(const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                  std::size_t n, std::size_t k);
  // C(m x n) += A(m x k) * B(n x k)^T
  void (*gemm_nt)(const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                  std::size_t n, std::size_t k);
  // C(m x n) += A(k x m)^T * B(k x n)
  void (*gemm_tn)(const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                  std::size_t n, std::size_t k);
};

const Ops& scalar_ops();

// AVX2+FMA implementations; null when the binary or CPU lacks support.
const Ops* avx2_ops();

bool avx2_available();

// Active backend used by the rest of the library.
const Ops& active();

// Select "scalar", "avx2" or "auto". Throws tfm::UsageError for unknown
// names or when avx2 is requested on a machine without it.
void set_backend(std::string_view name);

}  // namespace tfm::kernels
