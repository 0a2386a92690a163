#include "tfm/kernels.hpp"

// AVX2+FMA kernels. This translation unit is compiled with -mavx2 -mfma on
// x86-64; callers must check avx2_available() before dispatching here.
// Results may differ from the scalar reference in the last bits (FMA and
// reassociated reductions); equivalence tests use tolerances, not bit
// equality.

#if defined(__x86_64__) || defined(_M_X64)
#define TFM_KERNELS_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#else
#define TFM_KERNELS_HAVE_AVX2_BUILD 0
#endif

namespace tfm::kernels {

#if TFM_KERNELS_HAVE_AVX2_BUILD

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d h64 = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, h64));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                                _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double sum_sq_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void ger_avx2(double alpha, const double* x, const double* y, double* a,
              std::size_t lda, std::size_t m, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    axpy_avx2(alpha * y[j], x, a + j * lda, m);
  }
}

void gemm_nn_avx2(const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                  std::size_t n, std::size_t k) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    const double* bj = b + j * ldb;
    for (std::size_t l = 0; l < k; ++l) {
      axpy_avx2(bj[l], a + l * lda, cj, m);
    }
  }
}

void gemm_nt_avx2(const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                  std::size_t n, std::size_t k) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    for (std::size_t l = 0; l < k; ++l) {
      axpy_avx2(b[j + l * ldb], a + l * lda, cj, m);
    }
  }
}

void gemm_tn_avx2(const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                  std::size_t n, std::size_t k) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    const double* bj = b + j * ldb;
    for (std::size_t i = 0; i < m; ++i) {
      cj[i] += dot_avx2(a + i * lda, bj, k);
    }
  }
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops ops = {
      "avx2",        dot_avx2,     axpy_avx2,    scale_avx2, sum_sq_avx2,
      ger_avx2,      gemm_nn_avx2, gemm_nt_avx2, gemm_tn_avx2,
  };
  return &ops;
}

#else

const Ops* avx2_ops() { return nullptr; }

#endif

}  // namespace tfm::kernels
