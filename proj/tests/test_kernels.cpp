#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "tfm/error.hpp"
#include "tfm/kernels.hpp"

using namespace tfm;

namespace {

// Contiguous buffers with awkward lengths so vector tails are exercised.
const std::size_t kLengths[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257};

double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("avx2 kernels match the scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("avx2 unavailable on this machine; dispatch falls back to scalar");
    return;
  }
  const auto& s = kernels::scalar_ops();
  const auto& v = *kernels::avx2_ops();
  rng::RandomStream stream(42);

  for (std::size_t n : kLengths) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = stream.normal();
      y[i] = stream.normal();
    }
    CHECK(rel_diff(s.dot(x.data(), y.data(), n), v.dot(x.data(), y.data(), n)) < 1e-12);
    CHECK(rel_diff(s.sum_sq(x.data(), n), v.sum_sq(x.data(), n)) < 1e-12);

    std::vector<double> ys = y, yv = y;
    s.axpy(0.37, x.data(), ys.data(), n);
    v.axpy(0.37, x.data(), yv.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_diff(ys[i], yv[i]) < 1e-12);

    std::vector<double> xs = x, xv = x;
    s.scale(-1.75, xs.data(), n);
    v.scale(-1.75, xv.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(xs[i] == xv[i]);
  }
}

TEST_CASE("avx2 gemm and ger variants match the scalar reference") {
  if (!kernels::avx2_available()) return;
  const auto& s = kernels::scalar_ops();
  const auto& v = *kernels::avx2_ops();
  rng::RandomStream stream(43);

  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(stream.uniform() * 17);
    const std::size_t n = 1 + static_cast<std::size_t>(stream.uniform() * 17);
    const std::size_t k = 1 + static_cast<std::size_t>(stream.uniform() * 17);

    Matrix a = test::random_matrix(stream, m, k);
    Matrix b_nn = test::random_matrix(stream, k, n);
    Matrix b_nt = test::random_matrix(stream, n, k);
    Matrix a_tn = test::random_matrix(stream, k, m);

    Matrix cs(m, n), cv(m, n);
    s.gemm_nn(a.data(), m, b_nn.data(), k, cs.data(), m, m, n, k);
    v.gemm_nn(a.data(), m, b_nn.data(), k, cv.data(), m, m, n, k);
    CHECK(max_abs_diff(cs, cv) < 1e-10 * std::max(1.0, max_abs(cs)));

    Matrix ds(m, n), dv(m, n);
    s.gemm_nt(a.data(), m, b_nt.data(), n, ds.data(), m, m, n, k);
    v.gemm_nt(a.data(), m, b_nt.data(), n, dv.data(), m, m, n, k);
    CHECK(max_abs_diff(ds, dv) < 1e-10 * std::max(1.0, max_abs(ds)));

    Matrix es(m, n), ev(m, n);
    s.gemm_tn(a_tn.data(), k, b_nn.data(), k, es.data(), m, m, n, k);
    v.gemm_tn(a_tn.data(), k, b_nn.data(), k, ev.data(), m, m, n, k);
    CHECK(max_abs_diff(es, ev) < 1e-10 * std::max(1.0, max_abs(es)));

    std::vector<double> x(m), y(n);
    for (auto& e : x) e = stream.normal();
    for (auto& e : y) e = stream.normal();
    Matrix gs(m, n), gv(m, n);
    s.ger(1.3, x.data(), y.data(), gs.data(), m, m, n);
    v.ger(1.3, x.data(), y.data(), gv.data(), m, m, n);
    CHECK(max_abs_diff(gs, gv) < 1e-12);
  }
}

TEST_CASE("backend selection") {
  kernels::set_backend("scalar");
  CHECK(std::string(kernels::active().name) == "scalar");
  kernels::set_backend("auto");
  if (kernels::avx2_available()) {
    CHECK(std::string(kernels::active().name) == "avx2");
  }
  CHECK_THROWS_AS(kernels::set_backend("sse9"), UsageError);
  kernels::set_backend("auto");
}
