#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "test_support.hpp"
#include "tfm/dgp.hpp"
#include "tfm/error.hpp"
#include "tfm/estimators.hpp"
#include "tfm/kernels.hpp"
#include "tfm/spectral.hpp"

using namespace tfm;

TEST_CASE("loadings: unit columns, orthonormal mode, determinism") {
  dgp::DgpSpec spec;
  spec.dims = {9, 7};
  spec.ranks = {1, 3};
  spec.ar_coeffs = {0.5};
  spec.seed = 12;

  const auto loadings = dgp::gen_loadings(spec);
  CHECK(std::fabs(norm2({loadings[0].col(0), loadings[0].col(0) + 9}) - 1.0) < 1e-12);
  CHECK(max_abs_diff(matmul_tn(loadings[1], loadings[1]), Matrix::identity(3)) < 1e-12);

  const auto again = dgp::gen_loadings(spec);
  for (std::size_t k = 0; k < 2; ++k) CHECK(max_abs_diff(loadings[k], again[k]) == 0.0);

  spec.loading_mode = dgp::LoadingMode::Orthonormal;
  const auto ortho = dgp::gen_loadings(spec);
  CHECK(max_abs_diff(matmul_tn(ortho[0], ortho[0]), Matrix::identity(1)) < 1e-12);
}

TEST_CASE("factor series: white case and stationary variance") {
  dgp::DgpSpec spec;
  spec.dims = {2};
  spec.ranks = {1};
  spec.seed = 77;

  spec.ar_coeffs = {0.0};
  spec.T = 10000;
  const TensorSeries white = dgp::gen_factor_series(spec);
  double sum = 0.0, sum_lag = 0.0, ss = 0.0;
  for (std::size_t t = 0; t < spec.T; ++t) {
    const double f = white.slice(t).data()[0];
    sum += f;
    ss += f * f;
    if (t > 0) sum_lag += f * white.slice(t - 1).data()[0];
  }
  const double mean = sum / spec.T;
  const double var = ss / spec.T - mean * mean;
  const double rho1 = (sum_lag / (spec.T - 1) - mean * mean) / var;
  CHECK(std::fabs(rho1) < 0.05);

  spec.ar_coeffs = {0.6};
  spec.T = 100000;
  const TensorSeries ar = dgp::gen_factor_series(spec);
  double ss2 = 0.0, mean2 = 0.0;
  for (std::size_t t = 0; t < spec.T; ++t) mean2 += ar.slice(t).data()[0];
  mean2 /= spec.T;
  for (std::size_t t = 0; t < spec.T; ++t) {
    const double f = ar.slice(t).data()[0] - mean2;
    ss2 += f * f;
  }
  const double target = 1.0 / (1.0 - 0.36);
  CHECK(ss2 / spec.T == doctest::Approx(target).epsilon(0.10));
}

TEST_CASE("opposite AR coefficients cancel the lag-1 factor cross-moment") {
  dgp::DgpSpec spec;
  spec.dims = {2, 2};
  spec.ranks = {1, 2};
  spec.ar_coeffs = {0.8, -0.8};
  spec.T = 200000;
  spec.seed = 99;
  const TensorSeries f = dgp::gen_factor_series(spec);
  // E[F_t F_{t-1}^T] for the 1x2 factor: sum of the two per-entry lag-1
  // autocovariances.
  double acc = 0.0, var = 0.0;
  for (std::size_t t = 1; t < spec.T; ++t) {
    acc += f.slice(t).data()[0] * f.slice(t - 1).data()[0] +
           f.slice(t).data()[1] * f.slice(t - 1).data()[1];
    var += f.slice(t).data()[0] * f.slice(t).data()[0] +
           f.slice(t).data()[1] * f.slice(t).data()[1];
  }
  acc /= static_cast<double>(spec.T - 1);
  var /= static_cast<double>(2 * (spec.T - 1));
  CHECK(std::fabs(acc) < 0.05 * var);
}

TEST_CASE("noise: iid case, Kronecker covariance, temporal whiteness") {
  dgp::DgpSpec spec;
  spec.dims = {4, 4};
  spec.ranks = {1, 1};
  spec.ar_coeffs = {0.5};
  spec.seed = 31;

  spec.noise_offdiag = 0.0;
  spec.T = 7000;
  const TensorSeries iid = dgp::gen_noise_series(spec);
  double off = 0.0, lag1 = 0.0;
  for (std::size_t t = 0; t < spec.T; ++t) {
    off += iid.slice(t).data()[0] * iid.slice(t).data()[5];
    if (t > 0) lag1 += iid.slice(t).data()[0] * iid.slice(t - 1).data()[0];
  }
  CHECK(std::fabs(off / spec.T) < 0.05);
  CHECK(std::fabs(lag1 / (spec.T - 1)) < 0.05);

  spec.noise_offdiag = 0.2;
  const TensorSeries cor = dgp::gen_noise_series(spec);
  // cov(e_{ij}, e_{i'j'}) should equal Psi1_{ii'} Psi2_{jj'}.
  const auto cell = [&](std::size_t i, std::size_t j) { return i + 4 * j; };
  double c_same = 0.0;     // (0,0) with (1,0): Psi1_01 * Psi2_00 = 0.2
  double c_cross = 0.0;    // (0,0) with (1,1): 0.2 * 0.2 = 0.04
  double c_var = 0.0;      // variance of one cell: 1.0
  for (std::size_t t = 0; t < spec.T; ++t) {
    const double* e = cor.slice(t).data();
    c_same += e[cell(0, 0)] * e[cell(1, 0)];
    c_cross += e[cell(0, 0)] * e[cell(1, 1)];
    c_var += e[cell(0, 0)] * e[cell(0, 0)];
  }
  CHECK(c_var / spec.T == doctest::Approx(1.0).epsilon(0.05));
  CHECK(c_same / spec.T == doctest::Approx(0.2).epsilon(0.25));
  CHECK(std::fabs(c_cross / spec.T - 0.04) < 0.05);
}

TEST_CASE("equicorrelated square root matches the closed form") {
  for (double rho : {0.0, 0.2, 0.5, 0.8}) {
    const Matrix ours = spectral::sym_sqrt(dgp::equicorrelated(6, rho));
    const Matrix closed = oracle::equicorrelated_sqrt_closed_form(6, rho);
    CHECK(max_abs_diff(ours, closed) < 1e-10);
  }
}

TEST_CASE("gen_series composes signal and noise; spec validation") {
  dgp::DgpSpec spec;
  spec.dims = {5, 4};
  spec.ranks = {1, 1};
  spec.lambda = 0.0;
  spec.ar_coeffs = {0.6};
  spec.T = 30;
  spec.seed = 8;
  const auto pure_noise = dgp::gen_series(spec);
  // lambda = 0: the series equals the noise stream exactly.
  const TensorSeries noise = dgp::gen_noise_series(spec);
  for (std::size_t t = 0; t < spec.T; ++t)
    for (std::size_t i = 0; i < noise.slice(t).size(); ++i)
      CHECK(pure_noise.x.slice(t).data()[i] == noise.slice(t).data()[i]);

  spec.lambda = 2.0;
  spec.noise_scale = 0.0;
  const auto clean = dgp::gen_series(spec);
  const auto svals = spectral::singular_values(est::tipup_matrix(clean.x, 1, 1));
  CHECK(svals[1] < 1e-10 * svals[0]);

  dgp::DgpSpec bad = spec;
  bad.ar_coeffs = {1.0};
  CHECK_THROWS_AS(dgp::validate(bad), DataError);
  bad = spec;
  bad.noise_offdiag = 1.0;
  CHECK_THROWS_AS(dgp::validate(bad), DataError);
  bad = spec;
  bad.ranks = {9, 1};
  CHECK_THROWS_AS(dgp::validate(bad), RankError);
}
