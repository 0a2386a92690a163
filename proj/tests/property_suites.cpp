#include "property_suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "test_support.hpp"
#include "tfm/dgp.hpp"
#include "tfm/diagnostics.hpp"
#include "tfm/estimators.hpp"
#include "tfm/experiment.hpp"
#include "tfm/kernels.hpp"
#include "tfm/postprocess.hpp"
#include "tfm/ratefit.hpp"
#include "tfm/spectral.hpp"

namespace tfm::props {
namespace {

using rng::RandomStream;
using test::random_dims;
using test::random_matrix;
using test::random_series;
using test::random_tensor;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

/// Runs `cases` iterations of a worst-observation check.
template <typename Fn>
PropertyResult bounded_check(const std::string& name, std::size_t cases,
                             double bound, Fn&& worst_of_case) {
  PropertyResult r;
  r.name = name;
  r.cases = cases;
  double worst = 0.0;
  RandomStream stream(rng::substream(0xbeefcafeull, std::hash<std::string>{}(name)));
  for (std::size_t c = 0; c < cases; ++c) {
    worst = std::max(worst, worst_of_case(stream, c));
  }
  r.pass = worst <= bound;
  r.detail = "worst " + fmt(worst) + " vs bound " + fmt(bound);
  return r;
}

std::vector<std::size_t> small_dims(RandomStream& stream, std::size_t max_order = 4,
                                    std::size_t max_dim = 4) {
  const std::size_t order =
      1 + static_cast<std::size_t>(stream.uniform() * static_cast<double>(max_order));
  return random_dims(stream, order, max_dim);
}

}  // namespace

std::vector<PropertyResult> tensor_core_suite() {
  std::vector<PropertyResult> out;

  out.push_back(bounded_check(
      "tensor: refold(unfold) round trip", 200, 0.0,
      [](RandomStream& stream, std::size_t) {
        const auto dims = small_dims(stream);
        const Tensor x = random_tensor(stream, dims);
        double worst = 0.0;
        for (std::size_t k = 1; k <= dims.size(); ++k) {
          const Tensor back = mode_k_refold(mode_k_unfold(x, k), k, dims);
          for (std::size_t i = 0; i < x.size(); ++i) {
            worst = std::max(worst, std::fabs(back.data()[i] - x.data()[i]));
          }
        }
        return worst;
      }));

  out.push_back(bounded_check(
      "tensor: unfold(x times_k A) = A unfold(x)", 200, 1e-12,
      [](RandomStream& stream, std::size_t) {
        const auto dims = small_dims(stream);
        const Tensor x = random_tensor(stream, dims);
        const std::size_t k =
            1 + static_cast<std::size_t>(stream.uniform() * dims.size());
        const Matrix a = random_matrix(stream, 1 + (stream.uniform() > 0.5 ? 2 : 0),
                                       dims[k - 1]);
        const Matrix lhs = mode_k_unfold(mode_k_product(x, a, k), k);
        const Matrix rhs = matmul(a, mode_k_unfold(x, k));
        return max_abs_diff(lhs, rhs);
      }));

  out.push_back(bounded_check(
      "tensor: vec of mode products matches Kronecker action", 200, 1e-10,
      [](RandomStream& stream, std::size_t c) {
        const std::size_t order = 2 + (c % 2);
        const auto dims = random_dims(stream, order, 3);
        const Tensor f = random_tensor(stream, dims);
        std::vector<Matrix> mats;
        Tensor y = f;
        for (std::size_t k = 1; k <= order; ++k) {
          const Matrix a = random_matrix(stream, 2 + (k % 2), dims[k - 1]);
          y = mode_k_product(y, a, k);
          mats.push_back(a);
        }
        const auto lhs = vec(y);
        const auto rhs = matvec(oracle::kronecker_all_reversed(mats), vec(f));
        double worst = 0.0;
        for (std::size_t i = 0; i < lhs.size(); ++i)
          worst = std::max(worst, std::fabs(lhs[i] - rhs[i]));
        return worst;
      }));

  out.push_back(bounded_check(
      "tensor: outer product norm separates", 200, 1e-12,
      [](RandomStream& stream, std::size_t) {
        const Tensor x = random_tensor(stream, small_dims(stream, 2, 4));
        const Tensor y = random_tensor(stream, small_dims(stream, 2, 4));
        const double lhs = outer_product(x, y).frobenius_norm();
        const double rhs = x.frobenius_norm() * y.frobenius_norm();
        return std::fabs(lhs - rhs) / std::max(1.0, rhs);
      }));

  return out;
}

std::vector<PropertyResult> spectral_suite() {
  std::vector<PropertyResult> out;

  out.push_back(bounded_check(
      "spectral: norm dominates random Rayleigh witnesses", 200, 0.0,
      [](RandomStream& stream, std::size_t) {
        const std::size_t n = 2 + static_cast<std::size_t>(stream.uniform() * 6);
        const std::size_t p = 2 + static_cast<std::size_t>(stream.uniform() * 6);
        const Matrix m = random_matrix(stream, n, p);
        const double norm = spectral::spectral_norm(m);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
          std::vector<double> v(p);
          for (auto& vi : v) vi = stream.normal();
          const double witness = norm2(matvec(m, v)) / norm2(v);
          worst = std::max(worst, witness - norm - 1e-9);
        }
        return worst;
      }));

  out.push_back(bounded_check(
      "spectral: projections idempotent and symmetric", 200, 1e-10,
      [](RandomStream& stream, std::size_t) {
        const std::size_t n = 3 + static_cast<std::size_t>(stream.uniform() * 6);
        const std::size_t r = 1 + static_cast<std::size_t>(stream.uniform() * (n - 1));
        const Matrix q = spectral::qr_orthonormal(random_matrix(stream, n, r));
        const Matrix p = spectral::projection_from_basis(q);
        double worst = max_abs_diff(matmul(p, p), p);
        worst = std::max(worst, max_abs_diff(p, transpose(p)));
        double trace = 0.0;
        for (std::size_t i = 0; i < n; ++i) trace += p(i, i);
        worst = std::max(worst, std::fabs(trace - static_cast<double>(r)));
        return worst;
      }));

  // Subspace stability: the top-1 projection error must not collapse as the
  // perturbation grows over three decades (qualitative smoke check).
  out.push_back(bounded_check(
      "spectral: perturbation response monotone over decades", 20, 0.0,
      [](RandomStream& stream, std::size_t) {
        const Matrix u = spectral::qr_orthonormal(random_matrix(stream, 8, 1));
        const Matrix v = spectral::qr_orthonormal(random_matrix(stream, 6, 1));
        Matrix m(8, 6);
        kernels::active().ger(3.0, u.col(0), v.col(0), m.data(), 8, 8, 6);
        const Matrix noise = random_matrix(stream, 8, 6);
        const Matrix p0 = spectral::projection_from_basis(
            spectral::top_left_singular(m, 1).left_vectors);
        double prev = -1.0;
        double worst = 0.0;
        for (double eps : {1e-4, 1e-3, 1e-2, 1e-1}) {
          const Matrix p = spectral::projection_from_basis(
              spectral::top_left_singular(m + eps * noise, 1).left_vectors);
          const double dist = spectral::spectral_norm(p - p0);
          // allow slack of a factor 2 against strict monotonicity
          if (prev >= 0.0 && dist < prev / 2.0) worst = std::max(worst, prev - dist);
          prev = dist;
        }
        return worst;
      }));

  return out;
}

std::vector<PropertyResult> estimator_suite() {
  std::vector<PropertyResult> out;

  out.push_back(bounded_check(
      "estimators: match definitional triple-loop oracles", 50, 1e-10,
      [](RandomStream& stream, std::size_t) {
        std::vector<std::size_t> dims = {
            1 + static_cast<std::size_t>(stream.uniform() * 4),
            1 + static_cast<std::size_t>(stream.uniform() * 3),
            1 + static_cast<std::size_t>(stream.uniform() * 2)};
        const std::size_t h0 = 1 + static_cast<std::size_t>(stream.uniform() * 2);
        const std::size_t T =
            h0 + 2 + static_cast<std::size_t>(stream.uniform() * (8 - h0 - 1));
        const TensorSeries x = random_series(stream, dims, T);
        double worst = 0.0;
        for (std::size_t k = 1; k <= dims.size(); ++k) {
          worst = std::max(worst, max_abs_diff(est::topup_matrix(x, k, h0),
                                               oracle::topup_matrix_loops(x, k, h0)));
          worst = std::max(worst, max_abs_diff(est::tipup_matrix(x, k, h0),
                                               oracle::tipup_matrix_loops(x, k, h0)));
        }
        return worst;
      }));

  out.push_back(bounded_check(
      "estimators: materialized and streamed TOPUP grams agree", 50, 1e-9,
      [](RandomStream& stream, std::size_t) {
        const auto dims = random_dims(stream, 3, 3);
        const TensorSeries x = random_series(stream, dims, 6);
        double worst = 0.0;
        for (std::size_t k = 1; k <= dims.size(); ++k) {
          const Matrix direct = gram(est::topup_matrix(x, k, 2));
          const Matrix streamed = est::topup_gram(x, k, 2);
          const double scale = std::max(1.0, max_abs(direct));
          worst = std::max(worst, max_abs_diff(direct, streamed) / scale);
        }
        return worst;
      }));

  out.push_back(bounded_check(
      "estimators: permutation equivariance of mode estimates", 50, 1e-9,
      [](RandomStream& stream, std::size_t) {
        const std::vector<std::size_t> dims = {3, 4, 2};
        const std::vector<std::size_t> perm = {2, 3, 1};
        const TensorSeries x = random_series(stream, dims, 10);
        std::vector<Tensor> permuted;
        for (std::size_t t = 0; t < x.length(); ++t)
          permuted.push_back(permute_modes(x.slice(t), perm));
        const TensorSeries y = TensorSeries(std::move(permuted));

        est::ModelSpec spec;
        spec.ranks = {1, 1, 1};
        spec.h0 = 1;
        spec.method = est::Method::TIPUP;
        const auto ex = est::estimate(x, spec);
        const auto ey = est::estimate(y, spec);
        double worst = 0.0;
        for (std::size_t k = 0; k < perm.size(); ++k) {
          worst = std::max(worst, max_abs_diff(ey.projections[k],
                                               ex.projections[perm[k] - 1]));
        }
        return worst;
      }));

  out.push_back(bounded_check(
      "estimators: projections invariant to positive scaling", 100, 1e-9,
      [](RandomStream& stream, std::size_t) {
        const std::vector<std::size_t> dims = {4, 3};
        const TensorSeries x = random_series(stream, dims, 12);
        std::vector<Tensor> scaled;
        const double c = 0.25 + 10.0 * stream.uniform();
        for (std::size_t t = 0; t < x.length(); ++t) {
          Tensor s = x.slice(t);
          kernels::active().scale(c, s.data(), s.size());
          scaled.push_back(std::move(s));
        }
        est::ModelSpec spec;
        spec.ranks = {1, 1};
        spec.method = est::Method::TOPUP;
        const auto ex = est::estimate(x, spec);
        const auto ey = est::estimate(TensorSeries(std::move(scaled)), spec);
        double worst = 0.0;
        for (std::size_t k = 0; k < dims.size(); ++k)
          worst = std::max(worst, max_abs_diff(ex.projections[k], ey.projections[k]));
        return worst;
      }));

  out.push_back(bounded_check(
      "estimators: invariant to orthogonal factor rotation (noise-free)", 50, 1e-8,
      [](RandomStream& stream, std::size_t) {
        // A_1 F A_2^T with A_1 -> A_1 R, F -> R^T F leaves the signal and
        // every projection unchanged.
        const std::size_t d1 = 6, d2 = 5, r1 = 2, r2 = 2, T = 14;
        const Matrix a1 = spectral::qr_orthonormal(random_matrix(stream, d1, r1));
        const Matrix a2 = spectral::qr_orthonormal(random_matrix(stream, d2, r2));
        const Matrix rot = spectral::qr_orthonormal(random_matrix(stream, r1, r1));
        const Matrix a1r = matmul(a1, rot);
        std::vector<Tensor> sx, sy;
        for (std::size_t t = 0; t < T; ++t) {
          const Tensor f = random_tensor(stream, {r1, r2});
          Tensor mx = mode_k_product(mode_k_product(f, a1, 1), a2, 2);
          Tensor g = mode_k_product(f, transpose(rot), 1);
          Tensor my = mode_k_product(mode_k_product(g, a1r, 1), a2, 2);
          sx.push_back(std::move(mx));
          sy.push_back(std::move(my));
        }
        est::ModelSpec spec;
        spec.ranks = {r1, r2};
        spec.method = est::Method::TIPUP;
        const auto ex = est::estimate(TensorSeries(std::move(sx)), spec);
        const auto ey = est::estimate(TensorSeries(std::move(sy)), spec);
        double worst = 0.0;
        for (std::size_t k = 0; k < 2; ++k)
          worst = std::max(worst, max_abs_diff(ex.projections[k], ey.projections[k]));
        return worst;
      }));

  // Scaled-down consistency trend; the acceptance suite runs the full-size
  // version of this invariant.
  {
    PropertyResult r;
    r.name = "estimators: median loss decreases with T (scaled down)";
    r.cases = 30;
    mc::ExperimentGrid grid;
    grid.T_values = {64, 256};
    grid.dim_values = {{8, 8}};
    grid.lambda_values = {4.0};
    grid.methods = {mc::parse_method_label("TIPUP", 1)};
    grid.ranks = {1, 1};
    grid.ar_coeffs = {0.6};
    grid.noise_offdiag = 0.2;
    grid.replicates = 30;
    grid.seed = 411;
    const auto records = mc::run_experiment(grid, 2);
    const double m64 = records[0].median_loss[0];
    const double m256 = records[1].median_loss[0];
    r.pass = m256 < m64;
    r.detail = "median(T=64) " + fmt(m64) + " -> median(T=256) " + fmt(m256);
    out.push_back(r);
  }

  return out;
}

std::vector<PropertyResult> dgp_suite() {
  std::vector<PropertyResult> out;

  out.push_back(bounded_check(
      "dgp: identical spec and seed give identical series", 50, 0.0,
      [](RandomStream& stream, std::size_t c) {
        dgp::DgpSpec spec;
        spec.dims = {3, 4};
        spec.ranks = {1, 2};
        spec.lambda = 2.0;
        spec.ar_coeffs = {0.5, -0.3};
        spec.noise_offdiag = 0.2;
        spec.T = 20;
        spec.seed = 1000 + c;
        const auto a = dgp::gen_series(spec);
        const auto b = dgp::gen_series(spec);
        double worst = 0.0;
        for (std::size_t t = 0; t < spec.T; ++t)
          for (std::size_t i = 0; i < a.x.slice(t).size(); ++i)
            worst = std::max(worst, std::fabs(a.x.slice(t).data()[i] -
                                              b.x.slice(t).data()[i]));
        (void)stream;
        return worst;
      }));

  out.push_back(bounded_check(
      "dgp: noise correlation does not perturb factors or loadings", 50, 0.0,
      [](RandomStream& stream, std::size_t c) {
        dgp::DgpSpec spec;
        spec.dims = {4, 3};
        spec.ranks = {1, 1};
        spec.ar_coeffs = {0.6};
        spec.T = 16;
        spec.seed = 2000 + c;
        spec.noise_offdiag = 0.0;
        const auto a = dgp::gen_series(spec);
        spec.noise_offdiag = 0.4;
        const auto b = dgp::gen_series(spec);
        double worst = 0.0;
        for (std::size_t t = 0; t < spec.T; ++t)
          for (std::size_t i = 0; i < a.truth.factors.slice(t).size(); ++i)
            worst = std::max(worst, std::fabs(a.truth.factors.slice(t).data()[i] -
                                              b.truth.factors.slice(t).data()[i]));
        for (std::size_t k = 0; k < 2; ++k)
          worst = std::max(worst, max_abs_diff(a.truth.loadings[k], b.truth.loadings[k]));
        (void)stream;
        return worst;
      }));

  {
    // Stationarity: |mean(f)| within 3 stderr, allowing the binomial share
    // of 3-sigma exceedances across the deterministic case set.
    PropertyResult r;
    r.name = "dgp: factor sample mean within 3 stderr of zero";
    r.cases = 200;
    std::size_t violations = 0;
    for (std::size_t c = 0; c < r.cases; ++c) {
      dgp::DgpSpec spec;
      spec.dims = {2};
      spec.ranks = {1};
      spec.ar_coeffs = {0.6};
      spec.T = 4000;
      spec.seed = 3000 + c;
      const TensorSeries f = dgp::gen_factor_series(spec);
      double mean = 0.0;
      for (std::size_t t = 0; t < spec.T; ++t) mean += f.slice(t).data()[0];
      mean /= static_cast<double>(spec.T);
      const double phi = 0.6;
      const double var = 1.0 / (1.0 - phi * phi);
      const double stderr_mean =
          std::sqrt(var * (1.0 + phi) / (1.0 - phi) / static_cast<double>(spec.T));
      if (std::fabs(mean) > 3.0 * stderr_mean) ++violations;
    }
    r.pass = violations <= 4;
    r.detail = std::to_string(violations) + " of 200 draws beyond 3 stderr";
    out.push_back(r);
  }

  return out;
}

std::vector<PropertyResult> diagnostics_suite() {
  std::vector<PropertyResult> out;

  out.push_back(bounded_check(
      "diagnostics: tau ladder identical via Gram and direct SVD", 200, 1e-8,
      [](RandomStream& stream, std::size_t) {
        const auto dims = random_dims(stream, 2, 4);
        const TensorSeries m = random_series(stream, dims, 7);
        double worst = 0.0;
        for (std::size_t k = 1; k <= dims.size(); ++k) {
          const Matrix top = est::topup_matrix(m, k, 1);
          const auto via_gram = spectral::singular_values(top);
          const auto direct = spectral::top_left_singular_direct(
              top, std::min(top.rows(), top.cols()));
          for (std::size_t i = 0; i < direct.singular_values.size(); ++i) {
            worst = std::max(worst, std::fabs(via_gram[i] - direct.singular_values[i]) /
                                        std::max(1.0, via_gram[0]));
          }
        }
        return worst;
      }));

  out.push_back(bounded_check(
      "diagnostics: Cauchy-Schwarz norm chain", 200, 1e-9,
      [](RandomStream& stream, std::size_t) {
        // r_k ||Theta*_{k,0}||_S >= trace(Theta*_{k,0}) and
        // trace <= r ||Theta_{k,0}||_op on generated signals.
        dgp::DgpSpec spec;
        spec.dims = {4, 3};
        spec.ranks = {1 + (stream.uniform() > 0.5 ? 1 : 0), 1};
        spec.ar_coeffs = {0.6};
        spec.noise_scale = 0.0;
        spec.lambda = 1.5;
        spec.T = 15;
        spec.seed = static_cast<std::uint64_t>(stream.uniform() * 1e9);
        const auto gen = dgp::gen_series(spec);
        const auto report = diag::theory_report(gen.x, 2, spec.ranks);
        const double r_total =
            static_cast<double>(product(spec.ranks));
        double worst = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
          const double rk = static_cast<double>(spec.ranks[k]);
          const double trace = report.rho_hat[0];  // trace(Theta*_{k,0})
          worst = std::max(worst,
                           trace - rk * report.modes[k].theta_star_spectral - 1e-9);
          worst = std::max(worst, trace - r_total * report.modes[k].theta_op - 1e-9);
        }
        return worst;
      }));

  out.push_back(bounded_check(
      "diagnostics: (1-h/T) |rho_h| <= rho_0", 200, 1e-12,
      [](RandomStream& stream, std::size_t) {
        dgp::DgpSpec spec;
        spec.dims = {3, 3};
        spec.ranks = {1, 1};
        spec.ar_coeffs = {stream.uniform(-0.9, 0.9)};
        spec.noise_scale = 0.0;
        spec.T = 12 + static_cast<std::size_t>(stream.uniform() * 20);
        spec.seed = static_cast<std::uint64_t>(stream.uniform() * 1e9);
        const auto gen = dgp::gen_series(spec);
        const std::size_t h0 = 3;
        const auto report = diag::theory_report(gen.x, h0, spec.ranks);
        const double T = static_cast<double>(spec.T);
        double worst = 0.0;
        for (std::size_t h = 1; h <= h0; ++h) {
          const double lhs = (1.0 - static_cast<double>(h) / T) *
                             std::fabs(report.rho_hat[h]);
          worst = std::max(worst, lhs - report.rho_hat[0]);
        }
        return worst;
      }));

  out.push_back(bounded_check(
      "diagnostics: theta_op matches the explicit d x d reshape", 100, 1e-8,
      [](RandomStream& stream, std::size_t) {
        const auto dims = random_dims(stream, 2, 4);
        const TensorSeries m = random_series(stream, dims, 6);
        double worst = 0.0;
        for (std::size_t k = 1; k <= dims.size(); ++k) {
          const auto report = diag::theory_report(m, 1, {});
          const double dense =
              spectral::spectral_norm(diag::theta0_reshaped(m, k));
          worst = std::max(worst, std::fabs(report.modes[k - 1].theta_op - dense) /
                                      std::max(1.0, dense));
        }
        return worst;
      }));

  return out;
}

std::vector<PropertyResult> ratefit_suite() {
  std::vector<PropertyResult> out;

  out.push_back(bounded_check(
      "ratefit: objective symmetric under block swap", 200, 0.0,
      [](RandomStream& stream, std::size_t) {
        std::vector<ratefit::RateRecord> records;
        RandomStream inner(static_cast<std::uint64_t>(stream.uniform() * 1e9));
        for (int i = 0; i < 24; ++i) {
          ratefit::RateRecord r;
          r.d1 = std::exp2(1 + static_cast<int>(inner.uniform() * 3));
          r.d2 = std::exp2(1 + static_cast<int>(inner.uniform() * 3));
          r.lambda = std::exp2(static_cast<int>(inner.uniform() * 5) - 2);
          r.T = std::exp2(3 + static_cast<int>(inner.uniform() * 4));
          r.mean_loss = 0.05 + inner.uniform();
          records.push_back(r);
        }
        std::array<double, 10> c;
        c[0] = std::exp2(inner.uniform(-1, 1));
        c[5] = std::exp2(inner.uniform(-1, 1));
        for (std::size_t p : {1, 2, 3, 4, 6, 7, 8, 9}) c[p] = inner.uniform(-2, 1);
        std::array<double, 10> swapped;
        for (std::size_t p = 0; p < 5; ++p) {
          swapped[p] = c[5 + p];
          swapped[5 + p] = c[p];
        }
        return std::fabs(ratefit::rate_model_sse(c, records) -
                         ratefit::rate_model_sse(swapped, records));
      }));

  {
    // Closing the loop: noiseless data simulated from the theoretical
    // two-term rates must reproduce the exponents.
    PropertyResult r;
    r.name = "ratefit: recovers exponents from noiseless synthetic data";
    r.cases = 3;
    double worst = 0.0;
    RandomStream stream(77);
    for (std::size_t c = 0; c < r.cases; ++c) {
      const std::array<double, 10> truth = {1.0, 0.5,  0.0, -1.0, -0.5,
                                            1.0, 0.5,  0.5, -2.0, -0.5};
      std::vector<ratefit::RateRecord> records;
      for (double ld1 : {2.0, 3.0, 4.0}) {
        for (double ld2 : {2.0, 3.0, 5.0}) {
          for (double llam : {-1.0, 0.0, 1.0, 2.0}) {
            for (double lT : {4.0, 6.0, 8.0, 10.0}) {
              ratefit::RateRecord rec;
              rec.d1 = std::exp2(ld1);
              rec.d2 = std::exp2(ld2);
              rec.lambda = std::exp2(llam);
              rec.T = std::exp2(lT);
              const double nu1 = truth[1] * ld1 + truth[2] * ld2 +
                                 truth[3] * llam + truth[4] * lT;
              const double nu2 = truth[6] * ld1 + truth[7] * ld2 +
                                 truth[8] * llam + truth[9] * lT;
              rec.mean_loss = truth[0] * std::exp2(nu1) + truth[5] * std::exp2(nu2);
              records.push_back(rec);
            }
          }
        }
      }
      const auto fit = ratefit::fit_rate_model(records);
      for (std::size_t p : {1, 2, 3, 4, 6, 7, 8, 9}) {
        worst = std::max(worst, std::fabs(fit.coefficients[p] - truth[p]));
      }
      (void)stream;
    }
    r.pass = worst <= 1e-3;
    r.detail = "worst exponent error " + fmt(worst);
    out.push_back(r);
  }

  return out;
}

std::vector<PropertyResult> postprocess_suite() {
  std::vector<PropertyResult> out;

  out.push_back(bounded_check(
      "postprocess: varimax preserves the column space", 200, 1e-10,
      [](RandomStream& stream, std::size_t) {
        const std::size_t n = 5 + static_cast<std::size_t>(stream.uniform() * 5);
        const std::size_t r = 2 + static_cast<std::size_t>(stream.uniform() * 2);
        const Matrix a = random_matrix(stream, n, r);
        const auto rotated = post::varimax(a);
        const Matrix qa = spectral::qr_orthonormal(a);
        const Matrix qb = spectral::qr_orthonormal(rotated.rotated);
        return spectral::spectral_norm(spectral::projection_from_basis(qa) -
                                       spectral::projection_from_basis(qb));
      }));

  out.push_back(bounded_check(
      "postprocess: varimax criterion never below the input's", 200, 1e-12,
      [](RandomStream& stream, std::size_t) {
        const std::size_t n = 4 + static_cast<std::size_t>(stream.uniform() * 6);
        const std::size_t r = 2 + static_cast<std::size_t>(stream.uniform() * 2);
        const Matrix a = random_matrix(stream, n, r);
        const auto rotated = post::varimax(a);
        return post::varimax_criterion(a) - rotated.criterion_value;
      }));

  out.push_back(bounded_check(
      "postprocess: moving average commutes with mode products", 200, 1e-12,
      [](RandomStream& stream, std::size_t) {
        const auto dims = random_dims(stream, 2, 4);
        const TensorSeries x = random_series(stream, dims, 8);
        const std::size_t k = 1 + static_cast<std::size_t>(stream.uniform() * dims.size());
        const Matrix a = random_matrix(stream, 3, dims[k - 1]);
        const std::size_t window = 1 + static_cast<std::size_t>(stream.uniform() * 3);

        std::vector<Tensor> mapped;
        for (std::size_t t = 0; t < x.length(); ++t)
          mapped.push_back(mode_k_product(x.slice(t), a, k));
        const TensorSeries lhs = post::moving_average(TensorSeries(std::move(mapped)), window);
        const TensorSeries ma = post::moving_average(x, window);
        double worst = 0.0;
        for (std::size_t t = 0; t < lhs.length(); ++t) {
          const Tensor rhs = mode_k_product(ma.slice(t), a, k);
          for (std::size_t i = 0; i < rhs.size(); ++i)
            worst = std::max(worst, std::fabs(lhs.slice(t).data()[i] - rhs.data()[i]));
        }
        return worst;
      }));

  return out;
}

std::vector<PropertyResult> io_runner_suite() {
  std::vector<PropertyResult> out;

  {
    PropertyResult r;
    r.name = "runner: losses bounded and worker count does not matter";
    mc::ExperimentGrid grid;
    grid.T_values = {24, 48};
    grid.dim_values = {{4, 5}};
    grid.lambda_values = {1.0, 2.0};
    grid.methods = {mc::parse_method_label("TIPUP", 1),
                    mc::parse_method_label("TOPUP", 1),
                    mc::parse_method_label("UP", 1)};
    grid.ranks = {1, 1};
    grid.ar_coeffs = {0.6};
    grid.replicates = 5;
    grid.seed = 99;
    r.cases = grid.T_values.size() * grid.lambda_values.size() * grid.replicates;

    const auto serial = mc::run_experiment(grid, 1);
    const auto parallel = mc::run_experiment(grid, 4);
    bool ok = serial.size() == parallel.size();
    double worst = 0.0;
    for (std::size_t i = 0; ok && i < serial.size(); ++i) {
      for (std::size_t rep = 0; rep < serial[i].replicates.size(); ++rep) {
        const auto& a = serial[i].replicates[rep];
        const auto& b = parallel[i].replicates[rep];
        if (a.failed != b.failed) ok = false;
        if (a.failed) continue;
        for (std::size_t k = 0; k < a.mode_loss.size(); ++k) {
          worst = std::max(worst, std::fabs(a.mode_loss[k] - b.mode_loss[k]));
          if (a.mode_loss[k] < 0.0 || a.mode_loss[k] > 2.0) ok = false;
        }
      }
    }
    r.pass = ok && worst == 0.0;
    r.detail = "serial/parallel worst diff " + fmt(worst);
    out.push_back(r);
  }

  return out;
}

std::vector<PropertyResult> all_property_suites() {
  std::vector<PropertyResult> all;
  for (auto* suite : {&tensor_core_suite, &spectral_suite, &estimator_suite,
                      &dgp_suite, &diagnostics_suite, &ratefit_suite,
                      &postprocess_suite, &io_runner_suite}) {
    auto results = (*suite)();
    all.insert(all.end(), results.begin(), results.end());
  }
  return all;
}

}  // namespace tfm::props
