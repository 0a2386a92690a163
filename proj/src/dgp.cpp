#include "tfm/dgp.hpp"

#include <cmath>
#include <string>

#include "tfm/error.hpp"
#include "tfm/kernels.hpp"
#include "tfm/rng.hpp"
#include "tfm/spectral.hpp"

namespace tfm::dgp {
namespace {

// Stream tags: loadings, factors and noise draw from separate sub-streams,
// so e.g. changing the noise correlation leaves the factor path untouched.
constexpr std::uint64_t kLoadingTag = 1;
constexpr std::uint64_t kFactorTag = 2;
constexpr std::uint64_t kNoiseTag = 3;

constexpr std::size_t kBurnIn = 200;

}  // namespace

void validate(const DgpSpec& spec) {
  if (spec.dims.empty()) throw DimensionError("dgp: dims must have order K >= 1");
  if (spec.ranks.size() != spec.dims.size()) {
    throw DimensionError("dgp: ranks and dims must have the same order");
  }
  for (std::size_t k = 0; k < spec.dims.size(); ++k) {
    if (spec.dims[k] == 0) throw DimensionError("dgp: dims must be positive");
    if (spec.ranks[k] < 1 || spec.ranks[k] > spec.dims[k]) {
      throw RankError("dgp: rank r_" + std::to_string(k + 1) + " outside 1..d_" +
                      std::to_string(k + 1));
    }
  }
  if (spec.T < 1) throw DimensionError("dgp: T must be >= 1");
  if (spec.lambda < 0.0) throw DataError("dgp: lambda must be >= 0");
  if (spec.noise_scale < 0.0) throw DataError("dgp: noise_scale must be >= 0");
  if (spec.noise_offdiag < 0.0 || spec.noise_offdiag >= 1.0) {
    throw DataError("dgp: noise_offdiag must lie in [0, 1)");
  }
  if (spec.ar_coeffs.empty()) throw DataError("dgp: ar_coeffs must not be empty");
  const std::size_t r = product(spec.ranks);
  if (spec.ar_coeffs.size() != 1 && spec.ar_coeffs.size() != r) {
    throw DataError("dgp: ar_coeffs must have 1 or " + std::to_string(r) + " entries");
  }
  for (double phi : spec.ar_coeffs) {
    if (!(std::fabs(phi) < 1.0)) throw DataError("dgp: AR coefficients must satisfy |phi| < 1");
  }
}

double ar_coeff_for(const DgpSpec& spec, std::size_t factor_index) {
  return spec.ar_coeffs.size() == 1 ? spec.ar_coeffs.front()
                                    : spec.ar_coeffs[factor_index];
}

Matrix equicorrelated(std::size_t n, double rho) {
  Matrix psi(n, n, rho);
  for (std::size_t i = 0; i < n; ++i) psi(i, i) = 1.0;
  return psi;
}

std::vector<Matrix> gen_loadings(const DgpSpec& spec) {
  validate(spec);
  std::vector<Matrix> loadings;
  loadings.reserve(spec.dims.size());
  for (std::size_t k = 0; k < spec.dims.size(); ++k) {
    rng::RandomStream stream(rng::substream(spec.seed, kLoadingTag, k + 1));
    Matrix a(spec.dims[k], spec.ranks[k]);
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) = stream.normal();
    const bool use_qr =
        spec.loading_mode == LoadingMode::Orthonormal || spec.ranks[k] > 1;
    if (use_qr) {
      a = spectral::qr_orthonormal(a);
    } else {
      double nn = std::sqrt(kernels::active().sum_sq(a.col(0), a.rows()));
      if (nn < 1e-300) throw NumericError("dgp: degenerate loading draw");
      kernels::active().scale(1.0 / nn, a.col(0), a.rows());
    }
    loadings.push_back(std::move(a));
  }
  return loadings;
}

TensorSeries gen_factor_series(const DgpSpec& spec) {
  validate(spec);
  const std::size_t r = product(spec.ranks);
  TensorSeries factors(spec.ranks, spec.T);
  for (std::size_t i = 0; i < r; ++i) {
    rng::RandomStream stream(rng::substream(spec.seed, kFactorTag, i + 1));
    const double phi = ar_coeff_for(spec, i);
    double f = stream.normal() / std::sqrt(1.0 - phi * phi);  // stationary start
    for (std::size_t b = 0; b < kBurnIn; ++b) f = phi * f + stream.normal();
    for (std::size_t t = 0; t < spec.T; ++t) {
      f = phi * f + stream.normal();
      factors.slice(t).data()[i] = f;
    }
  }
  return factors;
}

TensorSeries gen_noise_series(const DgpSpec& spec) {
  validate(spec);
  rng::RandomStream stream(rng::substream(spec.seed, kNoiseTag));
  const std::size_t d = product(spec.dims);
  const bool correlated = spec.noise_offdiag != 0.0;
  std::vector<Matrix> roots;
  if (correlated) {
    roots.reserve(spec.dims.size());
    for (std::size_t dk : spec.dims)
      roots.push_back(spectral::sym_sqrt(equicorrelated(dk, spec.noise_offdiag)));
  }
  TensorSeries noise(spec.dims, spec.T);
  for (std::size_t t = 0; t < spec.T; ++t) {
    Tensor z(spec.dims);
    for (std::size_t i = 0; i < d; ++i) z.data()[i] = stream.normal();
    if (correlated) {
      for (std::size_t k = 0; k < spec.dims.size(); ++k) {
        z = mode_k_product(z, roots[k], k + 1);
      }
    }
    noise.slice(t) = std::move(z);
  }
  return noise;
}

GeneratedSeries gen_series(const DgpSpec& spec) {
  validate(spec);
  GeneratedSeries out;
  out.truth.loadings = gen_loadings(spec);
  out.truth.factors = gen_factor_series(spec);
  out.truth.projections.reserve(out.truth.loadings.size());
  for (const Matrix& a : out.truth.loadings) {
    // Columns are unit-norm or orthonormal by construction; the projection
    // onto span(A_k) goes through QR to cover the unit-norm multi-rank case.
    const Matrix q = (a.cols() == 1) ? a : spectral::qr_orthonormal(a);
    out.truth.projections.push_back(matmul_nt(q, q));
  }

  std::vector<Tensor> slices;
  slices.reserve(spec.T);
  const bool with_noise = spec.noise_scale > 0.0;
  TensorSeries noise = with_noise ? gen_noise_series(spec) : TensorSeries();
  for (std::size_t t = 0; t < spec.T; ++t) {
    Tensor m = out.truth.factors.slice(t);
    for (std::size_t k = 0; k < spec.dims.size(); ++k) {
      m = mode_k_product(m, out.truth.loadings[k], k + 1);
    }
    kernels::active().scale(spec.lambda, m.data(), m.size());
    if (with_noise) {
      kernels::active().axpy(spec.noise_scale, noise.slice(t).data(), m.data(),
                             m.size());
    }
    slices.push_back(std::move(m));
  }
  out.x = TensorSeries(std::move(slices));
  return out;
}

}  // namespace tfm::dgp
