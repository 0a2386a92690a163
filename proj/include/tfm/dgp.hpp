#pragma once

#include <cstdint>
#include <vector>

#include "tfm/matrix.hpp"
#include "tfm/tensor.hpp"

namespace tfm::dgp {

enum class LoadingMode {
  GaussianNormalized,  // iid N(0,1), unit-norm columns; QR when r_k > 1
  Orthonormal,         // iid N(0,1), orthonormalized through QR
};

/// Simulation configuration for the rank-one and multi-rank factor models:
/// X_t = lambda (F_t x_1 A_1 .. x_K A_K) + E_t with independent AR(1)
/// factor entries and Kronecker-structured equicorrelated noise.
struct DgpSpec {
  std::vector<std::size_t> dims;    // d_1..d_K
  std::vector<std::size_t> ranks;   // r_1..r_K
  double lambda = 1.0;              // signal strength (0 gives pure noise)
  std::vector<double> ar_coeffs;    // per factor entry, canonical vec order;
                                    // a single value is broadcast
  double noise_offdiag = 0.0;       // rho of the equicorrelated Psi_k
  double noise_scale = 1.0;         // 0 gives a noise-free series
  std::size_t T = 100;
  std::uint64_t seed = 0;
  LoadingMode loading_mode = LoadingMode::GaussianNormalized;
};

void validate(const DgpSpec& spec);

struct DgpTruth {
  std::vector<Matrix> loadings;     // A_k, unit-norm or orthonormal columns
  std::vector<Matrix> projections;  // projections onto span(A_k)
  TensorSeries factors;             // F_t, shape r_1..r_K
};

struct GeneratedSeries {
  TensorSeries x;
  DgpTruth truth;
};

std::vector<Matrix> gen_loadings(const DgpSpec& spec);

/// Independent AR(1) per factor entry, started from the stationary
/// distribution with a 200-step burn-in.
TensorSeries gen_factor_series(const DgpSpec& spec);

/// E_t = Z_t x_k Psi_k^{1/2}, Z_t iid standard normal, independent over t.
TensorSeries gen_noise_series(const DgpSpec& spec);

GeneratedSeries gen_series(const DgpSpec& spec);

/// diag 1, off-diagonal rho.
Matrix equicorrelated(std::size_t n, double rho);

/// AR coefficient for the flat factor index; applies the broadcast rule.
double ar_coeff_for(const DgpSpec& spec, std::size_t factor_index);

}  // namespace tfm::dgp
