#pragma once

#include <cstddef>
#include <vector>

#include "tfm/estimators.hpp"
#include "tfm/matrix.hpp"
#include "tfm/tensor.hpp"

namespace tfm::diag {

/// Signal-strength quantities of one mode, computed on a signal series.
struct ModeReport {
  double theta_star_spectral = 0.0;  // spectral norm of Theta*_{k,0}
  double theta_op = 0.0;             // operator norm of Theta_{k,0}
  std::vector<double> tau;           // singular ladder, outer-product matrix
  std::vector<double> tau_star;      // singular ladder, inner-product matrix
  double lambda_k = 0.0;             // sqrt(tau[r_k] / sqrt(h0))
  double lambda_k_star = 0.0;        // sqrt(tau_star[r_k] / sqrt(h0))
};

struct TheoryReport {
  std::vector<ModeReport> modes;
  /// rho_hat[h] = sum_t <M_{t-h}, M_t>_F / (T-h) for h = 0..h0. In the
  /// one-factor model with unit loadings this is lambda^2 times the factor
  /// autocovariance.
  std::vector<double> rho_hat;
  std::vector<std::size_t> ranks;
  std::size_t h0 = 1;
};

/// Computes the report on a signal series M_t (noise-free by intent; pass
/// observed data only when an empirical reading is explicitly wanted).
/// Ranks pick the ladder entry defining lambda_k; when empty they are
/// inferred from the numerical rank of the outer-product ladder.
TheoryReport theory_report(const TensorSeries& signal, std::size_t h0,
                           std::vector<std::size_t> ranks = {});

/// The d x d reshape of the 4-tensor Theta_{k,0}, rows and columns indexed
/// by the canonical flat order of the (i, j) pairs of mat_k. Exposed for
/// verification; theory_report evaluates its spectral norm without forming
/// it.
Matrix theta0_reshaped(const TensorSeries& signal, std::size_t k);

/// sqrt(1 - (u_hat . u)^2) for unit vectors; equals the projection
/// distance of the associated rank-one projections.
double loss_sine(const std::vector<double>& u_hat, const std::vector<double>& u);

/// Spectral norm of the difference of two projection matrices.
double loss_projection(const Matrix& p_hat, const Matrix& p);

struct RatePair {
  double term1 = 0.0;
  double term2 = 0.0;
};

/// The two theoretical error-rate components for estimating the mode-1
/// loading of a d1 x d2 rank-one series; used as regression axes for the
/// rate surfaces.
RatePair predicted_rate(est::Method method, double d1, double d2, double lambda,
                        double T);

}  // namespace tfm::diag
