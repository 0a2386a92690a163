#include "tfm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfm/error.hpp"
#include "tfm/kernels.hpp"
#include "tfm/spectral.hpp"

namespace tfm::diag {
namespace {

constexpr std::size_t kMaterializeLimit = 1000;

std::vector<double> topup_ladder(const TensorSeries& m, std::size_t k, std::size_t h0) {
  const Matrix w = (product(m.shape()) <= kMaterializeLimit)
                       ? gram(est::topup_matrix(m, k, h0))
                       : est::topup_gram(m, k, h0);
  auto eig = spectral::sym_eig(w);
  std::vector<double> ladder(eig.values.size());
  for (std::size_t i = 0; i < ladder.size(); ++i)
    ladder[i] = std::sqrt(std::max(0.0, eig.values[i]));
  return ladder;
}

std::size_t infer_rank(const std::vector<double>& ladder) {
  if (ladder.empty() || ladder.front() <= 0.0) return 1;
  std::size_t r = 0;
  for (double v : ladder) {
    if (v > 1e-8 * ladder.front()) ++r;
  }
  return std::max<std::size_t>(r, 1);
}

}  // namespace

TheoryReport theory_report(const TensorSeries& signal, std::size_t h0,
                           std::vector<std::size_t> ranks) {
  const std::size_t T = signal.length();
  if (h0 < 1) throw LagError("theory_report: h0 must be >= 1");
  if (h0 >= T) throw LagError("theory_report: h0 must be < T");
  const std::size_t K = signal.order();
  if (!ranks.empty() && ranks.size() != K) {
    throw DimensionError("theory_report: rank vector order mismatch");
  }

  TheoryReport report;
  report.h0 = h0;

  report.rho_hat.resize(h0 + 1, 0.0);
  const auto& ops = kernels::active();
  for (std::size_t h = 0; h <= h0; ++h) {
    double acc = 0.0;
    for (std::size_t t = h; t < T; ++t) {
      acc += ops.dot(signal.slice(t - h).data(), signal.slice(t).data(),
                     signal.slice(t).size());
    }
    report.rho_hat[h] = acc / static_cast<double>(T - h);
  }

  const bool zero_signal = signal.frobenius_norm() == 0.0;
  report.modes.resize(K);
  report.ranks.resize(K, 1);
  for (std::size_t k = 1; k <= K; ++k) {
    ModeReport& mode = report.modes[k - 1];
    const std::size_t dk = signal.shape()[k - 1];

    if (zero_signal) {
      mode.tau.assign(dk, 0.0);
      mode.tau_star.assign(dk, 0.0);
      if (!ranks.empty()) report.ranks[k - 1] = ranks[k - 1];
      continue;
    }

    // Theta*_{k,0}: contemporaneous inner-product moment, d_k x d_k.
    Matrix theta_star0(dk, dk);
    for (std::size_t t = 0; t < T; ++t) {
      const Matrix u = mode_k_unfold(signal.slice(t), k);
      ops.gemm_nt(u.data(), dk, u.data(), dk, theta_star0.data(), dk, dk, dk,
                  u.cols());
    }
    ops.scale(1.0 / static_cast<double>(T), theta_star0.data(), theta_star0.size());
    mode.theta_star_spectral = spectral::spectral_norm(theta_star0);

    // ||Theta_{k,0}||_op equals sigma_max(G)^2 / T for the d x T matrix G
    // whose columns are vec(mat_k(M_t)); the d x d reshape is never formed.
    {
      const std::size_t d = product(signal.shape());
      Matrix g(d, T);
      for (std::size_t t = 0; t < T; ++t) {
        const Matrix u = mode_k_unfold(signal.slice(t), k);
        std::copy(u.data(), u.data() + d, g.col(t));
      }
      const double smax = spectral::spectral_norm(g);
      mode.theta_op = smax * smax / static_cast<double>(T);
    }

    mode.tau = topup_ladder(signal, k, h0);
    mode.tau_star = spectral::singular_values(est::tipup_matrix(signal, k, h0));

    const std::size_t rk = ranks.empty() ? infer_rank(mode.tau) : ranks[k - 1];
    if (rk < 1 || rk > mode.tau.size()) {
      throw RankError("theory_report: rank out of range for mode " + std::to_string(k));
    }
    report.ranks[k - 1] = rk;
    const double root_h0 = std::sqrt(static_cast<double>(h0));
    mode.lambda_k = std::sqrt(mode.tau[rk - 1] / root_h0);
    mode.lambda_k_star = std::sqrt(mode.tau_star[rk - 1] / root_h0);
  }
  return report;
}

Matrix theta0_reshaped(const TensorSeries& signal, std::size_t k) {
  const std::size_t d = product(signal.shape());
  Matrix theta(d, d);
  const auto& ops = kernels::active();
  for (std::size_t t = 0; t < signal.length(); ++t) {
    const Matrix u = mode_k_unfold(signal.slice(t), k);
    ops.ger(1.0 / static_cast<double>(signal.length()), u.data(), u.data(),
            theta.data(), d, d, d);
  }
  return theta;
}

double loss_sine(const std::vector<double>& u_hat, const std::vector<double>& u) {
  if (u_hat.size() != u.size()) throw DimensionError("loss_sine: length mismatch");
  const double dot = kernels::active().dot(u_hat.data(), u.data(), u.size());
  const double c = std::clamp(dot, -1.0, 1.0);
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

double loss_projection(const Matrix& p_hat, const Matrix& p) {
  if (!p_hat.same_shape(p)) throw DimensionError("loss_projection: shape mismatch");
  return spectral::spectral_norm(p_hat - p);
}

RatePair predicted_rate(est::Method method, double d1, double d2, double lambda,
                        double T) {
  if (method == est::Method::ITOPUP) method = est::Method::TOPUP;
  if (method == est::Method::ITIPUP) method = est::Method::TIPUP;
  if (!(d1 > 0) || !(d2 > 0) || !(lambda > 0) || !(T > 0)) {
    throw DataError("predicted_rate: d1, d2, lambda, T must be positive");
  }
  const double rt = std::sqrt(T);
  RatePair rate;
  switch (method) {
    case est::Method::TIPUP:
      rate.term1 = std::sqrt(d1) / (rt * lambda);
      rate.term2 = std::sqrt(d1 * d2) / (rt * lambda * lambda);
      break;
    case est::Method::TOPUP:
      rate.term1 = std::sqrt(d1 * d2) / (rt * lambda);
      rate.term2 = std::sqrt(d1 * d2 * d2) / (rt * lambda * lambda);
      break;
    default:
      throw UsageError("predicted_rate: defined for TOPUP and TIPUP only");
  }
  return rate;
}

}  // namespace tfm::diag
