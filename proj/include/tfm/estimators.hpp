#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tfm/matrix.hpp"
#include "tfm/tensor.hpp"

namespace tfm::est {

enum class Method { TOPUP, TIPUP, ITOPUP, ITIPUP, UP };

std::string to_string(Method m);

struct ModelSpec {
  std::vector<std::size_t> ranks;  // r_1..r_K
  std::size_t h0 = 1;              // positive lag window
  Method method = Method::TIPUP;
  std::size_t max_iter = 50;       // iterative methods only
  double iter_tol = 1e-6;          // projection-distance convergence
};

/// Per-mode loading-space estimate.
struct FactorEstimate {
  std::vector<Matrix> bases;                         // orthonormal U_k (d_k x r_k)
  std::vector<Matrix> projections;                   // P_k = U_k U_k^T
  std::vector<std::vector<double>> singular_ladders; // non-increasing, per mode
  TensorSeries factors;                              // r_1 x .. x r_K, length T
  Method method = Method::TIPUP;
  std::size_t h0 = 1;
  std::size_t iterations_used = 0;
  std::vector<std::string> warnings;
};

/// mat_1 of the order-5 lagged outer-product tensor: d_k x (d_{-k} d h0),
/// the h-th slab holding sum_t mat_k(X_{t-h}) (x) mat_k(X_t) / (T-h).
Matrix topup_matrix(const TensorSeries& x, std::size_t k, std::size_t h0);

/// Lagged inner-product blocks side by side: d_k x (d_k h0), the h-th block
/// holding sum_t mat_k(X_{t-h}) mat_k(X_t)^T / (T-h).
Matrix tipup_matrix(const TensorSeries& x, std::size_t k, std::size_t h0);

/// Gram matrix of topup_matrix (d_k x d_k), accumulated lag block by lag
/// block without materializing the wide matrix. Used automatically for
/// large d; equals gram(topup_matrix(..)) up to roundoff.
Matrix topup_gram(const TensorSeries& x, std::size_t k, std::size_t h0);

/// Fits the requested method. Dispatches to estimate_iterative for the
/// iterative methods.
FactorEstimate estimate(const TensorSeries& x, const ModelSpec& spec);

/// iTOPUP / iTIPUP: start from the one-pass estimate, then cyclically
/// re-estimate each mode from the series compressed by the other modes'
/// current bases until the largest per-mode projection change drops below
/// spec.iter_tol or spec.max_iter cycles are exhausted.
FactorEstimate estimate_iterative(const TensorSeries& x, const ModelSpec& spec);

/// M_t = F_t x_k U_k = X_t x_k P_k.
TensorSeries reconstruct_signal(const FactorEstimate& estimate);

struct RankSelection {
  std::vector<std::size_t> ranks;
  bool flagged = false;           // no pronounced spectral gap; unreliable
  std::vector<std::string> notes;
};

/// Eigenvalue-ratio heuristic on each mode's singular ladder:
/// r_k = argmax_{1<=m<=d_k/2} ladder[m] / ladder[m+1]. This procedure is
/// not part of the estimation theory; treat the result as a starting point.
RankSelection select_ranks(const TensorSeries& x, std::size_t h0, Method method);

}  // namespace tfm::est
