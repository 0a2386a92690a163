#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tfm/estimators.hpp"

namespace tfm::ratefit {

/// One grid cell: configuration plus the replicate-averaged loss.
struct RateRecord {
  double d1 = 0.0;
  double d2 = 0.0;
  double lambda = 0.0;
  double T = 0.0;
  double mean_loss = 0.0;
};

/// Fit of log2(L) ~ log2(c1 2^{nu1} + c6 2^{nu2}) with
/// nu1 = c2 log2 d1 + c3 log2 d2 + c4 log2 lambda + c5 log2 T and nu2 the
/// analogue with c7..c10.
struct RateFitResult {
  std::array<double, 10> coefficients{};  // c1..c10
  double residual_sse = 0.0;
  std::size_t iterations = 0;  // of the winning start
  bool converged = false;
};

/// Damped Gauss-Newton over multiple deterministic starts (the theoretical
/// exponent vectors among them); c1 and c6 are kept positive by optimizing
/// their log2. The result is canonicalized so that c4 >= c9.
RateFitResult fit_rate_model(const std::vector<RateRecord>& records);

/// Residual sum of squares of the model at the given coefficients.
double rate_model_sse(const std::array<double, 10>& coefficients,
                      const std::vector<RateRecord>& records);

struct SurfaceRow {
  double x = 0.0;  // log2 of the first predicted-rate component
  double y = 0.0;  // log2 of the second
  double z = 0.0;  // log2 mean loss (averaged over coincident (x, y))
  std::size_t count = 0;
};

/// Flat (x, y, z) table for external surface plotting; records sharing an
/// (x, y) point are averaged into one row. Rows sorted by (x, y).
std::vector<SurfaceRow> emit_rate_surface(const std::vector<RateRecord>& records,
                                          est::Method method);

}  // namespace tfm::ratefit
