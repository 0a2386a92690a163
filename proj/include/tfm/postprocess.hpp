#pragma once

#include <cstddef>
#include <vector>

#include "tfm/matrix.hpp"
#include "tfm/tensor.hpp"

namespace tfm::post {

struct RotatedLoading {
  Matrix rotated;          // original * rotation
  Matrix rotation;         // orthogonal r x r
  double criterion_value;  // varimax criterion attained
  std::size_t sweeps;
};

/// Varimax criterion: sum over columns of the variance of the squared
/// loadings.
double varimax_criterion(const Matrix& a);

/// Kaiser pairwise-rotation varimax. Raw criterion by default; set
/// kaiser_normalize to rescale rows to unit communality during rotation.
/// Column signs are canonicalized afterwards (largest-magnitude entry made
/// positive) with the flips folded into the rotation. A single-column
/// input comes back unchanged.
RotatedLoading varimax(const Matrix& a, double tol = 1e-10,
                       std::size_t max_sweeps = 1000, bool kaiser_normalize = false);

struct NormalizedColumns {
  Matrix values;
  std::vector<bool> skipped;  // columns whose sum was below 1e-12 in magnitude
};

/// Divides each column by its sum so columns sum to one; near-zero-sum
/// columns are left unchanged and flagged.
NormalizedColumns normalize_columns(const Matrix& a);

/// Slice t of the result is the mean of input slices t..t+window-1.
TensorSeries moving_average(const TensorSeries& x, std::size_t window);

/// Display helpers for loading tables: entries scaled and truncated toward
/// zero (the scaled-integer convention), or multiplied by 100.
Matrix scaled_integer_display(const Matrix& a, double scale = 30.0);
Matrix percentage_display(const Matrix& a);

}  // namespace tfm::post
