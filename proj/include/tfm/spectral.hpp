#pragma once

#include <cstddef>
#include <vector>

#include "tfm/matrix.hpp"

namespace tfm::spectral {

/// Truncated left singular subspace.
struct SvdResult {
  Matrix left_vectors;                  // n x count, orthonormal columns
  std::vector<double> singular_values;  // length count, non-increasing
};

/// Full eigendecomposition of a symmetric matrix (cyclic Jacobi).
/// Eigenvalues sorted non-increasing; vectors form the matching columns.
struct EigResult {
  Matrix vectors;
  std::vector<double> values;
};

EigResult sym_eig(const Matrix& a);

/// First `count` left singular vectors and values of m (n x p).
/// Picks the Gram route (eigendecomposition of m m^T) when p >= n and the
/// direct one-sided Jacobi route otherwise; both are exposed below and
/// agree in subspace.
SvdResult top_left_singular(const Matrix& m, std::size_t count);

SvdResult top_left_singular_gram(const Matrix& m, std::size_t count);
SvdResult top_left_singular_direct(const Matrix& m, std::size_t count);

/// All singular values of m, non-increasing, length min(n, p).
std::vector<double> singular_values(const Matrix& m);

/// P = U U^T for orthonormal U; throws tfm::BasisError if U^T U deviates
/// from the identity by more than 1e-8.
Matrix projection_from_basis(const Matrix& u);

/// Largest singular value by power iteration on m^T m, tolerance 1e-10,
/// deterministic start. Falls back to a dense decomposition when the
/// iteration stalls on a tight spectral gap.
double spectral_norm(const Matrix& m);

/// Thin Householder QR: returns Q (n x k) with orthonormal columns and the
/// sign convention diag(R) >= 0, for a full-column-rank input.
Matrix qr_orthonormal(const Matrix& a);

/// Symmetric square root of a positive semi-definite matrix.
Matrix sym_sqrt(const Matrix& a);

/// Solves A x = b for symmetric positive definite A (Cholesky).
std::vector<double> solve_spd(Matrix a, std::vector<double> b);

/// Deterministic sign fix: flips each column so its first entry of
/// non-negligible magnitude is positive.
void canonicalize_column_signs(Matrix& u);

}  // namespace tfm::spectral
