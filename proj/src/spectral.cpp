#include "tfm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "tfm/error.hpp"
#include "tfm/kernels.hpp"

namespace tfm::spectral {
namespace {

constexpr int kMaxJacobiSweeps = 64;
constexpr double kPowerIterTol = 1e-10;
constexpr int kPowerIterMax = 20000;
// Fixed stream for the power-iteration start vector: runs are reproducible.
constexpr std::uint64_t kPowerIterSeed = 0x5eedc0de2024ull;

void check_finite(const Matrix& m, const char* who) {
  if (!all_finite(m)) throw NumericError(std::string(who) + ": non-finite entries");
}

// One cyclic Jacobi sweep over the upper triangle of a; rotations applied
// symmetrically and accumulated into v.
double jacobi_sweep(Matrix& a, Matrix& v) {
  const std::size_t n = a.rows();
  double off = 0.0;
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double apq = a(p, q);
      off = std::max(off, std::fabs(apq));
      if (apq == 0.0) continue;
      const double app = a(p, p);
      const double aqq = a(q, q);
      const double theta = 0.5 * (aqq - app) / apq;
      const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      for (std::size_t i = 0; i < n; ++i) {
        const double aip = a(i, p);
        const double aiq = a(i, q);
        a(i, p) = c * aip - s * aiq;
        a(i, q) = s * aip + c * aiq;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double apj = a(p, j);
        const double aqj = a(q, j);
        a(p, j) = c * apj - s * aqj;
        a(q, j) = s * apj + c * aqj;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double vip = v(i, p);
        const double viq = v(i, q);
        v(i, p) = c * vip - s * viq;
        v(i, q) = s * vip + c * viq;
      }
    }
  }
  return off;
}

std::vector<std::size_t> order_desc(const std::vector<double>& vals) {
  std::vector<std::size_t> idx(vals.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  return idx;
}

SvdResult take_top(const Matrix& vectors, const std::vector<double>& values,
                   std::size_t count) {
  const auto idx = order_desc(values);
  SvdResult r;
  r.left_vectors = Matrix(vectors.rows(), count);
  r.singular_values.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t src = idx[j];
    r.singular_values[j] = values[src];
    for (std::size_t i = 0; i < vectors.rows(); ++i)
      r.left_vectors(i, j) = vectors(i, src);
  }
  canonicalize_column_signs(r.left_vectors);
  return r;
}

// One-sided Jacobi on the columns of b, accumulating the applied rotations
// into w (square, initialized to identity). On return the columns of b are
// mutually orthogonal and b_in * w = b_out.
void one_sided_jacobi(Matrix& b, Matrix& w) {
  const std::size_t n = b.cols();
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const auto& ops = kernels::active();
        const double app = ops.sum_sq(b.col(p), b.rows());
        const double aqq = ops.sum_sq(b.col(q), b.rows());
        const double apq = ops.dot(b.col(p), b.col(q), b.rows());
        if (std::fabs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < b.rows(); ++i) {
          const double bip = b(i, p);
          const double biq = b(i, q);
          b(i, p) = c * bip - s * biq;
          b(i, q) = s * bip + c * biq;
        }
        for (std::size_t i = 0; i < w.rows(); ++i) {
          const double wip = w(i, p);
          const double wiq = w(i, q);
          w(i, p) = c * wip - s * wiq;
          w(i, q) = s * wip + c * wiq;
        }
      }
    }
    if (!rotated) break;
  }
}

// Completes columns [have, want) of u to an orthonormal set (deterministic
// Gram-Schmidt over seeded draws). Only reached for rank-deficient inputs.
void complete_basis(Matrix& u, std::size_t have, std::size_t want) {
  std::mt19937_64 rng(kPowerIterSeed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const std::size_t n = u.rows();
  for (std::size_t j = have; j < want; ++j) {
    std::vector<double> v(n);
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) v[i] = unif(rng);
      for (std::size_t p = 0; p < j; ++p) {
        const double proj = kernels::active().dot(u.col(p), v.data(), n);
        kernels::active().axpy(-proj, u.col(p), v.data(), n);
      }
      const double nn = norm2(v);
      if (nn > 1e-8) {
        kernels::active().scale(1.0 / nn, v.data(), n);
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) u(i, j) = v[i];
  }
}

void check_count(const Matrix& m, std::size_t count) {
  const std::size_t cap = std::min(m.rows(), m.cols());
  if (count < 1 || count > cap) {
    throw RankError("singular vector count " + std::to_string(count) +
                    " out of range 1.." + std::to_string(cap));
  }
}

}  // namespace

EigResult sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("sym_eig: matrix not square");
  check_finite(a, "sym_eig");
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix v = Matrix::identity(n);
  const double scale = std::max(1.0, max_abs(work));
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    const double off = jacobi_sweep(work, v);
    if (off <= 1e-15 * scale) break;
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = work(i, i);
  const auto idx = order_desc(values);
  EigResult r;
  r.vectors = Matrix(n, n);
  r.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    r.values[j] = values[idx[j]];
    for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = v(i, idx[j]);
  }
  return r;
}

SvdResult top_left_singular_gram(const Matrix& m, std::size_t count) {
  check_count(m, count);
  check_finite(m, "top_left_singular");
  const EigResult eig = sym_eig(gram(m));
  SvdResult r;
  r.left_vectors = Matrix(m.rows(), count);
  r.singular_values.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    r.singular_values[j] = std::sqrt(std::max(0.0, eig.values[j]));
    for (std::size_t i = 0; i < m.rows(); ++i) r.left_vectors(i, j) = eig.vectors(i, j);
  }
  canonicalize_column_signs(r.left_vectors);
  return r;
}

SvdResult top_left_singular_direct(const Matrix& m, std::size_t count) {
  check_count(m, count);
  check_finite(m, "top_left_singular");
  const std::size_t n = m.rows();
  const std::size_t p = m.cols();
  if (n <= p) {
    // Orthogonalize the columns of m^T; the accumulated rotations are the
    // left singular vectors of m.
    Matrix b = transpose(m);
    Matrix w = Matrix::identity(n);
    one_sided_jacobi(b, w);
    std::vector<double> values(n);
    for (std::size_t j = 0; j < n; ++j)
      values[j] = std::sqrt(kernels::active().sum_sq(b.col(j), b.rows()));
    return take_top(w, values, count);
  }
  // Tall case: orthogonalize the columns of m directly.
  Matrix b = m;
  Matrix w = Matrix::identity(p);
  one_sided_jacobi(b, w);
  std::vector<double> values(p);
  for (std::size_t j = 0; j < p; ++j)
    values[j] = std::sqrt(kernels::active().sum_sq(b.col(j), b.rows()));
  const auto idx = order_desc(values);
  SvdResult r;
  r.left_vectors = Matrix(n, count);
  r.singular_values.resize(count);
  std::size_t filled = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t src = idx[j];
    r.singular_values[j] = values[src];
    if (values[src] > 1e-300) {
      for (std::size_t i = 0; i < n; ++i)
        r.left_vectors(i, j) = b(i, src) / values[src];
      filled = j + 1;
    }
  }
  if (filled < count) complete_basis(r.left_vectors, filled, count);
  canonicalize_column_signs(r.left_vectors);
  return r;
}

SvdResult top_left_singular(const Matrix& m, std::size_t count) {
  // The estimator matrices are short and wide (d_k rows, up to d^2 h_0 / d_k
  // columns); the small Gram eigenproblem is the cheap route there.
  if (m.cols() >= m.rows()) return top_left_singular_gram(m, count);
  return top_left_singular_direct(m, count);
}

std::vector<double> singular_values(const Matrix& m) {
  check_finite(m, "singular_values");
  const bool wide = m.cols() >= m.rows();
  const Matrix g = wide ? gram(m) : matmul_tn(m, m);
  EigResult eig = sym_eig(g);
  std::vector<double> values(eig.values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = std::sqrt(std::max(0.0, eig.values[i]));
  return values;
}

Matrix projection_from_basis(const Matrix& u) {
  const Matrix gtg = matmul_tn(u, u);
  const Matrix eye = Matrix::identity(u.cols());
  if (max_abs_diff(gtg, eye) > 1e-8) {
    throw BasisError("projection_from_basis: columns are not orthonormal");
  }
  return matmul_nt(u, u);
}

double spectral_norm(const Matrix& m) {
  check_finite(m, "spectral_norm");
  if (m.size() == 0) return 0.0;
  const double fro = frobenius_norm(m);
  if (fro == 0.0) return 0.0;

  // Power iteration on the smaller Gram side, applied matrix-free.
  const bool wide = m.cols() >= m.rows();
  const std::size_t n = wide ? m.rows() : m.cols();
  std::mt19937_64 rng(kPowerIterSeed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = unif(rng);
  normalize(v);

  double sigma = 0.0;
  for (int iter = 0; iter < kPowerIterMax; ++iter) {
    std::vector<double> w = wide ? matvec(m, matvec_t(m, v)) : matvec_t(m, matvec(m, v));
    const double wn = norm2(w);
    if (wn == 0.0) {
      // v landed in the null space; restart deterministically.
      for (std::size_t i = 0; i < n; ++i) v[i] = unif(rng);
      normalize(v);
      continue;
    }
    const double sigma_new = std::sqrt(wn);
    kernels::active().scale(1.0 / wn, w.data(), w.size());
    v = std::move(w);
    if (std::fabs(sigma_new - sigma) <= kPowerIterTol * std::max(1.0, sigma_new)) {
      return sigma_new;
    }
    sigma = sigma_new;
  }
  // Tight gap between the top singular values: fall back to the dense route
  // when feasible, otherwise report the power-iteration estimate.
  if (n <= 2048) {
    const auto values = singular_values(m);
    return values.empty() ? 0.0 : values.front();
  }
  return sigma;
}

Matrix qr_orthonormal(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  if (k > n) throw DimensionError("qr_orthonormal: more columns than rows");
  check_finite(a, "qr_orthonormal");

  Matrix r = a;
  std::vector<std::vector<double>> reflectors;
  std::vector<double> diag(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> h(n, 0.0);
    double nn = 0.0;
    for (std::size_t i = j; i < n; ++i) {
      h[i] = r(i, j);
      nn += h[i] * h[i];
    }
    nn = std::sqrt(nn);
    if (nn < 1e-300) throw NumericError("qr_orthonormal: rank-deficient input");
    if (h[j] < 0.0) nn = -nn;
    h[j] += nn;
    double hn = 0.0;
    for (std::size_t i = j; i < n; ++i) hn += h[i] * h[i];
    hn = std::sqrt(hn);
    for (std::size_t i = j; i < n; ++i) h[i] /= hn;
    for (std::size_t c = j; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = j; i < n; ++i) proj += h[i] * r(i, c);
      for (std::size_t i = j; i < n; ++i) r(i, c) -= 2.0 * proj * h[i];
    }
    diag[j] = r(j, j);
    reflectors.push_back(std::move(h));
  }

  // Q = H_0 ... H_{k-1} applied to the first k identity columns.
  Matrix q(n, k);
  for (std::size_t j = 0; j < k; ++j) q(j, j) = 1.0;
  for (std::size_t jr = k; jr-- > 0;) {
    const auto& h = reflectors[jr];
    for (std::size_t c = 0; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = jr; i < n; ++i) proj += h[i] * q(i, c);
      for (std::size_t i = jr; i < n; ++i) q(i, c) -= 2.0 * proj * h[i];
    }
  }
  // Sign convention: diag(R) >= 0.
  for (std::size_t j = 0; j < k; ++j) {
    if (diag[j] < 0.0)
      for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
  }
  return q;
}

Matrix sym_sqrt(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("sym_sqrt: matrix not square");
  const EigResult eig = sym_eig(a);
  const std::size_t n = a.rows();
  Matrix scaled = eig.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    if (eig.values[j] < -1e-10 * std::max(1.0, std::fabs(eig.values[0]))) {
      throw NumericError("sym_sqrt: matrix is not positive semi-definite");
    }
    const double s = std::sqrt(std::max(0.0, eig.values[j]));
    kernels::active().scale(s, scaled.col(j), n);
  }
  return matmul_nt(scaled, eig.vectors);
}

std::vector<double> solve_spd(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw DimensionError("solve_spd: shape mismatch");
  // In-place Cholesky a = L L^T.
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= a(j, p) * a(j, p);
    if (d <= 0.0) throw NumericError("solve_spd: matrix not positive definite");
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= a(i, p) * a(j, p);
      a(i, j) = s / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t p = 0; p < i; ++p) s -= a(i, p) * b[p];
    b[i] = s / a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t p = i + 1; p < n; ++p) s -= a(p, i) * b[p];
    b[i] = s / a(i, i);
  }
  return b;
}

void canonicalize_column_signs(Matrix& u) {
  for (std::size_t j = 0; j < u.cols(); ++j) {
    double peak = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i)
      peak = std::max(peak, std::fabs(u(i, j)));
    if (peak == 0.0) continue;
    for (std::size_t i = 0; i < u.rows(); ++i) {
      const double x = u(i, j);
      if (std::fabs(x) > 1e-12 * peak) {
        if (x < 0.0)
          for (std::size_t r = 0; r < u.rows(); ++r) u(r, j) = -u(r, j);
        break;
      }
    }
  }
}

}  // namespace tfm::spectral
