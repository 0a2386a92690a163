#include "tfm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfm/error.hpp"
#include "tfm/kernels.hpp"
#include "tfm/spectral.hpp"

namespace tfm::est {
namespace {

// Above this total dimension the wide TOPUP matrix is not materialized and
// the Gram accumulation path is used instead.
constexpr std::size_t kMaterializeLimit = 1000;

// Gap threshold for the rank-selection flag: the best eigenvalue ratio must
// exceed this for the selected ranks to count as a pronounced gap.
constexpr double kRankGapFloor = 3.0;

std::string to_str(std::size_t v) { return std::to_string(v); }

void check_lag(const TensorSeries& x, std::size_t h0) {
  if (h0 < 1) throw LagError("lag window h0 must be >= 1");
  if (h0 >= x.length()) {
    throw LagError("lag window h0=" + to_str(h0) + " requires T > h0, got T=" +
                   to_str(x.length()));
  }
}

std::vector<Matrix> unfold_all(const TensorSeries& x, std::size_t k) {
  std::vector<Matrix> u;
  u.reserve(x.length());
  for (std::size_t t = 0; t < x.length(); ++t) u.push_back(mode_k_unfold(x.slice(t), k));
  return u;
}

void validate_spec(const TensorSeries& x, const ModelSpec& spec,
                   std::vector<std::string>* warnings) {
  const auto& dims = x.shape();
  if (spec.ranks.size() != dims.size()) {
    throw DimensionError("rank vector order does not match series order");
  }
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (spec.ranks[k] < 1 || spec.ranks[k] > dims[k]) {
      throw RankError("rank r_" + to_str(k + 1) + "=" + to_str(spec.ranks[k]) +
                      " outside 1..d_" + to_str(k + 1) + "=" + to_str(dims[k]));
    }
  }
  if (spec.method != Method::UP) {
    check_lag(x, spec.h0);
    if (spec.h0 > x.length() / 4 && warnings) {
      warnings->push_back("h0=" + to_str(spec.h0) + " exceeds T/4=" +
                          to_str(x.length() / 4) + "; error bounds assume h0 <= T/4");
    }
  }
  if (x.frobenius_norm() == 0.0) {
    throw DegenerateDataError("series is identically zero");
  }
}

// Mode-k Gram of the method's signal matrix together with its eigen
// decomposition; the shared backbone of estimate() and select_ranks().
struct ModeSpectrum {
  Matrix vectors;              // d_k x d_k eigenvectors, desc. eigenvalues
  std::vector<double> ladder;  // singular values (sqrt of eigenvalues)
};

Matrix up_gram(const std::vector<Matrix>& unfolded) {
  Matrix w(unfolded.front().rows(), unfolded.front().rows());
  const auto& ops = kernels::active();
  for (const Matrix& u : unfolded) {
    ops.gemm_nt(u.data(), u.rows(), u.data(), u.rows(), w.data(), w.rows(),
                u.rows(), u.rows(), u.cols());
  }
  return w;
}

Matrix tipup_from_unfolded(const std::vector<Matrix>& unfolded, std::size_t h0) {
  const std::size_t T = unfolded.size();
  const std::size_t dk = unfolded.front().rows();
  const std::size_t dmk = unfolded.front().cols();
  Matrix m(dk, dk * h0);
  const auto& ops = kernels::active();
  for (std::size_t h = 1; h <= h0; ++h) {
    double* block = m.data() + (h - 1) * dk * dk;
    for (std::size_t t = h; t < T; ++t) {
      const Matrix& a = unfolded[t - h];
      const Matrix& b = unfolded[t];
      ops.gemm_nt(a.data(), dk, b.data(), dk, block, dk, dk, dk, dmk);
    }
    ops.scale(1.0 / static_cast<double>(T - h), block, dk * dk);
  }
  return m;
}

Matrix topup_from_unfolded(const std::vector<Matrix>& unfolded, std::size_t h0) {
  const std::size_t T = unfolded.size();
  const std::size_t dk = unfolded.front().rows();
  const std::size_t dmk = unfolded.front().cols();
  const std::size_t d = dk * dmk;
  Matrix m(dk, dmk * d * h0);
  const auto& ops = kernels::active();
  for (std::size_t h = 1; h <= h0; ++h) {
    double* slab = m.data() + (h - 1) * dmk * d * dk;
    for (std::size_t t = h; t < T; ++t) {
      const double* a = unfolded[t - h].data();
      const double* b = unfolded[t].data();
      // Column block (i2, j2) of the slab is a d_k x d_{-k} copy of
      // mat_k(X_{t-h}) scaled by mat_k(X_t)_{i2 j2}; both are contiguous in
      // the canonical layout.
      for (std::size_t bidx = 0; bidx < d; ++bidx) {
        ops.axpy(b[bidx], a, slab + bidx * d, d);
      }
    }
    ops.scale(1.0 / static_cast<double>(T - h), slab, dmk * d * dk);
  }
  return m;
}

Matrix topup_gram_from_unfolded(const std::vector<Matrix>& unfolded, std::size_t h0) {
  const std::size_t T = unfolded.size();
  const std::size_t dk = unfolded.front().rows();
  const std::size_t dmk = unfolded.front().cols();
  const std::size_t d = dk * dmk;
  Matrix w(dk, dk);
  Matrix block(dk, dmk);
  const auto& ops = kernels::active();
  for (std::size_t h = 1; h <= h0; ++h) {
    const double scale = 1.0 / static_cast<double>(T - h);
    for (std::size_t bidx = 0; bidx < d; ++bidx) {
      std::fill(block.data(), block.data() + d, 0.0);
      for (std::size_t t = h; t < T; ++t) {
        ops.axpy(unfolded[t].data()[bidx], unfolded[t - h].data(), block.data(), d);
      }
      ops.scale(scale, block.data(), d);
      ops.gemm_nt(block.data(), dk, block.data(), dk, w.data(), dk, dk, dk, dmk);
    }
  }
  return w;
}

ModeSpectrum mode_spectrum(const std::vector<Matrix>& unfolded, Method method,
                           std::size_t h0) {
  Matrix w;
  switch (method) {
    case Method::TOPUP:
    case Method::ITOPUP: {
      const std::size_t d = unfolded.front().size();
      if (d <= kMaterializeLimit) {
        w = gram(topup_from_unfolded(unfolded, h0));
      } else {
        w = topup_gram_from_unfolded(unfolded, h0);
      }
      break;
    }
    case Method::TIPUP:
    case Method::ITIPUP:
      w = gram(tipup_from_unfolded(unfolded, h0));
      break;
    case Method::UP:
      w = up_gram(unfolded);
      break;
  }
  spectral::EigResult eig = spectral::sym_eig(w);
  ModeSpectrum s;
  s.vectors = std::move(eig.vectors);
  s.ladder.resize(eig.values.size());
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    s.ladder[i] = std::sqrt(std::max(0.0, eig.values[i]));
  }
  return s;
}

Matrix top_columns(const Matrix& vectors, std::size_t count) {
  Matrix u(vectors.rows(), count);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < vectors.rows(); ++i) u(i, j) = vectors(i, j);
  spectral::canonicalize_column_signs(u);
  return u;
}

TensorSeries extract_factors(const TensorSeries& x, const std::vector<Matrix>& bases) {
  std::vector<Tensor> factors;
  factors.reserve(x.length());
  std::vector<Matrix> basis_t;
  basis_t.reserve(bases.size());
  for (const Matrix& u : bases) basis_t.push_back(transpose(u));
  for (std::size_t t = 0; t < x.length(); ++t) {
    Tensor f = x.slice(t);
    for (std::size_t k = 0; k < basis_t.size(); ++k) {
      f = mode_k_product(f, basis_t[k], k + 1);
    }
    factors.push_back(std::move(f));
  }
  return TensorSeries(std::move(factors));
}

TensorSeries compress_except(const TensorSeries& x, const std::vector<Matrix>& bases,
                             std::size_t keep_mode) {
  std::vector<Tensor> slices;
  slices.reserve(x.length());
  for (std::size_t t = 0; t < x.length(); ++t) {
    Tensor s = x.slice(t);
    for (std::size_t k = 0; k < bases.size(); ++k) {
      if (k + 1 == keep_mode) continue;
      s = mode_k_product(s, transpose(bases[k]), k + 1);
    }
    slices.push_back(std::move(s));
  }
  return TensorSeries(std::move(slices));
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::TOPUP: return "TOPUP";
    case Method::TIPUP: return "TIPUP";
    case Method::ITOPUP: return "iTOPUP";
    case Method::ITIPUP: return "iTIPUP";
    case Method::UP: return "UP";
  }
  return "?";
}

Matrix topup_matrix(const TensorSeries& x, std::size_t k, std::size_t h0) {
  check_lag(x, h0);
  return topup_from_unfolded(unfold_all(x, k), h0);
}

Matrix tipup_matrix(const TensorSeries& x, std::size_t k, std::size_t h0) {
  check_lag(x, h0);
  return tipup_from_unfolded(unfold_all(x, k), h0);
}

Matrix topup_gram(const TensorSeries& x, std::size_t k, std::size_t h0) {
  check_lag(x, h0);
  return topup_gram_from_unfolded(unfold_all(x, k), h0);
}

FactorEstimate estimate(const TensorSeries& x, const ModelSpec& spec) {
  if (spec.method == Method::ITOPUP || spec.method == Method::ITIPUP) {
    return estimate_iterative(x, spec);
  }
  FactorEstimate est;
  est.method = spec.method;
  est.h0 = spec.h0;
  validate_spec(x, spec, &est.warnings);

  const std::size_t K = x.order();
  est.bases.reserve(K);
  est.projections.reserve(K);
  est.singular_ladders.reserve(K);
  for (std::size_t k = 1; k <= K; ++k) {
    ModeSpectrum s = mode_spectrum(unfold_all(x, k), spec.method, spec.h0);
    Matrix u = top_columns(s.vectors, spec.ranks[k - 1]);
    est.projections.push_back(matmul_nt(u, u));
    est.bases.push_back(std::move(u));
    est.singular_ladders.push_back(std::move(s.ladder));
  }
  est.factors = extract_factors(x, est.bases);
  return est;
}

FactorEstimate estimate_iterative(const TensorSeries& x, const ModelSpec& spec) {
  if (spec.method != Method::ITOPUP && spec.method != Method::ITIPUP) {
    throw UsageError("estimate_iterative requires an iterative method");
  }
  ModelSpec init = spec;
  init.method = (spec.method == Method::ITOPUP) ? Method::TOPUP : Method::TIPUP;
  FactorEstimate est = estimate(x, init);
  est.method = spec.method;
  est.iterations_used = 0;
  if (spec.max_iter == 0) return est;

  const std::size_t K = x.order();
  for (std::size_t cycle = 1; cycle <= spec.max_iter; ++cycle) {
    double delta = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
      const TensorSeries compressed = compress_except(x, est.bases, k);
      ModeSpectrum s = mode_spectrum(unfold_all(compressed, k), init.method, spec.h0);
      Matrix u = top_columns(s.vectors, spec.ranks[k - 1]);
      Matrix p = matmul_nt(u, u);
      delta = std::max(delta, spectral::spectral_norm(p - est.projections[k - 1]));
      est.bases[k - 1] = std::move(u);
      est.projections[k - 1] = std::move(p);
      est.singular_ladders[k - 1] = std::move(s.ladder);
    }
    est.iterations_used = cycle;
    if (delta < spec.iter_tol) break;
  }
  est.factors = extract_factors(x, est.bases);
  return est;
}

TensorSeries reconstruct_signal(const FactorEstimate& estimate) {
  std::vector<Tensor> slices;
  slices.reserve(estimate.factors.length());
  for (std::size_t t = 0; t < estimate.factors.length(); ++t) {
    Tensor m = estimate.factors.slice(t);
    for (std::size_t k = 0; k < estimate.bases.size(); ++k) {
      m = mode_k_product(m, estimate.bases[k], k + 1);
    }
    slices.push_back(std::move(m));
  }
  return TensorSeries(std::move(slices));
}

RankSelection select_ranks(const TensorSeries& x, std::size_t h0, Method method) {
  if (method == Method::ITOPUP) method = Method::TOPUP;
  if (method == Method::ITIPUP) method = Method::TIPUP;
  if (method != Method::UP) check_lag(x, h0);
  if (x.frobenius_norm() == 0.0) {
    throw DegenerateDataError("series is identically zero");
  }

  RankSelection sel;
  const std::size_t K = x.order();
  for (std::size_t k = 1; k <= K; ++k) {
    const std::size_t dk = x.shape()[k - 1];
    if (dk == 1) {
      sel.ranks.push_back(1);
      continue;
    }
    const ModeSpectrum s = mode_spectrum(unfold_all(x, k), method, h0);
    const auto& ladder = s.ladder;
    const double head = ladder.front();
    const double floor = 1e-12 * head;

    bool tail_zero = true;
    for (std::size_t m = 1; m < ladder.size(); ++m) {
      if (ladder[m] > floor) tail_zero = false;
    }
    if (head <= 0.0 || tail_zero) {
      sel.ranks.push_back(1);
      sel.flagged = true;
      sel.notes.push_back("mode " + to_str(k) + ": ladder vanishes beyond the first value");
      continue;
    }

    const std::size_t m_max = std::min(std::max<std::size_t>(dk / 2, 1),
                                       ladder.size() - 1);
    std::size_t best_m = 1;
    double best_ratio = 0.0;
    bool best_inf = false;
    for (std::size_t m = 1; m <= m_max; ++m) {
      const double num = ladder[m - 1];
      const double den = ladder[m];
      if (num <= floor) break;  // no information past a vanished level
      if (den <= floor) {       // exact drop to (numerical) zero
        best_m = m;
        best_inf = true;
        break;
      }
      const double ratio = num / den;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_m = m;
      }
    }
    sel.ranks.push_back(best_m);
    if (!best_inf && best_ratio < kRankGapFloor) {
      sel.flagged = true;
      sel.notes.push_back("mode " + to_str(k) + ": best eigenvalue ratio " +
                          std::to_string(best_ratio) + " below gap threshold");
    }
  }
  return sel;
}

}  // namespace tfm::est
