#include "tfm/postprocess.hpp"

#include <cmath>

#include "tfm/error.hpp"
#include "tfm/kernels.hpp"

namespace tfm::post {
namespace {

void rotate_pair(Matrix& m, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double mp = m(i, p);
    const double mq = m(i, q);
    m(i, p) = c * mp + s * mq;
    m(i, q) = -s * mp + c * mq;
  }
}

}  // namespace

double varimax_criterion(const Matrix& a) {
  const double n = static_cast<double>(a.rows());
  double v = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const double x2 = a(i, j) * a(i, j);
      s2 += x2;
      s4 += x2 * x2;
    }
    v += s4 / n - (s2 / n) * (s2 / n);
  }
  return v;
}

RotatedLoading varimax(const Matrix& a, double tol, std::size_t max_sweeps,
                       bool kaiser_normalize) {
  if (a.cols() < 1) throw DimensionError("varimax: empty loading matrix");
  RotatedLoading out;
  out.rotation = Matrix::identity(a.cols());
  out.sweeps = 0;
  if (a.cols() == 1) {
    out.rotated = a;
    out.criterion_value = varimax_criterion(a);
    return out;
  }

  Matrix work = a;
  std::vector<double> row_norms;
  if (kaiser_normalize) {
    row_norms.resize(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double ss = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) ss += a(i, j) * a(i, j);
      row_norms[i] = std::sqrt(ss);
      if (row_norms[i] > 0.0)
        for (std::size_t j = 0; j < a.cols(); ++j) work(i, j) /= row_norms[i];
    }
  }

  const double n = static_cast<double>(work.rows());
  double criterion = varimax_criterion(work);
  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t p = 0; p + 1 < work.cols(); ++p) {
      for (std::size_t q = p + 1; q < work.cols(); ++q) {
        // Kaiser's closed-form optimal planar rotation for the pair.
        double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
        for (std::size_t i = 0; i < work.rows(); ++i) {
          const double u = work(i, p) * work(i, p) - work(i, q) * work(i, q);
          const double v = 2.0 * work(i, p) * work(i, q);
          su += u;
          sv += v;
          suu += u * u - v * v;
          suv += 2.0 * u * v;
        }
        const double num = suv - 2.0 * su * sv / n;
        const double den = suu - (su * su - sv * sv) / n;
        if (num == 0.0 && den == 0.0) continue;
        const double phi = 0.25 * std::atan2(num, den);
        if (std::fabs(phi) < 1e-15) continue;
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        rotate_pair(work, p, q, c, s);
        rotate_pair(out.rotation, p, q, c, s);
      }
    }
    out.sweeps = sweep;
    const double updated = varimax_criterion(work);
    if (updated - criterion < tol) {
      criterion = std::max(criterion, updated);
      break;
    }
    criterion = updated;
  }

  if (kaiser_normalize) {
    for (std::size_t i = 0; i < work.rows(); ++i)
      if (row_norms[i] > 0.0)
        for (std::size_t j = 0; j < work.cols(); ++j) work(i, j) *= row_norms[i];
  }

  // Largest-magnitude entry per column made positive; fold the sign flips
  // into the rotation so rotated == original * rotation stays exact.
  for (std::size_t j = 0; j < work.cols(); ++j) {
    std::size_t arg = 0;
    double peak = 0.0;
    for (std::size_t i = 0; i < work.rows(); ++i) {
      if (std::fabs(work(i, j)) > peak) {
        peak = std::fabs(work(i, j));
        arg = i;
      }
    }
    if (peak > 0.0 && work(arg, j) < 0.0) {
      for (std::size_t i = 0; i < work.rows(); ++i) work(i, j) = -work(i, j);
      for (std::size_t i = 0; i < out.rotation.rows(); ++i)
        out.rotation(i, j) = -out.rotation(i, j);
    }
  }

  out.rotated = std::move(work);
  out.criterion_value = varimax_criterion(out.rotated);
  return out;
}

NormalizedColumns normalize_columns(const Matrix& a) {
  NormalizedColumns out;
  out.values = a;
  out.skipped.assign(a.cols(), false);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) sum += a(i, j);
    if (std::fabs(sum) < 1e-12) {
      out.skipped[j] = true;
      continue;
    }
    for (std::size_t i = 0; i < a.rows(); ++i) out.values(i, j) /= sum;
  }
  return out;
}

TensorSeries moving_average(const TensorSeries& x, std::size_t window) {
  if (window < 1) throw DimensionError("moving_average: window must be >= 1");
  if (window > x.length()) {
    throw DimensionError("moving_average: window longer than the series");
  }
  const std::size_t out_len = x.length() - window + 1;
  TensorSeries out(x.shape(), out_len);
  const double w = 1.0 / static_cast<double>(window);
  const auto& ops = kernels::active();
  for (std::size_t t = 0; t < out_len; ++t) {
    Tensor& acc = out.slice(t);
    for (std::size_t s = 0; s < window; ++s) {
      ops.axpy(w, x.slice(t + s).data(), acc.data(), acc.size());
    }
  }
  return out;
}

Matrix scaled_integer_display(const Matrix& a, double scale) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      out(i, j) = std::trunc(a(i, j) * scale);
  return out;
}

Matrix percentage_display(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = 100.0 * a(i, j);
  return out;
}

}  // namespace tfm::post
