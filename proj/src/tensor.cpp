#include "tfm/tensor.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tfm/error.hpp"
#include "tfm/kernels.hpp"

namespace tfm {

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t p = 1;
  for (std::size_t d : dims) p *= d;
  return p;
}

namespace {

void check_dims(const std::vector<std::size_t>& dims) {
  if (dims.empty()) throw DimensionError("tensor must have order K >= 1");
  for (std::size_t d : dims) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive");
  }
}

void check_mode(std::size_t k, std::size_t order) {
  if (k < 1 || k > order) {
    throw ModeIndexError("mode index " + std::to_string(k) + " out of range 1.." +
                         std::to_string(order));
  }
}

// Stride decomposition around mode k (1-based): inner = product of dims
// below k, outer = product of dims above k.
struct ModeSplit {
  std::size_t inner;
  std::size_t dk;
  std::size_t outer;
};

ModeSplit split_at(const std::vector<std::size_t>& dims, std::size_t k) {
  ModeSplit s{1, dims[k - 1], 1};
  for (std::size_t m = 0; m + 1 < k; ++m) s.inner *= dims[m];
  for (std::size_t m = k; m < dims.size(); ++m) s.outer *= dims[m];
  return s;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(product(dims_), 0.0) {
  check_dims(dims_);
}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != product(dims_)) {
    throw DimensionError("tensor data length does not match dimensions");
  }
}

std::size_t Tensor::offset(const std::vector<std::size_t>& idx) const {
  if (idx.size() != dims_.size()) throw DimensionError("multi-index order mismatch");
  std::size_t off = 0;
  std::size_t stride = 1;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (idx[m] >= dims_[m]) throw DimensionError("multi-index out of range");
    off += idx[m] * stride;
    stride *= dims_[m];
  }
  return off;
}

double Tensor::frobenius_norm() const {
  return std::sqrt(kernels::active().sum_sq(data_.data(), data_.size()));
}

TensorSeries::TensorSeries(std::vector<std::size_t> shape, std::size_t length)
    : shape_(std::move(shape)) {
  check_dims(shape_);
  if (length == 0) throw DimensionError("series length must be >= 1");
  slices_.reserve(length);
  for (std::size_t t = 0; t < length; ++t) slices_.emplace_back(shape_);
}

TensorSeries::TensorSeries(std::vector<Tensor> slices) : slices_(std::move(slices)) {
  if (slices_.empty()) throw DimensionError("series length must be >= 1");
  shape_ = slices_.front().dims();
  for (const Tensor& s : slices_) {
    if (s.dims() != shape_) throw DimensionError("series slices must share one shape");
  }
}

void TensorSeries::push_back(Tensor slice) {
  if (slices_.empty()) {
    shape_ = slice.dims();
  } else if (slice.dims() != shape_) {
    throw DimensionError("series slices must share one shape");
  }
  slices_.push_back(std::move(slice));
}

double TensorSeries::frobenius_norm() const {
  double ss = 0.0;
  for (const Tensor& s : slices_) {
    const double f = s.frobenius_norm();
    ss += f * f;
  }
  return std::sqrt(ss);
}

Matrix mode_k_unfold(const Tensor& x, std::size_t k) {
  check_mode(k, x.order());
  const auto s = split_at(x.dims(), k);
  Matrix m(s.dk, s.inner * s.outer);
  const double* src = x.data();
  for (std::size_t out = 0; out < s.outer; ++out) {
    for (std::size_t i = 0; i < s.dk; ++i) {
      const double* fiber = src + s.inner * (i + s.dk * out);
      for (std::size_t in = 0; in < s.inner; ++in) {
        m(i, in + s.inner * out) = fiber[in];
      }
    }
  }
  return m;
}

Tensor mode_k_refold(const Matrix& m, std::size_t k, const std::vector<std::size_t>& dims) {
  check_dims(dims);
  check_mode(k, dims.size());
  const auto s = split_at(dims, k);
  if (m.rows() != s.dk || m.cols() != s.inner * s.outer) {
    throw DimensionError("mode_k_refold: matrix shape inconsistent with dims");
  }
  Tensor x(dims);
  double* dst = x.data();
  for (std::size_t out = 0; out < s.outer; ++out) {
    for (std::size_t i = 0; i < s.dk; ++i) {
      double* fiber = dst + s.inner * (i + s.dk * out);
      for (std::size_t in = 0; in < s.inner; ++in) {
        fiber[in] = m(i, in + s.inner * out);
      }
    }
  }
  return x;
}

Tensor mode_k_product(const Tensor& x, const Matrix& a, std::size_t k) {
  check_mode(k, x.order());
  if (a.cols() != x.dim(k)) {
    throw DimensionError("mode_k_product: matrix columns must equal d_k");
  }
  std::vector<std::size_t> new_dims = x.dims();
  new_dims[k - 1] = a.rows();
  const Matrix unfolded = mode_k_unfold(x, k);
  return mode_k_refold(matmul(a, unfolded), k, new_dims);
}

std::vector<double> vec(const Tensor& x) { return x.values(); }

Tensor outer_product(const Tensor& x, const Tensor& y) {
  std::vector<std::size_t> dims = x.dims();
  dims.insert(dims.end(), y.dims().begin(), y.dims().end());
  Tensor r(dims);
  // Flat layout makes this a rank-one update of an (|x| x |y|) matrix.
  kernels::active().ger(1.0, x.data(), y.data(), r.data(), x.size(), x.size(),
                        y.size());
  return r;
}

Tensor permute_modes(const Tensor& x, const std::vector<std::size_t>& perm) {
  const std::size_t K = x.order();
  if (perm.size() != K) throw DimensionError("permute_modes: permutation order mismatch");
  std::vector<bool> seen(K, false);
  for (std::size_t p : perm) {
    check_mode(p, K);
    if (seen[p - 1]) throw DimensionError("permute_modes: not a permutation");
    seen[p - 1] = true;
  }
  std::vector<std::size_t> new_dims(K);
  for (std::size_t m = 0; m < K; ++m) new_dims[m] = x.dims()[perm[m] - 1];
  Tensor r(new_dims);

  std::vector<std::size_t> old_strides(K, 1);
  for (std::size_t m = 1; m < K; ++m) old_strides[m] = old_strides[m - 1] * x.dims()[m - 1];

  std::vector<std::size_t> idx(K, 0);  // multi-index in the result
  const std::size_t n = r.size();
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t src = 0;
    for (std::size_t m = 0; m < K; ++m) src += idx[m] * old_strides[perm[m] - 1];
    r.data()[flat] = x.data()[src];
    for (std::size_t m = 0; m < K; ++m) {
      if (++idx[m] < new_dims[m]) break;
      idx[m] = 0;
    }
  }
  return r;
}

}  // namespace tfm
