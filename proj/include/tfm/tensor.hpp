#pragma once

#include <cstddef>
#include <vector>

#include "tfm/matrix.hpp"

namespace tfm {

/// Dense order-K tensor. Storage is the canonical flat order: index 1
/// varies fastest, then index 2, and so on (the column-major
/// generalization), so vec() is exactly the storage and a matrix is stored
/// like tfm::Matrix.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);
  Tensor(std::vector<std::size_t> dims, std::vector<double> data);

  std::size_t order() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t k) const { return dims_[k - 1]; }  // 1-based
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  /// Element access by 0-based multi-index.
  double& at(const std::vector<std::size_t>& idx) { return data_[offset(idx)]; }
  double at(const std::vector<std::size_t>& idx) const { return data_[offset(idx)]; }

  std::size_t offset(const std::vector<std::size_t>& idx) const;

  double frobenius_norm() const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> data_;
};

/// Time-ordered sequence of equal-shape tensors.
class TensorSeries {
 public:
  TensorSeries() = default;
  TensorSeries(std::vector<std::size_t> shape, std::size_t length);
  explicit TensorSeries(std::vector<Tensor> slices);

  std::size_t length() const { return slices_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }

  Tensor& slice(std::size_t t) { return slices_[t]; }  // 0-based
  const Tensor& slice(std::size_t t) const { return slices_[t]; }

  void push_back(Tensor slice);

  double frobenius_norm() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<Tensor> slices_;
};

std::size_t product(const std::vector<std::size_t>& dims);

/// Mode-k unfolding: d_k x (d / d_k) matrix whose columns are the mode-k
/// fibers, the non-k indices enumerated with the lowest-numbered mode
/// varying fastest. Modes are 1-based throughout.
Matrix mode_k_unfold(const Tensor& x, std::size_t k);

/// Inverse of mode_k_unfold for the given target dims.
Tensor mode_k_refold(const Matrix& m, std::size_t k, const std::vector<std::size_t>& dims);

/// (x ×_k a): every mode-k fiber multiplied by a; a is (m x d_k).
Tensor mode_k_product(const Tensor& x, const Matrix& a, std::size_t k);

/// Canonical vectorization (mode-1 fibers stacked in order of modes 2..K).
std::vector<double> vec(const Tensor& x);

/// Tensor product: order K_x + K_y tensor with (x ⊗ y)_{i,j} = x_i y_j.
Tensor outer_product(const Tensor& x, const Tensor& y);

/// Reorder modes: result dims are dims[perm[0]-1], ..., dims[perm[K-1]-1]
/// and result(i_{perm[0]},...,i_{perm[K-1]}) = x(i_1,...,i_K). perm is a
/// 1-based permutation of 1..K.
Tensor permute_modes(const Tensor& x, const std::vector<std::size_t>& perm);

}  // namespace tfm
