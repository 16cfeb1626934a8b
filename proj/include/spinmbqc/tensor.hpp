// Copyright 2026 The spinmbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace spinmbqc {

using cplx = std::complex<double>;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, cplx>;

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using CMatrix = Matrix<cplx>;
using CVector = Vector<cplx>;

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

inline double conj_of(double v) { return v; }
inline cplx conj_of(const cplx& v) { return std::conj(v); }

// Dense tensor with row-major components: the last axis varies fastest.
template <Scalar T = cplx>
class DenseTensor {
 public:
  using value_type = T;

  DenseTensor() = default;

  explicit DenseTensor(Shape shape) : shape_(std::move(shape)) {
    check_extents();
    data_.assign(shape_size(shape_), T{});
  }

  DenseTensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_extents();
    if (data_.size() != shape_size(shape_)) {
      throw std::invalid_argument("DenseTensor: " + std::to_string(data_.size()) +
                                  " components do not fill shape " + shape_string(shape_));
    }
  }

  template <class Derived>
  static DenseTensor from_matrix(const Eigen::MatrixBase<Derived>& m) {
    DenseTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    t.matrix(1) = m.template cast<T>();
    return t;
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& components() { return data_; }
  const std::vector<T>& components() const { return data_; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  std::size_t flat_index(std::span<const std::size_t> idx) const {
    if (idx.size() != shape_.size()) throw std::out_of_range("DenseTensor: index rank mismatch");
    std::size_t flat = 0, axis = 0;
    for (std::size_t i : idx) {
      if (i >= shape_[axis]) throw std::out_of_range("DenseTensor: index out of range");
      flat = flat * shape_[axis++] + i;
    }
    return flat;
  }
  std::size_t flat_index(std::initializer_list<std::size_t> idx) const {
    return flat_index(std::span<const std::size_t>(idx.begin(), idx.size()));
  }
  T& at(std::initializer_list<std::size_t> idx) { return data_[flat_index(idx)]; }
  const T& at(std::initializer_list<std::size_t> idx) const { return data_[flat_index(idx)]; }
  T& at(std::span<const std::size_t> idx) { return data_[flat_index(idx)]; }
  const T& at(std::span<const std::size_t> idx) const { return data_[flat_index(idx)]; }

  // Views the tensor as a matrix whose rows group the first `row_axes` axes.
  Eigen::Map<RowMatrix<T>> matrix(std::size_t row_axes) {
    auto [r, c] = split(row_axes);
    return Eigen::Map<RowMatrix<T>>(data_.data(), r, c);
  }
  Eigen::Map<const RowMatrix<T>> matrix(std::size_t row_axes) const {
    auto [r, c] = split(row_axes);
    return Eigen::Map<const RowMatrix<T>>(data_.data(), r, c);
  }

  DenseTensor reshape(Shape new_shape) const& {
    DenseTensor out = *this;
    return std::move(out).reshape(std::move(new_shape));
  }
  DenseTensor reshape(Shape new_shape) && {
    if (shape_size(new_shape) != data_.size()) {
      throw std::invalid_argument("DenseTensor::reshape: " + shape_string(shape_) + " -> " +
                                  shape_string(new_shape));
    }
    return DenseTensor(std::move(new_shape), std::move(data_));
  }

  DenseTensor permute(const std::vector<std::size_t>& perm) const {
    const std::size_t n = rank();
    if (perm.size() != n) throw std::invalid_argument("DenseTensor::permute: rank mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t p : perm) {
      if (p >= n || seen[p]) throw std::invalid_argument("DenseTensor::permute: not a permutation");
      seen[p] = true;
    }
    Shape out_shape(n);
    for (std::size_t i = 0; i < n; ++i) out_shape[i] = shape_[perm[i]];
    DenseTensor out(out_shape);
    if (n == 0 || data_.empty()) return out;
    std::vector<std::size_t> in_strides(n, 1);
    for (std::size_t i = n - 1; i > 0; --i) in_strides[i - 1] = in_strides[i] * shape_[i];
    std::vector<std::size_t> strides(n);
    for (std::size_t i = 0; i < n; ++i) strides[i] = in_strides[perm[i]];
    std::vector<std::size_t> idx(n, 0);
    std::size_t src = 0;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
      out.data_[flat] = data_[src];
      for (std::size_t a = n; a-- > 0;) {
        if (++idx[a] < out_shape[a]) {
          src += strides[a];
          break;
        }
        src -= strides[a] * (out_shape[a] - 1);
        idx[a] = 0;
      }
    }
    return out;
  }

  DenseTensor conj() const {
    DenseTensor out = *this;
    for (auto& v : out.data_) v = conj_of(v);
    return out;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& v) { return is_finite(v); });
  }

  double norm() const {
    double s = 0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  template <Scalar U>
  DenseTensor<U> cast() const {
    std::vector<U> d(data_.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      if constexpr (std::same_as<U, double> && std::same_as<T, cplx>) {
        d[i] = data_[i].real();
      } else {
        d[i] = static_cast<U>(data_[i]);
      }
    }
    return DenseTensor<U>(shape_, std::move(d));
  }

  friend bool operator==(const DenseTensor& a, const DenseTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  void check_extents() const {
    for (std::size_t e : shape_) {
      if (e == 0) throw std::invalid_argument("DenseTensor: zero extent in " + shape_string(shape_));
    }
  }

  std::pair<Eigen::Index, Eigen::Index> split(std::size_t row_axes) const {
    if (row_axes > rank()) throw std::invalid_argument("DenseTensor::matrix: too many row axes");
    std::size_t r = 1;
    for (std::size_t i = 0; i < row_axes; ++i) r *= shape_[i];
    return {static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r ? data_.size() / r : 0)};
  }

  Shape shape_;
  std::vector<T> data_;
};

// Sums over paired axes. The result keeps the free axes of `a` followed by the free axes of `b`.
template <Scalar T>
DenseTensor<T> contract(const DenseTensor<T>& a, const std::vector<std::size_t>& axes_a,
                        const DenseTensor<T>& b, const std::vector<std::size_t>& axes_b) {
  if (axes_a.size() != axes_b.size()) throw std::invalid_argument("contract: axis lists differ in length");
  auto free_axes = [](const DenseTensor<T>& t, const std::vector<std::size_t>& axes) {
    std::vector<bool> used(t.rank(), false);
    for (std::size_t ax : axes) {
      if (ax >= t.rank()) throw std::out_of_range("contract: axis " + std::to_string(ax) + " out of range");
      if (used[ax]) throw std::invalid_argument("contract: repeated axis");
      used[ax] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < t.rank(); ++i)
      if (!used[i]) out.push_back(i);
    return out;
  };
  const auto fa = free_axes(a, axes_a);
  const auto fb = free_axes(b, axes_b);
  std::size_t k = 1;
  for (std::size_t i = 0; i < axes_a.size(); ++i) {
    if (a.extent(axes_a[i]) != b.extent(axes_b[i])) {
      throw std::invalid_argument("contract: extent mismatch on axis pair " + std::to_string(i));
    }
    k *= a.extent(axes_a[i]);
  }
  std::vector<std::size_t> pa = fa;
  pa.insert(pa.end(), axes_a.begin(), axes_a.end());
  std::vector<std::size_t> pb = axes_b;
  pb.insert(pb.end(), fb.begin(), fb.end());
  const DenseTensor<T> at = a.permute(pa);
  const DenseTensor<T> bt = b.permute(pb);

  Shape out_shape;
  std::size_t m = 1, n = 1;
  for (std::size_t ax : fa) {
    out_shape.push_back(a.extent(ax));
    m *= a.extent(ax);
  }
  for (std::size_t ax : fb) {
    out_shape.push_back(b.extent(ax));
    n *= b.extent(ax);
  }
  Eigen::Map<const RowMatrix<T>> am(at.data(), m, k);
  Eigen::Map<const RowMatrix<T>> bm(bt.data(), k, n);
  std::vector<T> data(m * n);
  Eigen::Map<RowMatrix<T>>(data.data(), m, n).noalias() = am * bm;
  if (out_shape.empty()) out_shape.push_back(1);
  return DenseTensor<T>(std::move(out_shape), std::move(data));
}

}  // namespace spinmbqc
