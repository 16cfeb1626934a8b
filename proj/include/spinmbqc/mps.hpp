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

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinmbqc/layout.hpp"
#include "spinmbqc/linalg.hpp"
#include "spinmbqc/spin_ops.hpp"
#include "spinmbqc/tensor.hpp"

namespace spinmbqc {

// Open-boundary matrix product state. Site tensors are (left bond, physical, right bond).
template <Scalar T = cplx>
class Mps {
 public:
  Mps() = default;

  Mps(ChainLayout layout, std::vector<DenseTensor<T>> tensors,
      std::optional<std::size_t> center = std::nullopt)
      : layout_(std::move(layout)), tensors_(std::move(tensors)), center_(center) {
    const std::size_t n = layout_.n_sites();
    if (tensors_.size() != n) {
      throw std::invalid_argument("Mps: " + std::to_string(tensors_.size()) + " tensors for " +
                                  std::to_string(n) + " sites");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = tensors_[i];
      if (t.rank() != 3) throw std::invalid_argument("Mps: site tensor must be rank 3");
      if (t.extent(1) != layout_.local_dim(i)) {
        throw std::invalid_argument("Mps: physical extent mismatch at site " + std::to_string(i));
      }
      if (i > 0 && tensors_[i - 1].extent(2) != t.extent(0)) {
        throw std::invalid_argument("Mps: bond mismatch between sites " + std::to_string(i - 1) +
                                    " and " + std::to_string(i));
      }
    }
    if (tensors_.front().extent(0) != 1 || tensors_.back().extent(2) != 1) {
      throw std::invalid_argument("Mps: boundary bonds must have dimension 1");
    }
    if (center_ && *center_ >= n) throw std::out_of_range("Mps: canonical center out of range");
  }

  const ChainLayout& layout() const { return layout_; }
  std::size_t size() const { return tensors_.size(); }
  const DenseTensor<T>& operator[](std::size_t i) const { return tensors_.at(i); }
  const std::vector<DenseTensor<T>>& tensors() const { return tensors_; }
  std::optional<std::size_t> canonical_center() const { return center_; }

  // Bond i joins sites i and i+1.
  std::vector<std::size_t> bond_dims() const {
    std::vector<std::size_t> b;
    for (std::size_t i = 0; i + 1 < tensors_.size(); ++i) b.push_back(tensors_[i].extent(2));
    return b;
  }
  std::size_t max_bond() const {
    std::size_t m = 1;
    for (std::size_t b : bond_dims()) m = std::max(m, b);
    return m;
  }

 private:
  ChainLayout layout_;
  std::vector<DenseTensor<T>> tensors_;
  std::optional<std::size_t> center_;
};

// Product of single-site operators, identity on sites without an entry.
class OperatorString {
 public:
  OperatorString() = default;

  OperatorString& set(std::size_t site, CMatrix op) {
    terms_[site] = std::move(op);
    return *this;
  }
  template <class Derived>
  OperatorString& set(std::size_t site, const Eigen::MatrixBase<Derived>& op) {
    return set(site, CMatrix(op));
  }
  // Left-multiplies the operator already on `site` (identity if none).
  template <class Derived>
  OperatorString& apply(std::size_t site, const Eigen::MatrixBase<Derived>& op) {
    auto it = terms_.find(site);
    if (it == terms_.end()) return set(site, CMatrix(op));
    it->second = op * it->second;
    return *this;
  }

  const std::map<std::size_t, CMatrix>& terms() const { return terms_; }
  const CMatrix* find(std::size_t site) const {
    auto it = terms_.find(site);
    return it == terms_.end() ? nullptr : &it->second;
  }
  bool empty() const { return terms_.empty(); }

 private:
  std::map<std::size_t, CMatrix> terms_;
};

template <Scalar T>
Mps<cplx> to_complex(const Mps<T>& s) {
  if constexpr (std::same_as<T, cplx>) {
    return s;
  } else {
    std::vector<DenseTensor<cplx>> t;
    for (const auto& a : s.tensors()) t.push_back(a.template cast<cplx>());
    return Mps<cplx>(s.layout(), std::move(t), s.canonical_center());
  }
}

namespace detail {

template <Scalar T>
using ConstRowMap = Eigen::Map<const RowMatrix<T>>;

// Left transfer step E'(c', c) = sum conj(bra[a', s', c']) op(s', s) E(a', a) ket[a, s, c].
template <Scalar TE, Scalar TB, Scalar TK>
Matrix<TE> transfer_left(const Matrix<TE>& e, const DenseTensor<TB>& bra, const DenseTensor<TK>& ket,
                         const CMatrix* op) {
  const Eigen::Index lb = bra.extent(0), d = bra.extent(1), rb = bra.extent(2);
  const Eigen::Index lk = ket.extent(0), rk = ket.extent(2);
  RowMatrix<TE> t = e * ConstRowMap<TK>(ket.data(), lk, d * rk).template cast<TE>();
  if (op) {
    if constexpr (std::same_as<TE, cplx>) {
      RowMatrix<TE> m(lb, d * rk);
      for (Eigen::Index a = 0; a < lb; ++a) {
        Eigen::Map<RowMatrix<TE>> src(t.data() + a * d * rk, d, rk);
        Eigen::Map<RowMatrix<TE>> dst(m.data() + a * d * rk, d, rk);
        dst.noalias() = *op * src;
      }
      t.swap(m);
    } else {
      throw std::logic_error("transfer_left: operator requires a complex environment");
    }
  }
  Eigen::Map<const RowMatrix<TE>> tm(t.data(), lb * d, rk);
  return ConstRowMap<TB>(bra.data(), lb * d, rb).template cast<TE>().adjoint() * tm;
}

template <Scalar T>
struct QrPiece {
  Matrix<T> q;
  Matrix<T> r;
};

// Thin QR with a non-negative real diagonal in R, so an isometry factors as (itself, I).
template <Scalar T, class Derived>
QrPiece<T> thin_qr(const Eigen::MatrixBase<Derived>& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols(), k = std::min(rows, cols);
  Eigen::HouseholderQR<Matrix<T>> qr(m);
  QrPiece<T> out;
  out.q = qr.householderQ() * Matrix<T>::Identity(rows, k);
  out.r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    const T diag = out.r(j, j);
    const double mag = std::abs(diag);
    if (mag == 0) continue;
    const T ph = diag / mag;
    out.q.col(j) *= ph;
    out.r.row(j) *= conj_of(ph);
  }
  return out;
}

template <Scalar T, class Derived>
DenseTensor<T> site_tensor(const Eigen::MatrixBase<Derived>& m, std::size_t l, std::size_t d, std::size_t r) {
  DenseTensor<T> t({l, d, r});
  Eigen::Map<RowMatrix<T>>(t.data(), static_cast<Eigen::Index>(l * d), static_cast<Eigen::Index>(r)) = m;
  return t;
}

}  // namespace detail

// Brings every site left of `center` to left-isometric and every site right of it to
// right-isometric form. Bond dimensions shrink where they exceed the local rank bound.
template <Scalar T>
Mps<T> canonicalize(const Mps<T>& state, std::size_t center) {
  const std::size_t n = state.size();
  if (center >= n) throw std::out_of_range("canonicalize: center out of range");
  std::vector<DenseTensor<T>> t = state.tensors();
  for (std::size_t i = 0; i < center; ++i) {
    const std::size_t l = t[i].extent(0), d = t[i].extent(1), r = t[i].extent(2);
    auto qr = detail::thin_qr<T>(t[i].matrix(2));
    const std::size_t k = static_cast<std::size_t>(qr.q.cols());
    t[i] = detail::site_tensor<T>(qr.q, l, d, k);
    const auto& nx = t[i + 1];
    const std::size_t d2 = nx.extent(1), r2 = nx.extent(2);
    Matrix<T> merged = qr.r * nx.matrix(1);
    DenseTensor<T> nt({k, d2, r2});
    nt.matrix(1) = merged;
    t[i + 1] = std::move(nt);
  }
  for (std::size_t i = n - 1; i > center; --i) {
    const std::size_t l = t[i].extent(0), d = t[i].extent(1), r = t[i].extent(2);
    auto qr = detail::thin_qr<T>(t[i].matrix(1).adjoint());
    const std::size_t k = static_cast<std::size_t>(qr.q.cols());
    DenseTensor<T> nt({k, d, r});
    nt.matrix(1) = qr.q.adjoint();
    t[i] = std::move(nt);
    const auto& pv = t[i - 1];
    const std::size_t l0 = pv.extent(0), d0 = pv.extent(1);
    Matrix<T> merged = pv.matrix(2) * qr.r.adjoint();
    t[i - 1] = detail::site_tensor<T>(merged, l0, d0, k);
    (void)l;
  }
  return Mps<T>(state.layout(), std::move(t), center);
}

template <Scalar T>
cplx inner(const Mps<T>& a, const Mps<T>& b) {
  if (!(a.layout() == b.layout())) throw std::invalid_argument("inner: layout mismatch");
  Matrix<T> e = Matrix<T>::Ones(1, 1);
  for (std::size_t i = 0; i < a.size(); ++i) e = detail::transfer_left<T>(e, a[i], b[i], nullptr);
  return cplx(e(0, 0));
}

template <Scalar T>
double norm(const Mps<T>& a) {
  const cplx v = inner(a, a);
  if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real()))) {
    throw std::runtime_error("norm: inner product has an imaginary part");
  }
  return std::sqrt(std::max(0.0, v.real()));
}

// Canonical form centered at `center` with unit norm.
template <Scalar T>
Mps<T> normalized(const Mps<T>& state, std::size_t center = 0) {
  Mps<T> c = canonicalize(state, center);
  std::vector<DenseTensor<T>> t = c.tensors();
  const double nrm = t[center].norm();
  if (nrm == 0) throw std::invalid_argument("normalized: zero state");
  for (auto& v : t[center].components()) v /= nrm;
  return Mps<T>(c.layout(), std::move(t), center);
}

// <state| prod op_site |state>, one left-to-right sweep of transfer matrices.
template <Scalar T>
cplx expect_string(const Mps<T>& state, const OperatorString& op) {
  for (const auto& [site, m] : op.terms()) {
    if (site >= state.size()) throw std::out_of_range("expect_string: site " + std::to_string(site));
    const auto d = static_cast<Eigen::Index>(state.layout().local_dim(site));
    if (m.rows() != d || m.cols() != d) {
      throw std::invalid_argument("expect_string: operator on site " + std::to_string(site) +
                                  " does not match local dimension");
    }
  }
  CMatrix e = CMatrix::Ones(1, 1);
  for (std::size_t i = 0; i < state.size(); ++i) {
    e = detail::transfer_left<cplx>(e, state[i], state[i], op.find(i));
  }
  return e(0, 0);
}

inline constexpr std::size_t kDefaultDenseCap = 4 * 6561;

// Amplitudes in lexicographic site order (site 0 most significant).
template <Scalar T>
Vector<T> to_dense(const Mps<T>& state, std::size_t cap = kDefaultDenseCap) {
  const std::size_t dim = state.layout().dense_dim();
  if (dim > cap) {
    throw std::length_error("to_dense: dimension " + std::to_string(dim) + " exceeds cap " +
                            std::to_string(cap));
  }
  RowMatrix<T> v = RowMatrix<T>::Ones(1, 1);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& a = state[i];
    const Eigen::Index l = a.extent(0), d = a.extent(1), r = a.extent(2);
    RowMatrix<T> next = v * detail::ConstRowMap<T>(a.data(), l, d * r);
    v = Eigen::Map<RowMatrix<T>>(next.data(), next.rows() * d, r);
  }
  return Eigen::Map<Vector<T>>(v.data(), v.size());
}

// Exact MPS of a dense vector by successive SVDs; center at the last site.
template <Scalar T>
Mps<T> from_dense(const ChainLayout& layout, const Vector<T>& amplitudes,
                  std::size_t max_bond = static_cast<std::size_t>(-1), double cutoff = 0.0) {
  if (static_cast<std::size_t>(amplitudes.size()) != layout.dense_dim()) {
    throw std::invalid_argument("from_dense: amplitude count does not match layout");
  }
  const std::size_t n = layout.n_sites();
  std::vector<DenseTensor<T>> t;
  RowMatrix<T> rest = Eigen::Map<const RowMatrix<T>>(amplitudes.data(), 1, amplitudes.size());
  std::size_t l = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t d = layout.local_dim(i);
    const Eigen::Index cols = rest.size() / static_cast<Eigen::Index>(l * d);
    Eigen::Map<RowMatrix<T>> m(rest.data(), static_cast<Eigen::Index>(l * d), cols);
    auto svd = svd_truncate_matrix<T>(m, max_bond, cutoff);
    const std::size_t k = svd.s.size();
    t.push_back(detail::site_tensor<T>(svd.u, l, d, k));
    Matrix<T> sv = svd.vh;
    for (std::size_t j = 0; j < k; ++j) sv.row(static_cast<Eigen::Index>(j)) *= svd.s[j];
    rest = sv;
    l = k;
  }
  t.push_back(detail::site_tensor<T>(Eigen::Map<RowMatrix<T>>(rest.data(), rest.size(), 1), l,
                                     layout.local_dim(n - 1), 1));
  return Mps<T>(layout, std::move(t), n - 1);
}

template <Scalar T>
Mps<T> random_mps(const ChainLayout& layout, std::size_t bond, std::uint64_t seed) {
  if (bond == 0) throw std::invalid_argument("random_mps: bond must be positive");
  const auto dims = layout.local_dims();
  const std::size_t n = dims.size();
  // Cap each bond by the Hilbert space dimension on either side.
  std::vector<std::size_t> b(n + 1, 1);
  for (std::size_t i = 1; i < n; ++i) {
    double left = 1, right = 1;
    for (std::size_t j = 0; j < i; ++j) left *= static_cast<double>(dims[j]);
    for (std::size_t j = i; j < n; ++j) right *= static_cast<double>(dims[j]);
    b[i] = static_cast<std::size_t>(std::min<double>({static_cast<double>(bond), left, right}));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<DenseTensor<T>> t;
  for (std::size_t i = 0; i < n; ++i) {
    DenseTensor<T> a({b[i], dims[i], b[i + 1]});
    for (auto& v : a.components()) {
      if constexpr (std::same_as<T, cplx>) {
        const double re = nd(rng);
        v = cplx(re, nd(rng));
      } else {
        v = nd(rng);
      }
    }
    t.push_back(std::move(a));
  }
  return normalized(Mps<T>(layout, std::move(t)), 0);
}

namespace detail {

// Unnormalized valence-bond state: singlets (|01> - |10>)/sqrt2 on every bond and the
// unit-weight projector onto spin 1 on every site, so the norm is (3/4)^(L/2).
// Same state as the LambdaGamma^m form with Gamma^+- = (I +- Z)/sqrt3, Gamma^0 = sqrt(2/3) X,
// Lambda = XZ/sqrt2, up to the factor (2/sqrt3)^L and a sign. That form has norm exactly 1.
template <Scalar T = cplx>
Mps<T> aklt_raw(std::size_t n_spin1) {
  const ChainLayout layout = ChainLayout::uniform(n_spin1);
  Eigen::Matrix2d lam;
  lam << 0, 1, -1, 0;
  lam /= std::sqrt(2.0);
  std::array<Eigen::Matrix2d, 3> gam;
  gam[0] << 1, 0, 0, 0;
  gam[1] << 0, 1, 1, 0;
  gam[1] /= std::sqrt(2.0);
  gam[2] << 0, 0, 0, 1;

  std::vector<DenseTensor<T>> t;
  DenseTensor<T> first({1, 2, 2});
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t b = 0; b < 2; ++b) first.at({0, s, b}) = lam(s, b);
  t.push_back(std::move(first));
  for (std::size_t i = 0; i < n_spin1; ++i) {
    DenseTensor<T> a({2, 3, 2});
    for (std::size_t m = 0; m < 3; ++m) {
      const Eigen::Matrix2d gl = gam[m] * lam;
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) a.at({x, m, y}) = gl(x, y);
    }
    t.push_back(std::move(a));
  }
  DenseTensor<T> last({2, 2, 1});
  last.at({0, 0, 0}) = 1;
  last.at({1, 1, 0}) = 1;
  t.push_back(std::move(last));
  return Mps<T>(layout, std::move(t));
}

}  // namespace detail

// Exact AKLT resource state on n_spin1 spin-1 sites with the two end qubits, unit norm.
template <Scalar T = cplx>
Mps<T> aklt_mps(std::size_t n_spin1) {
  return normalized(detail::aklt_raw<T>(n_spin1), 0);
}

}  // namespace spinmbqc
