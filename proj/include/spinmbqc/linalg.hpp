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
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spinmbqc/tensor.hpp"

namespace spinmbqc {

template <Scalar T>
struct SvdResult {
  DenseTensor<T> left_isometry;   // (rows, k)
  std::vector<double> singular_values;
  DenseTensor<T> right_isometry;  // (k, cols)
  double discarded_weight = 0.0;
};

// Number of singular values to keep. The cutoff bounds the relative weight of the dropped
// tail; a multiplet straddling the cut is kept whole; max_rank caps the result.
inline std::size_t kept_rank(const std::vector<double>& s, std::size_t max_rank, double cutoff) {
  if (max_rank == 0) throw std::invalid_argument("kept_rank: max_rank must be positive");
  const std::size_t n = s.size();
  if (n == 0) return 0;
  double total = 0;
  for (double v : s) total += v * v;
  if (total == 0) return 1;
  std::size_t k = n;
  double tail = 0;
  while (k > 1 && (tail + s[k - 1] * s[k - 1]) / total <= cutoff) {
    tail += s[k - 1] * s[k - 1];
    --k;
  }
  while (k < n && s[k] > 0 && s[k] >= s[k - 1] * (1.0 - 1e-12)) ++k;
  return std::max<std::size_t>(1, std::min(k, max_rank));
}

template <Scalar T>
struct MatrixSvd {
  Matrix<T> u;
  std::vector<double> s;
  Matrix<T> vh;
  double discarded_weight = 0.0;
};

template <Scalar T, class Derived>
MatrixSvd<T> svd_truncate_matrix(const Eigen::MatrixBase<Derived>& m, std::size_t max_rank,
                                 double cutoff) {
  if (max_rank == 0) throw std::invalid_argument("svd_truncate: max_rank must be positive");
  if (!m.allFinite()) throw std::invalid_argument("svd_truncate: non-finite input");
  Eigen::BDCSVD<Matrix<T>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  std::vector<double> s(sv.data(), sv.data() + sv.size());
  const std::size_t k = kept_rank(s, max_rank, cutoff);
  double total = 0, dropped = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    total += s[i] * s[i];
    if (i >= k) dropped += s[i] * s[i];
  }
  MatrixSvd<T> out;
  out.u = svd.matrixU().leftCols(k);
  out.vh = svd.matrixV().leftCols(k).adjoint();
  out.s.assign(s.begin(), s.begin() + k);
  out.discarded_weight = total > 0 ? dropped / total : 0.0;
  return out;
}

template <Scalar T>
SvdResult<T> svd_truncate(const DenseTensor<T>& m, std::size_t max_rank, double cutoff) {
  if (m.rank() != 2) throw std::invalid_argument("svd_truncate: expected a rank-2 tensor");
  if (cutoff < 0) throw std::invalid_argument("svd_truncate: negative cutoff");
  auto r = svd_truncate_matrix<T>(m.matrix(1), max_rank, cutoff);
  return {DenseTensor<T>::from_matrix(r.u), std::move(r.s), DenseTensor<T>::from_matrix(r.vh),
          r.discarded_weight};
}

struct LanczosOptions {
  double tol = 1e-10;
  std::size_t max_iter = 1000;  // total matrix-vector products
  std::size_t krylov_dim = 48;  // basis size before a restart from the current Ritz vector
  std::uint64_t seed = 1;
};

template <Scalar T>
struct LanczosResult {
  double energy = 0.0;
  Vector<T> vector;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
  // Distance to the second Ritz value of the last Krylov space, NaN when unavailable.
  double gap = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

template <Scalar T>
Vector<T> random_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector<T> v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (std::same_as<T, cplx>) {
      double re = nd(rng);
      v[i] = cplx(re, nd(rng));
    } else {
      v[i] = nd(rng);
    }
  }
  return v;
}

template <Scalar T>
void orthogonalize(Vector<T>& w, const std::vector<Vector<T>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) w -= b.dot(w) * b;
  }
}

}  // namespace detail

// Lowest eigenpair of a Hermitian linear map given as apply(in, out). Lanczos with full
// reorthogonalization and restarts from the current Ritz vector. A vanishing Krylov
// residual (breakdown) injects a fresh seeded random direction.
template <Scalar T, class Apply>
LanczosResult<T> lanczos_ground(Apply&& apply, std::size_t dim, const LanczosOptions& opt = {},
                                const Vector<T>* initial = nullptr) {
  if (dim == 0) throw std::invalid_argument("lanczos_ground: dim must be positive");
  std::mt19937_64 rng(opt.seed);
  const Eigen::Index n = static_cast<Eigen::Index>(dim);
  Vector<T> v;
  if (initial && initial->size() == n && initial->norm() > 1e-300) {
    v = *initial;
  } else {
    v = detail::random_vector<T>(dim, rng);
  }
  v.normalize();

  LanczosResult<T> res;
  Vector<T> w(n);
  const std::size_t m = std::max<std::size_t>(2, std::min(opt.krylov_dim, dim));
  while (true) {
    std::vector<Vector<T>> basis{v};
    std::vector<double> alpha, beta;
    Vector<double> ritz_y;
    double theta = 0;
    bool done = false;
    // First Krylov index of the block opened by the latest breakdown, 0 if none.
    Eigen::Index block = 0;
    for (std::size_t j = 0; j < m; ++j) {
      apply(basis[j], w);
      ++res.iterations;
      const double a = std::real(basis[j].dot(w));
      alpha.push_back(a);
      detail::orthogonalize(w, basis);
      double b = w.norm();

      const Eigen::Index k = static_cast<Eigen::Index>(alpha.size());
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
      theta = es.eigenvalues()[0];
      ritz_y = es.eigenvectors().col(0);
      res.gap = k > 1 ? es.eigenvalues()[1] - theta : std::numeric_limits<double>::quiet_NaN();
      double est = b * std::abs(ritz_y[k - 1]);
      const bool exhausted = basis.size() == dim;
      const bool breakdown = b < 1e-14;
      if (block > 0) {
        // The earlier invariant subspace holds exact eigenpairs with zero residual; only
        // stop once the new block has converged its own lowest value as well.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tail(tri.bottomRightCorner(k - block, k - block));
        est = std::max(est, b * std::abs(tail.eigenvectors()(k - block - 1, 0)));
      }
      // Two vectors at least, so a gap estimate always exists.
      const bool enough = k >= 2 || dim == 1;

      if (exhausted || (enough && !breakdown && est <= 0.5 * opt.tol)) {
        done = true;
        break;
      }
      if (res.iterations >= opt.max_iter) break;
      if (breakdown) {
        Vector<T> r = detail::random_vector<T>(dim, rng);
        detail::orthogonalize(r, basis);
        r.normalize();
        basis.push_back(std::move(r));
        beta.push_back(0.0);
        block = k;
      } else if (j + 1 < m) {
        basis.push_back(w / b);
        beta.push_back(b);
      }
    }
    Vector<T> x = Vector<T>::Zero(n);
    for (std::size_t i = 0; i < basis.size() && i < static_cast<std::size_t>(ritz_y.size()); ++i) {
      x += ritz_y[static_cast<Eigen::Index>(i)] * basis[i];
    }
    x.normalize();
    apply(x, w);
    ++res.iterations;
    res.energy = std::real(x.dot(w));
    res.residual = (w - res.energy * x).norm();
    res.vector = x;
    if (res.residual <= opt.tol || (done && basis.size() == dim)) {
      res.converged = res.residual <= std::max(opt.tol, 1e-12 * (1.0 + std::abs(res.energy)));
      if (res.converged) return res;
    }
    if (res.iterations >= opt.max_iter) return res;
    v = x;
    (void)theta;
  }
}

}  // namespace spinmbqc
