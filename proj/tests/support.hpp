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

// Dense reference constructions used as independent oracles by the unit tests. Nothing
// here goes through the MPS or MPO code paths.

#pragma once

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "spinmbqc/spinmbqc.hpp"

namespace spinmbqc::testref {

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// Full operator for a product of single-site operators, site 0 leftmost.
inline CMatrix embed(const std::vector<std::size_t>& dims, const std::map<std::size_t, CMatrix>& ops) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    auto it = ops.find(i);
    const auto d = static_cast<Eigen::Index>(dims[i]);
    out = kron(out, it == ops.end() ? CMatrix(CMatrix::Identity(d, d)) : it->second);
  }
  return out;
}

inline CMatrix embed(const std::vector<std::size_t>& dims, const OperatorString& op) {
  return embed(dims, op.terms());
}

inline cplx dense_expect(const CVector& v, const std::vector<std::size_t>& dims, const OperatorString& op) {
  return v.dot(embed(dims, op) * v);
}

// Unnormalized valence-bond state: singlets (in,1), (1bar,2), ..., (Lbar,out), then each
// pair (i, ibar) projected onto spin 1: |00> -> |+>, (|01> + |10>)/sqrt2 -> |0>, |11> -> |->.
inline CVector aklt_from_singlets(std::size_t n) {
  const std::size_t nq = 2 * n + 2;  // qubits: in, 1, 1bar, ..., n, nbar, out
  std::vector<std::size_t> dims{2};
  for (std::size_t i = 0; i < n; ++i) dims.push_back(3);
  dims.push_back(2);
  std::size_t dim = 1;
  for (auto d : dims) dim *= d;
  CVector out = CVector::Zero(static_cast<Eigen::Index>(dim));
  const double s = 1 / std::sqrt(2.0);
  for (std::size_t cfg = 0; cfg < (std::size_t{1} << nq); ++cfg) {
    auto bit = [&](std::size_t q) { return int((cfg >> (nq - 1 - q)) & 1); };
    double amp = 1;
    // Singlet pairs are qubits (2k, 2k+1) for k = 0..n.
    for (std::size_t k = 0; k <= n && amp != 0; ++k) {
      const int a = bit(2 * k), b = bit(2 * k + 1);
      amp *= a == b ? 0.0 : (a == 0 ? s : -s);
    }
    if (amp == 0) continue;
    std::size_t index = std::size_t(bit(0));
    for (std::size_t i = 0; i < n; ++i) {
      const int a = bit(2 * i + 1), b = bit(2 * i + 2);
      const int m = a + b;  // 0 -> |+>, 1 -> |0>, 2 -> |->
      amp *= m == 1 ? 1 / std::sqrt(2.0) : 1.0;
      index = index * 3 + std::size_t(m);
    }
    index = index * 2 + std::size_t(bit(nq - 1));
    out[static_cast<Eigen::Index>(index)] += amp;
  }
  return out;
}

inline CMatrix random_hermitian(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return (a + a.adjoint()) / 2.0;
}

inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return a;
}

inline CVector normalized_random(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CVector v = random_matrix(n, 1, rng);
  return v / v.norm();
}

// Spin matrices written out by hand, independent of spin1_matrices().
inline std::array<CMatrix, 3> hand_spin1() {
  const double r = 1 / std::sqrt(2.0);
  const cplx i(0, 1);
  CMatrix sx(3, 3), sy(3, 3), sz(3, 3);
  sx << 0, r, 0, r, 0, r, 0, r, 0;
  sy << 0, -i * r, 0, i * r, 0, -i * r, 0, i * r, 0;
  sz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  return {sx, sy, sz};
}

inline std::array<CMatrix, 3> hand_pauli() {
  const cplx i(0, 1);
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, -i, i, 0;
  z << 1, 0, 0, -1;
  return {x, y, z};
}

// Hamiltonian of the uniform chains by Kronecker products. Qubit spins are sigma/2.
// cx, cy, cz weight the exchange components, alpha the biquadratic term and d the
// single-ion (S^z)^2 term on spin-1 sites.
inline CMatrix chain_hamiltonian(std::size_t n, double cx, double cy, double cz, double alpha, double d) {
  std::vector<std::size_t> dims{2};
  for (std::size_t i = 0; i < n; ++i) dims.push_back(3);
  dims.push_back(2);
  const auto s1 = hand_spin1();
  const auto p = hand_pauli();
  auto spin = [&](std::size_t site, int a) -> CMatrix {
    return dims[site] == 2 ? CMatrix(p[a] / 2.0) : s1[a];
  };
  const std::size_t dim = [&] {
    std::size_t x = 1;
    for (auto v : dims) x *= v;
    return x;
  }();
  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const double c[3] = {cx, cy, cz};
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    CMatrix ss = CMatrix::Zero(h.rows(), h.cols());
    for (int a = 0; a < 3; ++a) {
      CMatrix term = embed(dims, {{i, spin(i, a)}, {i + 1, spin(i + 1, a)}});
      h += c[a] * term;
      ss += term;
    }
    if (alpha != 0 && dims[i] == 3 && dims[i + 1] == 3) h += alpha * ss * ss;
  }
  for (std::size_t i = 1; i <= n; ++i) h += d * embed(dims, {{i, CMatrix(s1[2] * s1[2])}});
  return h;
}

}  // namespace spinmbqc::testref
