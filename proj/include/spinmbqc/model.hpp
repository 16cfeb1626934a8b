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
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinmbqc/layout.hpp"
#include "spinmbqc/linalg.hpp"
#include "spinmbqc/mps.hpp"
#include "spinmbqc/spin_ops.hpp"

namespace spinmbqc {

enum class ModelKind { aklt, blbq, xxz, blocked };

inline std::string model_name(ModelKind k) {
  switch (k) {
    case ModelKind::aklt: return "aklt";
    case ModelKind::blbq: return "blbq";
    case ModelKind::xxz: return "xxz";
    case ModelKind::blocked: return "blocked";
  }
  return "?";
}

inline ModelKind parse_model(const std::string& s) {
  if (s == "aklt") return ModelKind::aklt;
  if (s == "blbq") return ModelKind::blbq;
  if (s == "xxz") return ModelKind::xxz;
  if (s == "blocked") return ModelKind::blocked;
  throw std::invalid_argument("unknown model '" + s + "'");
}

// L counts the spin-1 sites of a uniform chain, or the anisotropic-block sites of a blocked
// chain (which adds 2N junction sites).
struct HamiltonianSpec {
  ModelKind kind = ModelKind::aklt;
  std::size_t L = 1;
  double alpha = 1.0 / 3.0;
  double J = 1.0;
  double D = 0.0;
  std::size_t N = 0;

  static HamiltonianSpec aklt(std::size_t L) { return {ModelKind::aklt, L, 1.0 / 3.0, 1.0, 0.0, 0}; }
  static HamiltonianSpec blbq(std::size_t L, double alpha) { return {ModelKind::blbq, L, alpha, 1.0, 0.0, 0}; }
  static HamiltonianSpec xxz(std::size_t L, double J, double D) { return {ModelKind::xxz, L, 0.0, J, D, 0}; }
  static HamiltonianSpec blocked(std::size_t L, double J, double D, std::size_t N) {
    return {ModelKind::blocked, L, 0.0, J, D, N};
  }

  void validate() const {
    if (L == 0) throw std::invalid_argument("HamiltonianSpec: L must be positive");
    if (kind == ModelKind::blocked && L % 3 != 0) {
      throw std::invalid_argument("HamiltonianSpec: blocked chain needs L divisible by 3");
    }
    if (!std::isfinite(alpha) || !std::isfinite(J) || !std::isfinite(D)) {
      throw std::invalid_argument("HamiltonianSpec: non-finite parameter");
    }
  }

  ChainLayout layout() const {
    validate();
    return kind == ModelKind::blocked ? ChainLayout::blocked(L, N) : ChainLayout::uniform(L);
  }

  // Canonical text used for hashing and logs.
  std::string key() const {
    std::ostringstream os;
    os.precision(17);
    os << model_name(kind) << " L=" << L;
    if (kind == ModelKind::blbq) os << " alpha=" << alpha;
    if (kind == ModelKind::xxz || kind == ModelKind::blocked) os << " J=" << J << " D=" << D;
    if (kind == ModelKind::blocked) os << " N=" << N;
    return os.str();
  }
};

struct OnsiteTerm {
  std::size_t site;
  CMatrix op;
};

// left (x) right on sites (site, site + 1).
struct BondTerm {
  std::size_t site;
  CMatrix left;
  CMatrix right;
};

struct TermTable {
  ChainLayout layout;
  std::vector<OnsiteTerm> onsite;
  std::vector<BondTerm> bonds;
};

namespace detail {

// Spin operator of either kind of site: sigma/2 on the end qubits, S on spin-1 sites.
inline CMatrix site_spin(const ChainLayout& layout, std::size_t site, Axis a) {
  if (layout.is_qubit(site)) return pauli(a) / 2.0;
  return spin1_matrices()[a];
}

inline void add_exchange(TermTable& t, std::size_t i, double cx, double cy, double cz) {
  const double c[3] = {cx, cy, cz};
  for (Axis a : kAxes) {
    if (c[index_of(a)] == 0.0) continue;
    t.bonds.push_back({i, c[index_of(a)] * site_spin(t.layout, i, a), site_spin(t.layout, i + 1, a)});
  }
}

inline void add_biquadratic(TermTable& t, std::size_t i, double alpha) {
  if (alpha == 0.0) return;
  const auto s = spin1_matrices();
  for (Axis a : kAxes) {
    for (Axis b : kAxes) {
      t.bonds.push_back({i, alpha * (s[a] * s[b]), CMatrix(s[a] * s[b])});
    }
  }
}

inline void add_single_ion(TermTable& t, std::size_t i, Axis a, double d) {
  if (d == 0.0) return;
  const Mat3 s = spin1_matrices()[a];
  t.onsite.push_back({i, d * (s * s)});
}

}  // namespace detail

// Every Hamiltonian as a table of one-site and nearest-neighbour terms.
inline TermTable hamiltonian_terms(const HamiltonianSpec& spec) {
  TermTable t{spec.layout(), {}, {}};
  const std::size_t n = t.layout.n_spin1();
  switch (spec.kind) {
    case ModelKind::aklt:
    case ModelKind::blbq: {
      const double alpha = spec.kind == ModelKind::aklt ? 1.0 / 3.0 : spec.alpha;
      detail::add_exchange(t, 0, 1, 1, 1);
      for (std::size_t i = 1; i < n; ++i) {
        detail::add_exchange(t, i, 1, 1, 1);
        detail::add_biquadratic(t, i, alpha);
      }
      detail::add_exchange(t, n, 1, 1, 1);
      break;
    }
    case ModelKind::xxz: {
      for (std::size_t i = 0; i <= n; ++i) detail::add_exchange(t, i, 1, 1, spec.J);
      for (std::size_t i = 1; i <= n; ++i) detail::add_single_ion(t, i, Axis::z, spec.D);
      break;
    }
    case ModelKind::blocked: {
      const std::size_t b = spec.L / 3, j = spec.N;
      const double J = spec.J, D = spec.D;
      // Block A: Ising axis and single-ion axis z, including the input coupling.
      detail::add_exchange(t, 0, 1, 1, J);
      for (std::size_t i = 1; i + 1 <= b; ++i) detail::add_exchange(t, i, 1, 1, J);
      for (std::size_t i = 1; i <= b; ++i) detail::add_single_ion(t, i, Axis::z, D);
      // Left junction: isotropic bonds b .. b+N.
      for (std::size_t i = b; i <= b + j; ++i) detail::add_exchange(t, i, 1, 1, 1);
      // Block B: axis y.
      for (std::size_t i = b + j + 1; i + 1 <= 2 * b + j; ++i) detail::add_exchange(t, i, 1, J, 1);
      for (std::size_t i = b + j + 1; i <= 2 * b + j; ++i) detail::add_single_ion(t, i, Axis::y, D);
      // Right junction: isotropic bonds 2b+N .. 2b+2N.
      for (std::size_t i = 2 * b + j; i <= 2 * b + 2 * j; ++i) detail::add_exchange(t, i, 1, 1, 1);
      // Block C: axis x, including the output coupling.
      for (std::size_t i = 2 * b + 2 * j + 1; i + 1 <= n; ++i) detail::add_exchange(t, i, J, 1, 1);
      for (std::size_t i = 2 * b + 2 * j + 1; i <= n; ++i) detail::add_single_ion(t, i, Axis::x, D);
      detail::add_exchange(t, n, J, 1, 1);
      break;
    }
  }
  return t;
}

// Operator-valued matrices W[wl, out, in, wr], one per site.
template <Scalar T = cplx>
struct Mpo {
  ChainLayout layout;
  std::vector<DenseTensor<T>> tensors;

  std::size_t size() const { return tensors.size(); }
  std::vector<std::size_t> bond_dims() const {
    std::vector<std::size_t> b;
    for (std::size_t i = 0; i + 1 < tensors.size(); ++i) b.push_back(tensors[i].extent(3));
    return b;
  }
};

namespace detail {

// Splits sum_k left_k (x) right_k into a minimal sum by a singular value decomposition of the
// operator reshaped as (left row, left col) x (right row, right col).
template <Scalar T>
std::vector<std::pair<Matrix<T>, Matrix<T>>> schmidt_split(const std::vector<const BondTerm*>& terms,
                                                          Eigen::Index d1, Eigen::Index d2) {
  CMatrix r = CMatrix::Zero(d1 * d1, d2 * d2);
  for (const BondTerm* t : terms) {
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, 1>> a(t->left.data(), d1 * d1);
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, 1>> b(t->right.data(), d2 * d2);
    r += a * b.transpose();
  }
  Matrix<T> rt;
  if constexpr (std::same_as<T, double>) {
    if (r.imag().cwiseAbs().maxCoeff() > 1e-14) {
      throw std::invalid_argument("build_mpo: bond operator is not real");
    }
    rt = r.real();
  } else {
    rt = r;
  }
  std::vector<std::pair<Matrix<T>, Matrix<T>>> out;
  if (rt.size() == 0 || rt.cwiseAbs().maxCoeff() == 0) return out;
  Eigen::JacobiSVD<Matrix<T>> svd(rt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] <= 1e-13 * s[0]) break;
    const double w = std::sqrt(s[k]);
    Matrix<T> ua = w * svd.matrixU().col(k);
    Matrix<T> vb = w * svd.matrixV().col(k).conjugate();
    out.emplace_back(Eigen::Map<Matrix<T>>(ua.data(), d1, d1), Eigen::Map<Matrix<T>>(vb.data(), d2, d2));
  }
  return out;
}

}  // namespace detail

// Lower-triangular finite-state MPO. Bond b carries index 0 ("done"), 1..r_b (a two-site
// term started on site b) and r_b + 1 ("nothing yet").
template <Scalar T = cplx>
Mpo<T> build_mpo(const TermTable& table) {
  const ChainLayout& layout = table.layout;
  const std::size_t n = layout.n_sites();
  std::vector<std::vector<std::pair<Matrix<T>, Matrix<T>>>> split(n - 1);
  for (std::size_t b = 0; b + 1 < n; ++b) {
    std::vector<const BondTerm*> terms;
    for (const auto& t : table.bonds) {
      if (t.site >= n - 1) throw std::invalid_argument("build_mpo: bond term beyond chain end");
      if (t.site == b) terms.push_back(&t);
    }
    split[b] = detail::schmidt_split<T>(terms, layout.local_dim(b), layout.local_dim(b + 1));
  }
  std::vector<Matrix<T>> onsite(n);
  for (std::size_t i = 0; i < n; ++i) onsite[i] = Matrix<T>::Zero(layout.local_dim(i), layout.local_dim(i));
  for (const auto& t : table.onsite) {
    if (t.site >= n) throw std::invalid_argument("build_mpo: onsite term beyond chain end");
    if constexpr (std::same_as<T, double>) {
      if (t.op.imag().cwiseAbs().maxCoeff() > 1e-14) throw std::invalid_argument("build_mpo: onsite term is not real");
      onsite[t.site] += t.op.real();
    } else {
      onsite[t.site] += t.op;
    }
  }

  Mpo<T> mpo{layout, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = layout.local_dim(i);
    const std::size_t wl = i == 0 ? 1 : split[i - 1].size() + 2;
    const std::size_t wr = i + 1 == n ? 1 : split[i].size() + 2;
    const std::size_t ready_l = wl - 1, ready_r = wr - 1;
    DenseTensor<T> w({wl, d, d, wr});
    auto put = [&](std::size_t l, std::size_t r, const Matrix<T>& op) {
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t t = 0; t < d; ++t) w.at({l, s, t, r}) += op(s, t);
    };
    const Matrix<T> id = Matrix<T>::Identity(d, d);
    if (i > 0 && i + 1 < n) put(0, 0, id);
    if (i + 1 < n) put(ready_l, ready_r, id);
    if (i > 0 && i + 1 == n) put(0, 0, id);
    if (i + 1 < n) {
      for (std::size_t k = 0; k < split[i].size(); ++k) put(ready_l, k + 1, split[i][k].first);
    }
    if (i > 0) {
      for (std::size_t k = 0; k < split[i - 1].size(); ++k) put(k + 1, 0, split[i - 1][k].second);
    }
    if (i == 0 && n == 1) put(0, 0, id);
    put(ready_l, 0, onsite[i]);
    mpo.tensors.push_back(std::move(w));
  }
  return mpo;
}

template <Scalar T = cplx>
Mpo<T> build_mpo(const HamiltonianSpec& spec) {
  return build_mpo<T>(hamiltonian_terms(spec));
}

// Nonzero (wl, wr) operator blocks of one MPO site.
template <Scalar T>
struct MpoBlock {
  Eigen::Index wl = 0, wr = 0;
  RowMatrix<T> op;  // (out, in)
};

template <Scalar T>
struct SparseMpoSite {
  Eigen::Index wl = 1, wr = 1, d = 1;
  std::vector<MpoBlock<T>> blocks;
};

template <Scalar T>
std::vector<SparseMpoSite<T>> sparse_sites(const Mpo<T>& h) {
  std::vector<SparseMpoSite<T>> out;
  for (const auto& w : h.tensors) {
    SparseMpoSite<T> s;
    s.wl = w.extent(0);
    s.d = w.extent(1);
    s.wr = w.extent(3);
    for (Eigen::Index l = 0; l < s.wl; ++l) {
      for (Eigen::Index r = 0; r < s.wr; ++r) {
        RowMatrix<T> op(s.d, s.d);
        for (Eigen::Index a = 0; a < s.d; ++a)
          for (Eigen::Index b = 0; b < s.d; ++b)
            op(a, b) = w.at({std::size_t(l), std::size_t(a), std::size_t(b), std::size_t(r)});
        if (op.cwiseAbs().maxCoeff() != 0) s.blocks.push_back({l, r, std::move(op)});
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Environment blocks E[w](bra bond, ket bond); an empty matrix stands for zero.
template <Scalar T>
using Environment = std::vector<RowMatrix<T>>;

namespace detail {

template <Scalar T>
Environment<T> grow_left(const Environment<T>& env, const SparseMpoSite<T>& w, const DenseTensor<T>& bra,
                         const DenseTensor<T>& ket) {
  const Eigen::Index l = ket.extent(0), d = ket.extent(1), r = ket.extent(2);
  const Eigen::Index lb = bra.extent(0), rb = bra.extent(2);
  Eigen::Map<const RowMatrix<T>> ket_mr(ket.data(), l, d * r);
  Eigen::Map<const RowMatrix<T>> bra_ml(bra.data(), lb * d, rb);
  std::vector<RowMatrix<T>> t(env.size());
  for (std::size_t a = 0; a < env.size(); ++a) {
    if (env[a].size() != 0) t[a].noalias() = env[a] * ket_mr;
  }
  std::vector<RowMatrix<T>> v(w.wr);
  for (const auto& blk : w.blocks) {
    const auto& src = t[blk.wl];
    if (src.size() == 0) continue;
    auto& dst = v[blk.wr];
    if (dst.size() == 0) dst = RowMatrix<T>::Zero(lb * d, r);
    for (Eigen::Index a = 0; a < lb; ++a) {
      Eigen::Map<RowMatrix<T>>(dst.data() + a * d * r, d, r).noalias() +=
          blk.op * Eigen::Map<const RowMatrix<T>>(src.data() + a * d * r, d, r);
    }
  }
  Environment<T> out(w.wr);
  for (Eigen::Index a = 0; a < w.wr; ++a) {
    if (v[a].size() != 0) out[a].noalias() = bra_ml.adjoint() * v[a];
  }
  return out;
}

template <Scalar T>
Environment<T> grow_right(const Environment<T>& env, const SparseMpoSite<T>& w, const DenseTensor<T>& bra,
                          const DenseTensor<T>& ket) {
  const Eigen::Index l = ket.extent(0), d = ket.extent(1), r = ket.extent(2);
  const Eigen::Index lb = bra.extent(0), rb = bra.extent(2);
  Eigen::Map<const RowMatrix<T>> ket_ml(ket.data(), l * d, r);
  Eigen::Map<const RowMatrix<T>> bra_mr(bra.data(), lb, d * rb);
  std::vector<RowMatrix<T>> t(env.size());
  for (std::size_t a = 0; a < env.size(); ++a) {
    if (env[a].size() != 0) t[a].noalias() = ket_ml * env[a].transpose();
  }
  std::vector<RowMatrix<T>> v(w.wl);
  for (const auto& blk : w.blocks) {
    const auto& src = t[blk.wr];
    if (src.size() == 0) continue;
    auto& dst = v[blk.wl];
    if (dst.size() == 0) dst = RowMatrix<T>::Zero(l, d * rb);
    for (Eigen::Index a = 0; a < l; ++a) {
      Eigen::Map<RowMatrix<T>>(dst.data() + a * d * rb, d, rb).noalias() +=
          blk.op * Eigen::Map<const RowMatrix<T>>(src.data() + a * d * rb, d, rb);
    }
  }
  Environment<T> out(w.wl);
  for (Eigen::Index a = 0; a < w.wl; ++a) {
    if (v[a].size() != 0) out[a].noalias() = bra_mr.conjugate() * v[a].transpose();
  }
  return out;
}

template <Scalar T>
Environment<T> unit_environment() {
  return Environment<T>{RowMatrix<T>::Ones(1, 1)};
}

}  // namespace detail

template <Scalar T>
Mpo<cplx> to_complex(const Mpo<T>& h) {
  Mpo<cplx> out{h.layout, {}};
  for (const auto& w : h.tensors) out.tensors.push_back(w.template cast<cplx>());
  return out;
}

template <Scalar T>
cplx mpo_bracket(const Mpo<T>& h, const Mps<T>& bra, const Mps<T>& ket) {
  if (!(h.layout == bra.layout()) || !(h.layout == ket.layout())) {
    throw std::invalid_argument("mpo_bracket: layout mismatch");
  }
  const auto sites = sparse_sites(h);
  auto env = detail::unit_environment<T>();
  for (std::size_t i = 0; i < sites.size(); ++i) env = detail::grow_left(env, sites[i], bra[i], ket[i]);
  return env[0].size() ? cplx(env[0](0, 0)) : cplx(0);
}

template <Scalar T>
double expect_mpo(const Mpo<T>& h, const Mps<T>& s) {
  const cplx v = mpo_bracket(h, s, s);
  const double scale = std::max(1.0, std::abs(v));
  if (std::abs(v.imag()) > 1e-10 * scale) throw std::runtime_error("expect_mpo: non-real expectation");
  return v.real();
}

template <Scalar T>
struct ApplyResult {
  Mps<T> state;
  double discarded_weight = 0.0;
};

// H|s> as an MPS: exact site-wise product, then a right-to-left SVD compression of the
// left-canonical form.
template <Scalar T>
ApplyResult<T> apply_mpo(const Mpo<T>& h, const Mps<T>& s, std::size_t max_bond = static_cast<std::size_t>(-1),
                         double cutoff = 0.0) {
  if (!(h.layout == s.layout())) throw std::invalid_argument("apply_mpo: layout mismatch");
  std::vector<DenseTensor<T>> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& w = h.tensors[i];
    const auto& a = s[i];
    const std::size_t wl = w.extent(0), d = w.extent(1), wr = w.extent(3);
    const std::size_t l = a.extent(0), r = a.extent(2);
    DenseTensor<T> c({l * wl, d, r * wr});
    for (std::size_t x = 0; x < l; ++x)
      for (std::size_t p = 0; p < wl; ++p)
        for (std::size_t so = 0; so < d; ++so)
          for (std::size_t si = 0; si < d; ++si)
            for (std::size_t q = 0; q < wr; ++q) {
              const T wv = w.at({p, so, si, q});
              if (wv == T{}) continue;
              for (std::size_t y = 0; y < r; ++y) {
                c.at({x * wl + p, so, y * wr + q}) += wv * a.at({x, si, y});
              }
            }
    out.push_back(std::move(c));
  }
  Mps<T> exact(s.layout(), std::move(out));
  const bool compress = max_bond != static_cast<std::size_t>(-1) || cutoff > 0;
  if (!compress) return {exact, 0.0};
  Mps<T> lc = canonicalize(exact, exact.size() - 1);
  std::vector<DenseTensor<T>> t = lc.tensors();
  double discarded = 0;
  for (std::size_t i = t.size() - 1; i > 0; --i) {
    const std::size_t l = t[i].extent(0), d = t[i].extent(1), r = t[i].extent(2);
    auto svd = svd_truncate_matrix<T>(t[i].matrix(1), max_bond, cutoff);
    discarded += svd.discarded_weight;
    const std::size_t k = svd.s.size();
    DenseTensor<T> nt({k, d, r});
    nt.matrix(1) = svd.vh;
    t[i] = std::move(nt);
    Matrix<T> us = svd.u;
    for (std::size_t j = 0; j < k; ++j) us.col(static_cast<Eigen::Index>(j)) *= svd.s[j];
    const auto& pv = t[i - 1];
    Matrix<T> merged = pv.matrix(2) * us;
    t[i - 1] = detail::site_tensor<T>(merged, pv.extent(0), pv.extent(1), k);
    (void)l;
  }
  return {Mps<T>(s.layout(), std::move(t), 0), discarded};
}

// <H^2> - <H>^2 for a normalized state, from the exact product H|s>.
template <Scalar T>
double variance(const Mpo<T>& h, const Mps<T>& s) {
  const double e = expect_mpo(h, s);
  const auto hs = apply_mpo(h, s).state;
  const double h2 = inner(hs, hs).real();
  return h2 - e * e;
}

// Dense matrix of an MPO in the lexicographic basis; for checks on short chains.
template <Scalar T>
Matrix<T> mpo_to_dense(const Mpo<T>& h, std::size_t cap = 4096) {
  if (h.layout.dense_dim() > cap) throw std::length_error("mpo_to_dense: dimension exceeds cap");
  std::vector<Matrix<T>> acc{Matrix<T>::Ones(1, 1)};
  for (const auto& w : h.tensors) {
    const std::size_t wl = w.extent(0), d = w.extent(1), wr = w.extent(3);
    const Eigen::Index p = acc[0].rows();
    std::vector<Matrix<T>> next(wr, Matrix<T>::Zero(p * d, p * d));
    for (std::size_t a = 0; a < wl; ++a) {
      for (std::size_t b = 0; b < wr; ++b) {
        Matrix<T> op(d, d);
        for (std::size_t s = 0; s < d; ++s)
          for (std::size_t t = 0; t < d; ++t) op(s, t) = w.at({a, s, t, b});
        if (op.cwiseAbs().maxCoeff() == 0) continue;
        for (Eigen::Index x = 0; x < p; ++x)
          for (Eigen::Index y = 0; y < p; ++y) {
            const T v = acc[a](x, y);
            if (v == T{}) continue;
            next[b].block(x * d, y * d, d, d) += v * op;
          }
      }
    }
    acc = std::move(next);
  }
  return acc[0];
}

}  // namespace spinmbqc
