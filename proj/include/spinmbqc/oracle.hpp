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
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "spinmbqc/layout.hpp"
#include "spinmbqc/linalg.hpp"
#include "spinmbqc/model.hpp"
#include "spinmbqc/mps.hpp"
#include "spinmbqc/spin_ops.hpp"

namespace spinmbqc {

struct DenseState {
  ChainLayout layout;
  CVector amplitudes;
};

template <Scalar T>
DenseState dense_state(const Mps<T>& s, std::size_t cap = kDefaultDenseCap) {
  return {s.layout(), to_dense(s, cap).template cast<cplx>()};
}

using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Sum of the term table with each term embedded by Kronecker products with identities.
inline SparseOperator sparse_hamiltonian(const TermTable& table, std::size_t cap = kDefaultDenseCap) {
  const auto dims = table.layout.local_dims();
  const std::size_t dim = table.layout.dense_dim();
  if (dim > cap) throw std::length_error("sparse_hamiltonian: dimension exceeds cap");
  const std::size_t n = dims.size();
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = n - 1; i > 0; --i) stride[i - 1] = stride[i] * dims[i];

  std::vector<Eigen::Triplet<cplx>> trip;
  // op acts on sites [site, site + span) with combined local dimension op.rows().
  auto embed = [&](std::size_t site, std::size_t span, const CMatrix& op) {
    std::size_t local = 1;
    for (std::size_t k = 0; k < span; ++k) local *= dims[site + k];
    const std::size_t inner = stride[site + span - 1];
    const std::size_t outer = stride[site] * dims[site];
    (void)outer;
    for (std::size_t x = 0; x < dim; ++x) {
      const std::size_t loc = (x / inner) % local;
      const std::size_t base = x - loc * inner;
      for (std::size_t out = 0; out < local; ++out) {
        const cplx v = op(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(loc));
        if (v != cplx(0)) trip.emplace_back(static_cast<int>(base + out * inner), static_cast<int>(x), v);
      }
    }
  };
  for (const auto& t : table.onsite) embed(t.site, 1, t.op);
  for (const auto& t : table.bonds) {
    CMatrix k(t.left.rows() * t.right.rows(), t.left.cols() * t.right.cols());
    for (Eigen::Index a = 0; a < t.left.rows(); ++a)
      for (Eigen::Index b = 0; b < t.left.cols(); ++b)
        k.block(a * t.right.rows(), b * t.right.cols(), t.right.rows(), t.right.cols()) = t.left(a, b) * t.right;
    embed(t.site, 2, k);
  }
  SparseOperator h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

struct ExactGroundState {
  DenseState state;
  double energy = 0.0;
  double gap = std::numeric_limits<double>::quiet_NaN();  // to the next eigenvalue
  bool degenerate = false;                               // gap below 1e-10
};

// Lowest eigenpair: dense diagonalization for small spaces, Lanczos with one deflated pass
// for the gap otherwise.
inline ExactGroundState exact_ground_state(const HamiltonianSpec& spec, std::size_t cap = kDefaultDenseCap,
                                           std::uint64_t seed = 7) {
  const TermTable table = hamiltonian_terms(spec);
  const SparseOperator h = sparse_hamiltonian(table, cap);
  const Eigen::Index dim = h.rows();
  ExactGroundState out;
  out.state.layout = table.layout;
  if (dim <= 2000) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es{CMatrix(h)};
    out.energy = es.eigenvalues()[0];
    out.state.amplitudes = es.eigenvectors().col(0);
    if (dim > 1) out.gap = es.eigenvalues()[1] - es.eigenvalues()[0];
  } else {
    LanczosOptions opt;
    opt.tol = 1e-11;
    opt.max_iter = 20000;
    opt.krylov_dim = 80;
    opt.seed = seed;
    auto apply = [&](const CVector& x, CVector& y) { y = h * x; };
    auto r0 = lanczos_ground<cplx>(apply, static_cast<std::size_t>(dim), opt);
    if (!r0.converged) throw std::runtime_error("exact_ground_state: Lanczos did not converge");
    out.energy = r0.energy;
    out.state.amplitudes = r0.vector;
    const double shift = 10.0 + std::abs(r0.energy);
    const CVector v0 = r0.vector;
    auto deflated = [&](const CVector& x, CVector& y) { y = h * x + shift * v0 * v0.dot(x); };
    opt.seed = seed + 1;
    auto r1 = lanczos_ground<cplx>(deflated, static_cast<std::size_t>(dim), opt);
    out.gap = r1.energy - r0.energy;
  }
  out.degenerate = out.gap < 1e-10;
  return out;
}

struct TwoQubitDensityMatrix {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();  // basis |in out>, in most significant
};

// Protocol for an R_z(theta) gate on a uniform chain, or R_x(theta)R_y(phi)R_z(lambda) on a
// blocked chain.
struct Protocol {
  enum class Kind { rz, unitary };
  Kind kind = Kind::rz;
  double theta = 0.0, phi = 0.0, lambda = 0.0;

  static Protocol rz(double theta) { return {Kind::rz, theta, 0.0, 0.0}; }
  static Protocol unitary(double theta, double phi, double lambda) { return {Kind::unitary, theta, phi, lambda}; }

  Mat2 gate() const {
    if (kind == Kind::rz) return rotation_gate(Axis::z, theta);
    return rotation_gate(Axis::x, theta) * rotation_gate(Axis::y, phi) * rotation_gate(Axis::z, lambda);
  }
};

struct SiteOutcome {
  std::size_t site = 0;
  Axis label = Axis::z;
  bool rotated = false;  // measured in a rotated basis
  Axis axis = Axis::z;   // rotation axis when rotated
  double angle = 0.0;    // signed measured angle when rotated
  bool success = false;  // label differs from the rotation axis
};

struct OutcomeSequence {
  std::vector<SiteOutcome> outcomes;
  int frame_x = 1, frame_z = 1;  // accumulated Pauli frame X^fx Z^fz on the output qubit
};

// Pauli exponents of an outcome label: x -> X, y -> XZ, z -> Z.
inline constexpr int label_x(Axis a) { return a == Axis::z ? 0 : 1; }
inline constexpr int label_z(Axis a) { return a == Axis::x ? 0 : 1; }

inline Mat2 pauli_frame(int fx, int fz) {
  Mat2 m = Mat2::Identity();
  if (fx & 1) m = m * pauli(Axis::x);
  if (fz & 1) m = m * pauli(Axis::z);
  return m;
}

// 1 when X^fx Z^fz anticommutes with sigma^a.
inline constexpr int anticommutes(int fx, int fz, Axis a) {
  return ((fx & 1) * label_z(a) + (fz & 1) * label_x(a)) & 1;
}

namespace detail {

struct SitePlan {
  bool rotated = false;
  Axis axis = Axis::z;
  double angle = 0.0;
  int block = -1;
};

inline std::vector<SitePlan> protocol_plan(const ChainLayout& layout, const Protocol& p) {
  std::vector<SitePlan> plan(layout.n_spin1() + 2);
  if (p.kind == Protocol::Kind::rz) {
    if (layout.is_blocked()) throw std::invalid_argument("protocol: rz needs a uniform chain");
    for (std::size_t i = 1; i <= layout.n_spin1(); ++i) plan[i] = {true, Axis::z, p.theta, 0};
    return plan;
  }
  if (!layout.is_blocked()) throw std::invalid_argument("protocol: unitary needs a blocked chain");
  int block = 0;
  for (const auto& seg : layout.segments()) {
    if (!seg.axis) continue;
    const double ang = *seg.axis == Axis::z ? p.lambda : (*seg.axis == Axis::y ? p.phi : p.theta);
    for (std::size_t i = seg.first; i <= seg.last; ++i) plan[i] = {true, *seg.axis, ang, block};
    ++block;
  }
  return plan;
}

}  // namespace detail

using BranchVisitor = std::function<void(const OutcomeSequence&, double probability)>;

// Depth-first walk over every outcome sequence. Until a block's first success its sites are
// measured in the rotated basis with the sign of the angle set by the current Pauli frame;
// all other sites use the unrotated basis. Returns the frame-corrected output state summed
// as a density matrix.
inline TwoQubitDensityMatrix enumerate_rho_u(const DenseState& g, const Protocol& p,
                                             const BranchVisitor& visit = nullptr, std::size_t max_spin1 = 8) {
  const std::size_t n = g.layout.n_spin1();
  if (n > max_spin1) throw std::length_error("enumerate_rho_u: chain too long to enumerate");
  if (static_cast<std::size_t>(g.amplitudes.size()) != g.layout.dense_dim()) {
    throw std::invalid_argument("enumerate_rho_u: amplitude count does not match layout");
  }
  const auto plan = detail::protocol_plan(g.layout, p);

  OutcomeSequence seq;
  std::vector<bool> block_done(3, false);
  // cur holds amplitudes (in, remaining spin-1 sites, out) with the measured prefix removed.
  std::function<Eigen::Matrix4cd(std::size_t, const CVector&)> rec = [&](std::size_t site, const CVector& cur) {
    if (site > n) {
      Eigen::Vector4cd v;
      for (int k = 0; k < 4; ++k) v[k] = cur[k];
      const Mat2 corr = pauli_frame(seq.frame_x, seq.frame_z).adjoint();
      Eigen::Vector4cd w;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) w[2 * a + b] = corr(b, 0) * v[2 * a] + corr(b, 1) * v[2 * a + 1];
      if (visit) visit(seq, w.squaredNorm());
      return Eigen::Matrix4cd(w * w.adjoint());
    }
    const auto& sp = plan[site];
    MeasurementBasis basis = measurement_basis(Axis::z, 0.0);
    bool rotated = false;
    double angle = 0.0;
    if (sp.rotated && !block_done[sp.block]) {
      rotated = true;
      const int a = anticommutes(seq.frame_x, seq.frame_z, sp.axis);
      angle = a ? sp.angle : -sp.angle;
      basis = measurement_basis(sp.axis, angle);
    }
    const std::size_t rest = static_cast<std::size_t>(cur.size()) / 12;  // 2 * 3 * rest * 2
    Eigen::Matrix4cd acc = Eigen::Matrix4cd::Zero();
    for (Axis label : kAxes) {
      const Vec3& v = basis.vector(label);
      CVector next(static_cast<Eigen::Index>(4 * rest));
      for (std::size_t in = 0; in < 2; ++in)
        for (std::size_t r = 0; r < rest; ++r)
          for (std::size_t out = 0; out < 2; ++out) {
            cplx s = 0;
            for (std::size_t m = 0; m < 3; ++m) s += std::conj(v[m]) * cur[((in * 3 + m) * rest + r) * 2 + out];
            next[(in * rest + r) * 2 + out] = s;
          }
      const bool success = rotated && label != sp.axis;
      const int fx = seq.frame_x, fz = seq.frame_z;
      seq.frame_x ^= label_x(label);
      seq.frame_z ^= label_z(label);
      seq.outcomes.push_back({site, label, rotated, sp.axis, angle, success});
      const bool was_done = sp.block >= 0 ? block_done[sp.block] : false;
      if (success) block_done[sp.block] = true;
      acc += rec(site + 1, next);
      if (sp.block >= 0) block_done[sp.block] = was_done;
      seq.outcomes.pop_back();
      seq.frame_x = fx;
      seq.frame_z = fz;
    }
    return acc;
  };
  TwoQubitDensityMatrix out;
  out.rho = rec(1, g.amplitudes);
  return out;
}

inline Eigen::Vector4cd bell_phi_plus() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v[0] = v[3] = std::sqrt(0.5);
  return v;
}

// (I (x) U)|phi+>.
inline Eigen::Vector4cd gate_state(const Mat2& u) {
  Eigen::Vector4cd v;
  const double r = std::sqrt(0.5);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) v[2 * a + b] = r * u(b, a);
  return v;
}

inline double fidelity_from_rho(const TwoQubitDensityMatrix& rho, const Mat2& gate) {
  const Eigen::Vector4cd psi = gate_state(gate);
  return std::real(psi.dot(rho.rho * psi));
}

}  // namespace spinmbqc
