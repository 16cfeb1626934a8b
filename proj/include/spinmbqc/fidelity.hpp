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

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinmbqc/mps.hpp"
#include "spinmbqc/spin_ops.hpp"

namespace spinmbqc {

enum class GateKind { identity, rz, unitary };
enum class Method { expansion, haldane_closed_form, oracle };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::expansion: return "expansion";
    case Method::haldane_closed_form: return "haldane_closed_form";
    case Method::oracle: return "oracle";
  }
  return "?";
}

struct Gate {
  GateKind kind = GateKind::identity;
  double theta = 0.0, phi = 0.0, lambda = 0.0;

  static Gate identity() { return {}; }
  static Gate rz(double theta) { return {GateKind::rz, theta, 0.0, 0.0}; }
  static Gate unitary(double theta, double phi, double lambda) { return {GateKind::unitary, theta, phi, lambda}; }

  Mat2 matrix() const {
    switch (kind) {
      case GateKind::identity: return Mat2::Identity();
      case GateKind::rz: return rotation_gate(Axis::z, theta);
      case GateKind::unitary: break;
    }
    return rotation_gate(Axis::x, theta) * rotation_gate(Axis::y, phi) * rotation_gate(Axis::z, lambda);
  }

  std::string label() const {
    char buf[96];
    switch (kind) {
      case GateKind::identity: return "Identity";
      case GateKind::rz: std::snprintf(buf, sizeof buf, "Rz(%.12g)", theta); return buf;
      case GateKind::unitary: break;
    }
    std::snprintf(buf, sizeof buf, "Unitary(%.12g,%.12g,%.12g)", theta, phi, lambda);
    return buf;
  }
};

struct FidelityDiagnostics {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  double raw_value = nan;
  double g_corr = nan;
  double g_fail = nan;
  std::array<double, 3> string_order{nan, nan, nan};
  double energy = nan;
  double variance = nan;
  // Set when a formula was used outside the regime it assumes.
  bool advisory = false;
};

struct FidelityReport {
  Gate gate;
  Method method = Method::expansion;
  double value = 0.0;  // clamped to [0, 1]
  FidelityDiagnostics diagnostics;
};

inline FidelityReport make_report(const Gate& gate, Method method, double raw, FidelityDiagnostics diag = {}) {
  diag.raw_value = raw;
  return {gate, method, std::clamp(raw, 0.0, 1.0), diag};
}

namespace detail {

inline double checked_real(cplx v, const char* what) {
  if (std::abs(v.imag()) > 1e-8) {
    throw std::runtime_error(std::string(what) + ": imaginary part " + std::to_string(v.imag()));
  }
  return v.real();
}

inline Mat3 z_projector() { return projector(basis_state(Axis::z)); }

}  // namespace detail

// -<sigma^a_in (prod e^{-i pi S^a}) sigma^a_out>.
inline double string_order(const Mps<cplx>& g, Axis a) {
  const std::size_t n = g.layout().n_spin1();
  OperatorString op;
  op.set(0, pauli(a));
  const Mat3 par = spin1_parity(a);
  for (std::size_t i = 1; i <= n; ++i) op.set(i, par);
  op.set(n + 1, pauli(a));
  return -detail::checked_real(expect_string(g, op), "string_order");
}

inline std::array<double, 3> string_orders(const Mps<cplx>& g) {
  return {string_order(g, Axis::x), string_order(g, Axis::y), string_order(g, Axis::z)};
}

inline double identity_fidelity(const Mps<cplx>& g) {
  const auto o = string_orders(g);
  return 0.25 + 0.25 * (o[0] + o[1] + o[2]);
}

// Interference term of the R_z expansion: the sum over the first-success site k of
//   < sigma^nu_in (prod_{i<k} |z><z| P^mu) (S_k P^mu(theta)) (prod_{j>k} P^mu) sigma^mu_out >
// plus the all-fail string, where P^mu = e^{-i pi S^mu}, S_k projects onto the two success
// outcomes of the rotated basis and P^mu(theta) is the parity in the rotated frame.
inline cplx t_munu(const Mps<cplx>& g, double theta, Axis mu, Axis nu) {
  if (mu == Axis::z || nu == Axis::z) throw std::invalid_argument("t_munu: mu and nu must be x or y");
  const std::size_t n = g.layout().n_spin1();
  const Mat3 par = spin1_parity(mu);
  const Mat3 zz_par = detail::z_projector() * par;
  const MeasurementBasis b = measurement_basis(Axis::z, theta);
  const Mat3 success_par = b.success_projector() * rotated_parity(mu, Axis::z, theta);
  cplx total = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    OperatorString op;
    op.set(0, pauli(nu));
    for (std::size_t i = 1; i < k; ++i) op.set(i, zz_par);
    op.set(k, success_par);
    for (std::size_t j = k + 1; j <= n; ++j) op.set(j, par);
    op.set(n + 1, pauli(mu));
    total += expect_string(g, op);
  }
  OperatorString fail;
  fail.set(0, pauli(nu));
  for (std::size_t i = 1; i <= n; ++i) fail.set(i, zz_par);
  fail.set(n + 1, pauli(mu));
  return total + expect_string(g, fail);
}

// Probability that every spin-1 measurement fails: <prod |z><z|>.
inline double g_fail(const Mps<cplx>& g) {
  const std::size_t n = g.layout().n_spin1();
  OperatorString op;
  for (std::size_t i = 1; i <= n; ++i) op.set(i, detail::z_projector());
  return detail::checked_real(expect_string(g, op), "g_fail");
}

// sum_{k=0}^{n} < (prod_{i<=k} |z><z|) Z_in S^z_{k+1} > with S^z_{n+1} = Z_out.
inline double g_corr(const Mps<cplx>& g) {
  const std::size_t n = g.layout().n_spin1();
  const Mat3 zz = detail::z_projector();
  const Mat3 sz = spin1_matrices().z;
  double total = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    OperatorString op;
    op.set(0, pauli(Axis::z));
    for (std::size_t i = 1; i <= k; ++i) op.set(i, zz);
    if (k + 1 == n + 1) {
      op.set(n + 1, pauli(Axis::z));
    } else {
      op.set(k + 1, sz);
    }
    total += detail::checked_real(expect_string(g, op), "g_corr");
  }
  return total;
}

// F = 1/4 + O^z/4 - (cos/4)(T_xx + T_yy) - (sin/4)(T_xy - T_yx).
inline FidelityReport rz_fidelity_expansion(const Mps<cplx>& g, double theta) {
  FidelityDiagnostics diag;
  diag.string_order = string_orders(g);
  diag.g_corr = g_corr(g);
  diag.g_fail = g_fail(g);
  const cplx txx = t_munu(g, theta, Axis::x, Axis::x);
  const cplx tyy = t_munu(g, theta, Axis::y, Axis::y);
  const cplx txy = t_munu(g, theta, Axis::x, Axis::y);
  const cplx tyx = t_munu(g, theta, Axis::y, Axis::x);
  const cplx f = 0.25 + 0.25 * diag.string_order[2] - 0.25 * std::cos(theta) * (txx + tyy) -
                 0.25 * std::sin(theta) * (txy - tyx);
  const double raw = detail::checked_real(f, "rz_fidelity_expansion");
  return make_report(Gate::rz(theta), Method::expansion, raw, diag);
}

inline constexpr double kHaldaneThreshold = 0.999;

// Closed form valid inside the Haldane phase:
//   F = 1 - (sin^2/2)(1 + g_corr) - ((1 - cos)/2) g_fail.
// States whose identity fidelity is not above the threshold get an advisory flag.
inline FidelityReport rz_fidelity_haldane(const Mps<cplx>& g, double theta, double threshold = kHaldaneThreshold) {
  FidelityDiagnostics diag;
  diag.string_order = string_orders(g);
  diag.g_corr = g_corr(g);
  diag.g_fail = g_fail(g);
  const double fi = 0.25 + 0.25 * (diag.string_order[0] + diag.string_order[1] + diag.string_order[2]);
  diag.advisory = !(fi > threshold);
  const double s = std::sin(theta);
  const double raw = 1.0 - 0.5 * s * s * (1.0 + diag.g_corr) - 0.5 * (1.0 - std::cos(theta)) * diag.g_fail;
  return make_report(Gate::rz(theta), Method::haldane_closed_form, raw, diag);
}

namespace detail {

struct BlockTerm {
  cplx coef;
  std::vector<Klein> label;                    // parity label per chain site
  std::vector<std::optional<Mat3>> fixed;      // operator already chosen per chain site
};

}  // namespace detail

// Arbitrary single-qubit unitary R_x(theta) R_y(phi) R_z(lambda) on a blocked chain.
// For each mu the bracket < Q_C Q_R Q_B Q_L Q_A sigma~^mu_in sigma^mu_out > is expanded into
// operator strings: every anisotropic block either fails everywhere or first succeeds at
// some site k. A success site whose parity label does not commute with the block's rotation
// splits into a cos term and a sin term; the sin term flips the parity labels of all earlier
// sites by the block axis. Blocks are processed from C back to A.
inline FidelityReport unitary_fidelity(const Mps<cplx>& g, double theta, double phi, double lambda) {
  const ChainLayout& layout = g.layout();
  if (!layout.is_blocked()) throw std::invalid_argument("unitary_fidelity: needs a blocked chain layout");
  const std::size_t n = layout.n_spin1();
  struct Block {
    Axis axis;
    double angle;
    std::size_t first, last;
  };
  std::vector<Block> blocks;
  for (const auto& seg : layout.segments()) {
    if (!seg.axis) continue;
    const double ang = *seg.axis == Axis::z ? lambda : (*seg.axis == Axis::y ? phi : theta);
    blocks.push_back({*seg.axis, ang, seg.first, seg.last});
  }
  const Mat2 ut = (rotation_gate(Axis::x, theta) * rotation_gate(Axis::y, phi) * rotation_gate(Axis::z, lambda)).transpose();
  const auto spin = spin1_matrices();
  // Sign attached to the sin term of a success on an axis-r block.
  auto s0 = [](Axis r) { return r == Axis::y ? 1.0 : -1.0; };

  cplx total = 0;
  for (Axis mu : kAxes) {
    const Mat2 sig_in = ut * pauli(mu) * ut.adjoint();
    const std::size_t na = blocks[0].last - blocks[0].first + 2;
    const std::size_t nb = blocks[1].last - blocks[1].first + 2;
    const std::size_t nc = blocks[2].last - blocks[2].first + 2;
    // choice index c in [0, size]: c < size means first success at first + c, c == size: all fail.
    for (std::size_t ca = 0; ca < na; ++ca)
      for (std::size_t cb = 0; cb < nb; ++cb)
        for (std::size_t cc = 0; cc < nc; ++cc) {
          const std::size_t choice[3] = {ca, cb, cc};
          std::vector<detail::BlockTerm> terms(1);
          terms[0].coef = 1.0;
          terms[0].label.assign(n + 2, klein(mu));
          terms[0].fixed.assign(n + 2, std::nullopt);
          for (int bi = 2; bi >= 0; --bi) {
            const Block& blk = blocks[bi];
            const Axis r = blk.axis;
            const Mat3 fail_proj = projector(basis_state(r));
            const Mat3 succ_proj = Mat3::Identity() - fail_proj;
            const std::size_t size = blk.last - blk.first + 1;
            const bool fails = choice[bi] == size;
            const std::size_t k = blk.first + choice[bi];
            std::vector<detail::BlockTerm> next;
            for (auto& t : terms) {
              for (std::size_t i = blk.first; i <= blk.last; ++i) {
                if (fails || i < k) {
                  t.fixed[i] = fail_proj * spin1_parity(t.label[i]);
                } else if (i > k) {
                  t.fixed[i] = spin1_parity(t.label[i]);
                }
              }
              if (fails) {
                next.push_back(std::move(t));
                continue;
              }
              const Klein l = t.label[k];
              if (l == Klein::e || l == klein(r)) {
                t.fixed[k] = succ_proj * spin1_parity(l);
                next.push_back(std::move(t));
                continue;
              }
              detail::BlockTerm cos_t = t;
              cos_t.coef *= std::cos(blk.angle);
              cos_t.fixed[k] = succ_proj * spin1_parity(l);
              detail::BlockTerm sin_t = std::move(t);
              sin_t.coef *= cplx(0, -std::sin(blk.angle)) * (-s0(r));
              sin_t.fixed[k] = spin[r] * spin1_parity(l);
              for (std::size_t i = 1; i < k; ++i) sin_t.label[i] = sin_t.label[i] * klein(r);
              next.push_back(std::move(cos_t));
              if (std::sin(blk.angle) != 0.0) next.push_back(std::move(sin_t));
            }
            terms = std::move(next);
          }
          for (const auto& t : terms) {
            OperatorString op;
            op.set(0, sig_in);
            for (std::size_t i = 1; i <= n; ++i) {
              op.set(i, t.fixed[i] ? *t.fixed[i] : spin1_parity(t.label[i]));
            }
            op.set(n + 1, pauli(mu));
            total += t.coef * expect_string(g, op);
          }
        }
  }
  const cplx f = 0.25 - 0.25 * total;
  FidelityDiagnostics diag;
  diag.string_order = string_orders(g);
  const double raw = detail::checked_real(f, "unitary_fidelity");
  return make_report(Gate::unitary(theta, phi, lambda), Method::expansion, raw, diag);
}

}  // namespace spinmbqc
