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
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spinmbqc/linalg.hpp"
#include "spinmbqc/model.hpp"
#include "spinmbqc/mps.hpp"

namespace spinmbqc {

struct DmrgConfig {
  std::size_t max_bond = 100;
  double cutoff = 1e-10;
  std::size_t max_sweeps = 30;
  double energy_tol = 1e-9;
  // Sweep k uses noise[min(k, size-1)]; convergence is only declared on noiseless sweeps.
  std::vector<double> noise{1e-5, 1e-7, 0.0};
  std::uint64_t seed = 1;
  double lanczos_tol = 1e-9;
  std::size_t lanczos_max_iter = 200;
  bool compute_variance = true;

  void validate() const {
    if (max_bond < 1) throw std::invalid_argument("DmrgConfig: max_bond must be >= 1");
    if (max_sweeps < 1) throw std::invalid_argument("DmrgConfig: max_sweeps must be >= 1");
    if (!(energy_tol > 0) || !(lanczos_tol > 0)) throw std::invalid_argument("DmrgConfig: tolerances must be positive");
    if (cutoff < 0) throw std::invalid_argument("DmrgConfig: negative cutoff");
    for (double a : noise) {
      if (!(a >= 0) || !std::isfinite(a)) throw std::invalid_argument("DmrgConfig: invalid noise entry");
    }
  }

  double noise_at(std::size_t sweep) const {
    if (noise.empty()) return 0.0;
    return noise[std::min(sweep, noise.size() - 1)];
  }
};

template <Scalar T>
struct DmrgResult {
  Mps<T> state;
  double energy = 0.0;
  std::vector<double> energy_per_sweep;
  double variance = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  std::size_t sweeps = 0;
  double max_discarded_weight = 0.0;  // over the final sweep
  double lanczos_gap = std::numeric_limits<double>::quiet_NaN();
  bool lanczos_converged = true;  // every local problem of the final sweep
};

namespace detail {

template <Scalar T>
class TwoSiteSolver {
 public:
  TwoSiteSolver(const Mpo<T>& h, const DmrgConfig& cfg) : h_(h), cfg_(cfg), w_(sparse_sites(h)) {}

  DmrgResult<T> run() {
    const std::size_t n = h_.size();
    Mps<T> init = random_mps<T>(h_.layout, std::min<std::size_t>(8, cfg_.max_bond), cfg_.seed);
    sites_ = init.tensors();
    left_.assign(n, {});
    right_.assign(n, {});
    left_[0] = unit_environment<T>();
    right_[n - 1] = unit_environment<T>();
    for (std::size_t k = n - 1; k > 0; --k) right_[k - 1] = grow_right(right_[k], w_[k], sites_[k], sites_[k]);

    DmrgResult<T> res;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t sweep = 0; sweep < cfg_.max_sweeps; ++sweep) {
      const double noise = cfg_.noise_at(sweep);
      sweep_discarded_ = 0;
      sweep_lanczos_ok_ = true;
      for (std::size_t i = 0; i + 1 < n; ++i) update(i, true, noise, sweep);
      for (std::size_t i = n - 1; i-- > 0;) update(i, false, noise, sweep);
      res.energy_per_sweep.push_back(last_energy_);
      res.sweeps = sweep + 1;
      const bool quiet = noise == 0.0;
      if (quiet && std::abs(previous - last_energy_) < cfg_.energy_tol) {
        res.converged = true;
        break;
      }
      previous = last_energy_;
    }
    res.max_discarded_weight = sweep_discarded_;
    res.lanczos_gap = last_gap_;
    res.lanczos_converged = sweep_lanczos_ok_;
    Mps<T> state(h_.layout, sites_, 0);
    res.state = normalized(state, 0);
    res.energy = expect_mpo(h_, res.state);
    if (cfg_.compute_variance) res.variance = variance(h_, res.state);
    return res;
  }

 private:
  // y = H_eff x for the two-site block at (i, i+1); also exposes the half-applied pieces used
  // by the density-matrix noise.
  struct Dims {
    Eigen::Index l, d1, d2, r;
  };

  // Y[w](a, s1', s2, c): left environment and left MPO site applied.
  std::vector<RowMatrix<T>> apply_left_half(std::size_t i, const Dims& dm, const T* x) const {
    const auto& env = left_[i];
    const auto& w1 = w_[i];
    Eigen::Map<const RowMatrix<T>> xm(x, dm.l, dm.d1 * dm.d2 * dm.r);
    std::vector<RowMatrix<T>> xs(env.size());
    for (std::size_t a = 0; a < env.size(); ++a) {
      if (env[a].size() != 0) xs[a].noalias() = env[a] * xm;
    }
    const Eigen::Index chunk = dm.d2 * dm.r;
    std::vector<RowMatrix<T>> y(w1.wr);
    for (const auto& blk : w1.blocks) {
      const auto& src = xs[blk.wl];
      if (src.size() == 0) continue;
      auto& dst = y[blk.wr];
      if (dst.size() == 0) dst = RowMatrix<T>::Zero(dm.l, dm.d1 * chunk);
      for (Eigen::Index a = 0; a < dm.l; ++a) {
        Eigen::Map<RowMatrix<T>>(dst.data() + a * dm.d1 * chunk, dm.d1, chunk).noalias() +=
            blk.op * Eigen::Map<const RowMatrix<T>>(src.data() + a * dm.d1 * chunk, dm.d1, chunk);
      }
    }
    return y;
  }

  void apply(std::size_t i, const Dims& dm, const T* x, T* out) const {
    const auto y = apply_left_half(i, dm, x);
    const auto& w2 = w_[i + 1];
    const auto& env = right_[i + 1];
    const Eigen::Index rows = dm.l * dm.d1;
    std::vector<RowMatrix<T>> z(w2.wr);
    for (const auto& blk : w2.blocks) {
      const auto& src = y[blk.wl];
      if (src.size() == 0 || env[blk.wr].size() == 0) continue;
      auto& dst = z[blk.wr];
      if (dst.size() == 0) dst = RowMatrix<T>::Zero(dm.l, dm.d1 * dm.d2 * dm.r);
      for (Eigen::Index a = 0; a < rows; ++a) {
        Eigen::Map<RowMatrix<T>>(dst.data() + a * dm.d2 * dm.r, dm.d2, dm.r).noalias() +=
            blk.op * Eigen::Map<const RowMatrix<T>>(src.data() + a * dm.d2 * dm.r, dm.d2, dm.r);
      }
    }
    Eigen::Map<RowMatrix<T>> om(out, rows * dm.d2, dm.r);
    om.setZero();
    for (std::size_t a = 0; a < z.size(); ++a) {
      if (z[a].size() == 0) continue;
      Eigen::Map<const RowMatrix<T>> zm(z[a].data(), rows * dm.d2, dm.r);
      om.noalias() += zm * env[a].transpose();
    }
  }

  // Q[w](a, s1, s2', c): right environment and right MPO site applied.
  std::vector<RowMatrix<T>> apply_right_half(std::size_t i, const Dims& dm, const T* x) const {
    const auto& env = right_[i + 1];
    const auto& w2 = w_[i + 1];
    const Eigen::Index rows = dm.l * dm.d1;
    Eigen::Map<const RowMatrix<T>> xm(x, rows * dm.d2, dm.r);
    std::vector<RowMatrix<T>> v(env.size());
    for (std::size_t a = 0; a < env.size(); ++a) {
      if (env[a].size() != 0) v[a].noalias() = xm * env[a].transpose();
    }
    std::vector<RowMatrix<T>> q(w2.wl);
    for (const auto& blk : w2.blocks) {
      const auto& src = v[blk.wr];
      if (src.size() == 0) continue;
      auto& dst = q[blk.wl];
      if (dst.size() == 0) dst = RowMatrix<T>::Zero(rows, dm.d2 * dm.r);
      for (Eigen::Index a = 0; a < rows; ++a) {
        Eigen::Map<RowMatrix<T>>(dst.data() + a * dm.d2 * dm.r, dm.d2, dm.r).noalias() +=
            blk.op * Eigen::Map<const RowMatrix<T>>(src.data() + a * dm.d2 * dm.r, dm.d2, dm.r);
      }
    }
    return q;
  }

  void update(std::size_t i, bool to_right, double noise, std::size_t sweep) {
    const Dims dm{static_cast<Eigen::Index>(sites_[i].extent(0)), static_cast<Eigen::Index>(sites_[i].extent(1)),
                  static_cast<Eigen::Index>(sites_[i + 1].extent(1)),
                  static_cast<Eigen::Index>(sites_[i + 1].extent(2))};
    const Eigen::Index rows = dm.l * dm.d1, cols = dm.d2 * dm.r;
    RowMatrix<T> theta = sites_[i].matrix(2) * sites_[i + 1].matrix(1);
    Vector<T> guess = Eigen::Map<const Vector<T>>(theta.data(), theta.size());

    LanczosOptions opt;
    opt.tol = cfg_.lanczos_tol;
    opt.max_iter = cfg_.lanczos_max_iter;
    opt.krylov_dim = 40;
    opt.seed = cfg_.seed * 0x9E3779B97F4A7C15ull + sweep * 1000003ull + i * 2 + (to_right ? 0 : 1);
    auto op = [&](const Vector<T>& x, Vector<T>& y) {
      y.resize(x.size());
      apply(i, dm, x.data(), y.data());
    };
    auto lr = lanczos_ground<T>(op, static_cast<std::size_t>(rows * cols), opt, &guess);
    last_energy_ = lr.energy;
    last_gap_ = lr.gap;
    if (!lr.converged) sweep_lanczos_ok_ = false;
    Eigen::Map<RowMatrix<T>> th(lr.vector.data(), rows, cols);

    Matrix<T> left, right;  // left (rows x k), right (k x cols), product approximates theta
    double discarded = 0;
    if (noise > 0) {
      Matrix<T> rho;
      if (to_right) {
        rho = th * th.adjoint();
        const auto ys = apply_left_half(i, dm, lr.vector.data());
        for (const auto& y : ys) {
          if (y.size() == 0) continue;
          Eigen::Map<const RowMatrix<T>> ym(y.data(), rows, cols);
          rho.noalias() += noise * (ym * ym.adjoint());
        }
      } else {
        rho = th.adjoint() * th;
        const auto qs = apply_right_half(i, dm, lr.vector.data());
        for (const auto& q : qs) {
          if (q.size() == 0) continue;
          Eigen::Map<const RowMatrix<T>> qm(q.data(), rows, cols);
          rho.noalias() += noise * (qm.adjoint() * qm);
        }
      }
      rho /= rho.trace();
      Eigen::SelfAdjointEigenSolver<Matrix<T>> es(rho);
      const Eigen::Index m = rho.rows();
      std::vector<double> sv(m);
      for (Eigen::Index j = 0; j < m; ++j) sv[j] = std::sqrt(std::max(0.0, es.eigenvalues()[m - 1 - j]));
      const std::size_t k = kept_rank(sv, std::min<std::size_t>(cfg_.max_bond, std::min(rows, cols)), cfg_.cutoff);
      Matrix<T> basis = es.eigenvectors().rightCols(k).rowwise().reverse();
      for (std::size_t j = k; j < sv.size(); ++j) discarded += sv[j] * sv[j];
      if (to_right) {
        left = basis;
        right = basis.adjoint() * th;
      } else {
        right = basis.adjoint();
        left = th * basis;
      }
    } else {
      auto svd = svd_truncate_matrix<T>(th, cfg_.max_bond, cfg_.cutoff);
      discarded = svd.discarded_weight;
      const Eigen::Index k = static_cast<Eigen::Index>(svd.s.size());
      left = svd.u;
      right = svd.vh;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (to_right) {
          right.row(j) *= svd.s[j];
        } else {
          left.col(j) *= svd.s[j];
        }
      }
    }
    // Keep the wavefunction normalized after truncation.
    const double nrm = to_right ? right.norm() : left.norm();
    if (nrm > 0) (to_right ? right : left) /= nrm;
    sweep_discarded_ = std::max(sweep_discarded_, discarded);

    const std::size_t k = static_cast<std::size_t>(left.cols());
    sites_[i] = site_tensor<T>(left, dm.l, dm.d1, k);
    DenseTensor<T> b({k, static_cast<std::size_t>(dm.d2), static_cast<std::size_t>(dm.r)});
    b.matrix(1) = right;
    sites_[i + 1] = std::move(b);
    if (to_right) {
      left_[i + 1] = grow_left(left_[i], w_[i], sites_[i], sites_[i]);
    } else {
      right_[i] = grow_right(right_[i + 1], w_[i + 1], sites_[i + 1], sites_[i + 1]);
    }
  }

  const Mpo<T>& h_;
  const DmrgConfig& cfg_;
  std::vector<SparseMpoSite<T>> w_;
  std::vector<DenseTensor<T>> sites_;
  std::vector<Environment<T>> left_, right_;
  double last_energy_ = 0.0;
  double last_gap_ = std::numeric_limits<double>::quiet_NaN();
  double sweep_discarded_ = 0.0;
  bool sweep_lanczos_ok_ = true;
};

}  // namespace detail

// Two-site DMRG from a seeded random MPS.
template <Scalar T>
DmrgResult<T> ground_state(const Mpo<T>& h, const DmrgConfig& cfg) {
  cfg.validate();
  if (h.size() < 2) throw std::invalid_argument("ground_state: need at least two sites");
  detail::TwoSiteSolver<T> solver(h, cfg);
  return solver.run();
}

// Solves in real arithmetic (every model Hamiltonian is real) and returns a complex state.
inline DmrgResult<cplx> ground_state(const HamiltonianSpec& spec, const DmrgConfig& cfg) {
  auto r = ground_state(build_mpo<double>(spec), cfg);
  DmrgResult<cplx> out;
  out.state = to_complex(r.state);
  out.energy = r.energy;
  out.energy_per_sweep = std::move(r.energy_per_sweep);
  out.variance = r.variance;
  out.converged = r.converged;
  out.sweeps = r.sweeps;
  out.max_discarded_weight = r.max_discarded_weight;
  out.lanczos_gap = r.lanczos_gap;
  out.lanczos_converged = r.lanczos_converged;
  return out;
}

}  // namespace spinmbqc
