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

#include <gtest/gtest.h>

#include "spinmbqc/dmrg.hpp"
#include "spinmbqc/oracle.hpp"
#include "support.hpp"

namespace spinmbqc {
namespace {

double dense_overlap(const Mps<cplx>& a, const DenseState& b) {
  return std::abs(to_dense(a).dot(b.amplitudes));
}

TEST(Dmrg, AkltMatchesExactDiagonalization) {
  const auto spec = HamiltonianSpec::aklt(4);
  const auto ex = exact_ground_state(spec);
  const auto r = ground_state(spec, DmrgConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.energy, ex.energy, 1e-8);
  EXPECT_NEAR(std::abs(inner(r.state, aklt_mps(4))), 1.0, 1e-6);
  EXPECT_NEAR(norm(r.state), 1.0, 1e-12);
  EXPECT_LE(r.variance, 1e-8);
}

TEST(Dmrg, XxzMatchesExactDiagonalization) {
  for (auto [J, D] : std::vector<std::pair<double, double>>{{1, 0}, {2, -1}, {0.5, 1.5}}) {
    const auto spec = HamiltonianSpec::xxz(4, J, D);
    const auto ex = exact_ground_state(spec);
    const auto r = ground_state(spec, DmrgConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.energy, ex.energy, 1e-8) << spec.key();
    if (!ex.degenerate) EXPECT_NEAR(dense_overlap(r.state, ex.state), 1.0, 1e-6);
  }
}

TEST(Dmrg, FerromagneticStateCollapsesBond) {
  const auto spec = HamiltonianSpec::xxz(4, -6, 0);
  const auto ex = exact_ground_state(spec);
  EXPECT_TRUE(ex.degenerate);
  const auto r = ground_state(spec, DmrgConfig{});
  EXPECT_NEAR(r.energy, ex.energy, 1e-8);
  EXPECT_LE(r.state.max_bond(), 2u);
}

TEST(Dmrg, BlockedChainMatchesExactDiagonalization) {
  const auto spec = HamiltonianSpec::blocked(3, 2, -1, 1);
  const auto ex = exact_ground_state(spec);
  const auto r = ground_state(spec, DmrgConfig{});
  EXPECT_NEAR(r.energy, ex.energy, 1e-8);
}

TEST(Dmrg, BelowProductTrialStates) {
  const auto spec = HamiltonianSpec::blbq(6, -0.3);
  const auto h = build_mpo(spec);
  const auto r = ground_state(spec, DmrgConfig{});
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    EXPECT_LE(r.energy, expect_mpo(h, random_mps<cplx>(spec.layout(), 1, seed)) + 1e-12);
  }
  EXPECT_NEAR(expect_mpo(h, r.state), r.energy, 1e-8);
}

TEST(Dmrg, DeterministicGivenSeed) {
  DmrgConfig cfg;
  cfg.seed = 17;
  const auto spec = HamiltonianSpec::xxz(8, 1.3, -0.4);
  const auto a = ground_state(spec, cfg);
  const auto b = ground_state(spec, cfg);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.state.bond_dims(), b.state.bond_dims());
  EXPECT_EQ(a.energy_per_sweep, b.energy_per_sweep);
}

TEST(Dmrg, VarianceAndSweepHistory) {
  DmrgConfig cfg;
  const auto r = ground_state(HamiltonianSpec::xxz(10, 1, 0), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.variance, -1e-10);
  EXPECT_LE(r.variance, 1e-6);
  ASSERT_EQ(r.energy_per_sweep.size(), r.sweeps);
  for (std::size_t i = 1; i < r.energy_per_sweep.size(); ++i) {
    EXPECT_LE(r.energy_per_sweep[i], r.energy_per_sweep[i - 1] + 1e-6);
  }
  EXPECT_TRUE(std::isfinite(r.lanczos_gap));
}

TEST(Dmrg, ReportsNonConvergence) {
  DmrgConfig cfg;
  cfg.max_sweeps = 1;
  const auto r = ground_state(HamiltonianSpec::xxz(8, 1, 0), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.sweeps, 1u);
}

TEST(Dmrg, BondCapRespected) {
  DmrgConfig cfg;
  cfg.max_bond = 3;
  const auto r = ground_state(HamiltonianSpec::xxz(8, 1, 0), cfg);
  EXPECT_LE(r.state.max_bond(), 3u);
  EXPECT_NEAR(norm(r.state), 1.0, 1e-10);
}

TEST(DmrgConfig, Validation) {
  DmrgConfig c;
  EXPECT_NO_THROW(c.validate());
  c.max_bond = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.energy_tol = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.noise = {1e-5, -1};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  EXPECT_EQ(c.noise_at(0), 1e-5);
  EXPECT_EQ(c.noise_at(10), 0.0);
}

}  // namespace
}  // namespace spinmbqc
