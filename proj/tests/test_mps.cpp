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

#include <cmath>
#include <sstream>

#include "spinmbqc/mps.hpp"
#include "spinmbqc/serialize.hpp"
#include "support.hpp"

namespace spinmbqc {
namespace {

OperatorString symmetry_string(std::size_t n, Axis a) {
  OperatorString op;
  op.set(0, pauli(a));
  for (std::size_t i = 1; i <= n; ++i) op.set(i, spin1_parity(a));
  op.set(n + 1, pauli(a));
  return op;
}

// Left (or right) isometry condition on a rank-3 site tensor.
double left_iso_error(const DenseTensor<cplx>& a) {
  const CMatrix m = a.matrix(2);
  return (m.adjoint() * m - CMatrix::Identity(m.cols(), m.cols())).norm();
}
double right_iso_error(const DenseTensor<cplx>& a) {
  const CMatrix m = a.matrix(1);
  return (m * m.adjoint() - CMatrix::Identity(m.rows(), m.rows())).norm();
}

TEST(Layout, UniformAndBlocked) {
  const auto u = ChainLayout::uniform(4);
  EXPECT_EQ(u.n_sites(), 6u);
  EXPECT_EQ(u.local_dims(), (std::vector<std::size_t>{2, 3, 3, 3, 3, 2}));
  EXPECT_EQ(u.dense_dim(), 4u * 81u);
  const auto b = ChainLayout::blocked(9, 1);
  EXPECT_EQ(b.n_spin1(), 11u);
  const auto seg = b.segments();
  ASSERT_EQ(seg.size(), 5u);
  EXPECT_EQ(seg[0].first, 1u);
  EXPECT_EQ(seg[0].last, 3u);
  EXPECT_EQ(seg[1].first, 4u);
  EXPECT_EQ(seg[1].last, 4u);
  EXPECT_EQ(seg[2].first, 5u);
  EXPECT_EQ(seg[2].last, 7u);
  EXPECT_EQ(seg[3].first, 8u);
  EXPECT_EQ(seg[4].first, 9u);
  EXPECT_EQ(seg[4].last, 11u);
  EXPECT_EQ(*seg[0].axis, Axis::z);
  EXPECT_EQ(*seg[2].axis, Axis::y);
  EXPECT_EQ(*seg[4].axis, Axis::x);
  EXPECT_THROW(ChainLayout::blocked(8, 1), std::invalid_argument);
}

TEST(Aklt, SingleSiteMatchesValenceBondConstruction) {
  const CVector ref = testref::aklt_from_singlets(1);
  ASSERT_EQ(ref.size(), 12);
  const CVector v = to_dense(detail::aklt_raw(1));
  EXPECT_LT((v - ref).norm(), 1e-14);
  const CVector unit = to_dense(aklt_mps(1));
  EXPECT_NEAR(std::abs(unit.dot(ref)) / ref.norm(), 1.0, 1e-14);
  EXPECT_NEAR(unit.norm(), 1.0, 1e-14);
}

TEST(Aklt, RawStateMatchesValenceBondConstruction) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const CVector ref = testref::aklt_from_singlets(n);
    EXPECT_LT((to_dense(detail::aklt_raw(n)) - ref).norm(), 1e-13) << n;
  }
  const double raw = norm(detail::aklt_raw(2));
  EXPECT_LT(raw, 1.0);
  EXPECT_NEAR(raw, testref::aklt_from_singlets(2).norm(), 1e-12);
}

TEST(Aklt, BondDimensionTwo) {
  for (std::size_t n : {1u, 3u, 6u}) {
    const auto g = aklt_mps(n);
    for (std::size_t b : g.bond_dims()) EXPECT_EQ(b, 2u);
    EXPECT_NEAR(norm(g), 1.0, 1e-12);
  }
}

TEST(Aklt, SymmetryEigenvalueMinusOne) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto g = aklt_mps(n);
    for (Axis a : kAxes) {
      const cplx v = expect_string(g, symmetry_string(n, a));
      EXPECT_NEAR(std::abs(v - cplx(-1)), 0.0, 1e-10) << n << axis_name(a);
    }
  }
}

TEST(Aklt, AllFailProbability) {
  for (std::size_t n = 1; n <= 6; ++n) {
    OperatorString op;
    for (std::size_t i = 1; i <= n; ++i) op.set(i, projector(basis_state(Axis::z)));
    EXPECT_NEAR(expect_string(aklt_mps(n), op).real(), std::pow(3.0, -double(n)), 1e-12);
  }
}

// sum_n (e^{-i pi S^mu})_{mn} G^n L = (sigma^mu)^dag (G^m L) sigma^mu
TEST(Aklt, TensorTransformation) {
  const auto p = testref::hand_pauli();
  const CMatrix lam = p[0] * p[2] / std::sqrt(2.0);
  const CMatrix id = CMatrix::Identity(2, 2);
  const std::array<CMatrix, 3> gam{CMatrix((id + p[2]) / std::sqrt(3.0)), CMatrix(std::sqrt(2.0 / 3.0) * p[0]),
                                   CMatrix((id - p[2]) / std::sqrt(3.0))};
  for (Axis mu : kAxes) {
    const Mat3 par = spin1_parity(mu);
    const CMatrix s = p[index_of(mu)];
    for (int m = 0; m < 3; ++m) {
      CMatrix lhs = CMatrix::Zero(2, 2);
      for (int n = 0; n < 3; ++n) lhs += par(m, n) * gam[n] * lam;
      EXPECT_LT((lhs - s.adjoint() * gam[m] * lam * s).norm(), 1e-14) << axis_name(mu) << m;
    }
  }
}

TEST(Canonicalize, PreservesStateAndIsIdempotent) {
  const auto g = aklt_mps(3);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto h = canonicalize(g, c);
    EXPECT_NEAR(std::abs(inner(g, h)), 1.0, 1e-10);
    ASSERT_TRUE(h.canonical_center());
    EXPECT_EQ(*h.canonical_center(), c);
    const auto h2 = canonicalize(h, c);
    for (std::size_t i = 0; i < h.size(); ++i) {
      ASSERT_EQ(h[i].shape(), h2[i].shape());
      for (std::size_t k = 0; k < h[i].size(); ++k) EXPECT_NEAR(std::abs(h[i][k] - h2[i][k]), 0.0, 1e-12);
    }
  }
}

TEST(Canonicalize, IsometriesAndCenterNorm) {
  auto raw = detail::aklt_raw(4);
  const double global = norm(raw);
  auto r = random_mps<cplx>(ChainLayout::uniform(4), 7, 3);
  for (const auto* s : {&raw, &r}) {
    const double n0 = norm(*s);
    for (std::size_t c = 0; c < s->size(); ++c) {
      const auto h = canonicalize(*s, c);
      for (std::size_t i = 0; i < c; ++i) EXPECT_LT(left_iso_error(h[i]), 1e-10);
      for (std::size_t i = c + 1; i < h.size(); ++i) EXPECT_LT(right_iso_error(h[i]), 1e-10);
      EXPECT_NEAR(h[c].norm(), n0, 1e-10 * n0);
      EXPECT_NEAR(norm(h), n0, 1e-10 * n0);
    }
  }
  EXPECT_NEAR(global, testref::aklt_from_singlets(4).norm(), 1e-12);
}

TEST(ExpectString, MatchesDenseOnRandomStrings) {
  std::mt19937_64 rng(99);
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto layout = ChainLayout::uniform(n);
    const auto s = random_mps<cplx>(layout, 5, 10 + n);
    const CVector v = to_dense(s);
    for (int trial = 0; trial < 12; ++trial) {
      OperatorString op;
      for (std::size_t i = 0; i < layout.n_sites(); ++i) {
        if (std::bernoulli_distribution(0.6)(rng)) {
          const auto d = static_cast<Eigen::Index>(layout.local_dim(i));
          op.set(i, testref::random_matrix(d, d, rng));
        }
      }
      const cplx a = expect_string(s, op);
      const cplx b = testref::dense_expect(v, layout.local_dims(), op);
      EXPECT_NEAR(std::abs(a - b), 0.0, 1e-10 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST(ExpectString, EmptyStringAndErrors) {
  const auto g = aklt_mps(2);
  EXPECT_NEAR(std::abs(expect_string(g, OperatorString{}) - cplx(1)), 0.0, 1e-12);
  OperatorString bad;
  bad.set(0, Mat3::Identity());
  EXPECT_THROW(expect_string(g, bad), std::invalid_argument);
  OperatorString far;
  far.set(10, Mat2::Identity());
  EXPECT_THROW(expect_string(g, far), std::out_of_range);
}

TEST(Inner, CauchySchwarzAndPositivity) {
  const auto layout = ChainLayout::uniform(3);
  for (std::uint64_t seed = 1; seed < 8; ++seed) {
    const auto a = random_mps<cplx>(layout, 4, seed), b = random_mps<cplx>(layout, 6, seed + 100);
    const cplx aa = inner(a, a);
    EXPECT_GT(aa.real(), 0);
    EXPECT_LT(std::abs(aa.imag()), 1e-12);
    EXPECT_LE(std::abs(inner(a, b)), norm(a) * norm(b) + 1e-12);
    EXPECT_NEAR(std::abs(inner(a, b) - to_dense(a).dot(to_dense(b))), 0.0, 1e-12);
  }
  EXPECT_THROW(inner(aklt_mps(2), aklt_mps(3)), std::invalid_argument);
}

TEST(Dense, RoundTripAndCap) {
  const auto g = aklt_mps(2);
  const CVector v = to_dense(g);
  EXPECT_NEAR(v.norm(), norm(g), 1e-12);
  const auto back = from_dense(g.layout(), v);
  EXPECT_LT((to_dense(back) - v).norm(), 1e-10);
  EXPECT_NEAR(std::abs(inner(back, g)), 1.0, 1e-10);

  const CVector r = testref::normalized_random(4 * 27, 5);
  EXPECT_LT((to_dense(from_dense(ChainLayout::uniform(3), r)) - r).norm(), 1e-10);
  EXPECT_THROW(to_dense(aklt_mps(4), 100), std::length_error);
  EXPECT_THROW(to_dense(aklt_mps(9)), std::length_error);
  EXPECT_THROW(from_dense(ChainLayout::uniform(2), r), std::invalid_argument);
}

TEST(Mps, ConstructionValidates) {
  DenseTensor<cplx> a({1, 2, 2}), b({2, 3, 1}), c({1, 2, 1});
  EXPECT_THROW(Mps<cplx>(ChainLayout::uniform(1), {a, b}), std::invalid_argument);
  EXPECT_THROW(Mps<cplx>(ChainLayout::uniform(1), {a, DenseTensor<cplx>({3, 3, 1}), c}), std::invalid_argument);
  EXPECT_THROW(Mps<cplx>(ChainLayout::uniform(1), {a, DenseTensor<cplx>({2, 2, 1}), c}), std::invalid_argument);
  EXPECT_NO_THROW(Mps<cplx>(ChainLayout::uniform(1), {a, b, c}));
}

TEST(Serialize, RoundTrip) {
  for (const auto& s : {aklt_mps(3), random_mps<cplx>(ChainLayout::blocked(3, 1), 5, 8)}) {
    std::stringstream ss;
    write_mps(ss, s);
    const auto back = read_mps(ss);
    EXPECT_EQ(back.layout(), s.layout());
    EXPECT_EQ(back.canonical_center(), s.canonical_center());
    ASSERT_EQ(back.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_TRUE(back[i] == s[i]);
  }
}

TEST(Serialize, RejectsCorruptInput) {
  std::stringstream ss;
  write_mps(ss, aklt_mps(2));
  const std::string bytes = ss.str();
  {
    std::string bad = bytes;
    bad[0] = 'X';
    std::stringstream in(bad);
    EXPECT_THROW(read_mps(in), std::runtime_error);
  }
  {
    std::string bad = bytes;
    bad[8] = 9;  // version
    std::stringstream in(bad);
    EXPECT_THROW(read_mps(in), std::runtime_error);
  }
  {
    std::stringstream in(bytes.substr(0, bytes.size() - 5));
    EXPECT_THROW(read_mps(in), std::runtime_error);
  }
}

TEST(Serialize, LittleEndianLayout) {
  std::stringstream ss;
  write_mps(ss, aklt_mps(1));
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 8), "SPMBQMPS");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);
  EXPECT_EQ(bytes[9], 0);
}

}  // namespace
}  // namespace spinmbqc
