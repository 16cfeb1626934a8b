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
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "spinmbqc/tensor.hpp"

namespace spinmbqc {

enum class Axis { x = 0, y = 1, z = 2 };
enum class Spin { half, one };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

inline constexpr int index_of(Axis a) { return static_cast<int>(a); }

inline constexpr char axis_name(Axis a) { return "xyz"[index_of(a)]; }

inline Axis parse_axis(char c) {
  switch (c) {
    case 'x': return Axis::x;
    case 'y': return Axis::y;
    case 'z': return Axis::z;
  }
  throw std::invalid_argument(std::string("unknown axis '") + c + "'");
}

// The third axis, for a != b.
inline constexpr Axis other_axis(Axis a, Axis b) {
  return static_cast<Axis>(3 - index_of(a) - index_of(b));
}

// Elements of the Klein group generated by the spin-1 pi rotations.
enum class Klein { e, x, y, z };

inline constexpr Klein klein(Axis a) { return static_cast<Klein>(index_of(a) + 1); }

inline constexpr Klein operator*(Klein a, Klein b) {
  return static_cast<Klein>(static_cast<int>(a) ^ static_cast<int>(b));
}

using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

struct Spin1Matrices {
  Mat3 x, y, z;
  const Mat3& operator[](Axis a) const { return a == Axis::x ? x : (a == Axis::y ? y : z); }
};

// Basis (|+>, |0>, |->), S^z = diag(1, 0, -1).
inline Spin1Matrices spin1_matrices() {
  Mat3 sp = Mat3::Zero();
  sp(0, 1) = sp(1, 2) = std::sqrt(2.0);
  const Mat3 sm = sp.adjoint();
  Spin1Matrices s;
  s.x = (sp + sm) / 2.0;
  s.y = (sp - sm) / cplx(0, 2);
  s.z = Mat3::Zero();
  s.z(0, 0) = 1;
  s.z(2, 2) = -1;
  return s;
}

inline Mat2 pauli(Axis a) {
  Mat2 m;
  switch (a) {
    case Axis::x: m << 0, 1, 1, 0; break;
    case Axis::y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case Axis::z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// e^{-i angle S^a}. The spectrum {-1, 0, 1} makes the series close on S and S^2.
inline Mat3 spin1_rotation(Axis a, double angle) {
  const Mat3 s = spin1_matrices()[a];
  return Mat3::Identity() + (std::cos(angle) - 1.0) * (s * s) - cplx(0, std::sin(angle)) * s;
}

// e^{-i pi S^a} = I - 2 (S^a)^2.
inline Mat3 spin1_parity(Axis a) {
  const Mat3 s = spin1_matrices()[a];
  return Mat3::Identity() - 2.0 * (s * s);
}

inline Mat3 spin1_parity(Klein k) {
  return k == Klein::e ? Mat3::Identity() : spin1_parity(static_cast<Axis>(static_cast<int>(k) - 1));
}

inline CMatrix parity_op(Axis a, Spin spin) {
  if (spin == Spin::half) return pauli(a);
  return spin1_parity(a);
}

// exp(-i angle sigma^a / 2).
inline Mat2 rotation_gate(Axis a, double angle) {
  return std::cos(angle / 2) * Mat2::Identity() - cplx(0, std::sin(angle / 2)) * pauli(a);
}

// |x> = (-|+> + |->)/sqrt2, |y> = (|+> + |->)/sqrt2, |z> = |0>.
inline Vec3 basis_state(Axis a) {
  const double r = std::sqrt(0.5);
  switch (a) {
    case Axis::x: return Vec3(-r, 0, r);
    case Axis::y: return Vec3(r, 0, r);
    case Axis::z: break;
  }
  return Vec3(0, 1, 0);
}

inline Mat3 projector(const Vec3& v) { return v * v.adjoint(); }

struct MeasurementBasis {
  Axis rotation_axis = Axis::z;
  double angle = 0.0;
  std::array<Vec3, 3> vectors;  // indexed by outcome label
  Axis failure_axis = Axis::z;

  const Vec3& vector(Axis label) const { return vectors[index_of(label)]; }
  Mat3 projector(Axis label) const { return spinmbqc::projector(vector(label)); }
  Mat3 success_projector() const { return Mat3::Identity() - projector(failure_axis); }
  std::array<Axis, 2> success_axes() const {
    const int f = index_of(failure_axis);
    return {static_cast<Axis>((f + 1) % 3), static_cast<Axis>((f + 2) % 3)};
  }
};

// The three outcome vectors e^{-i (angle/2) S^axis} |mu>. The vector along the rotation
// axis is unchanged by the rotation and marks the failed outcome.
inline MeasurementBasis measurement_basis(Axis rotation_axis, double angle) {
  MeasurementBasis b;
  b.rotation_axis = rotation_axis;
  b.angle = angle;
  b.failure_axis = rotation_axis;
  const Mat3 r = spin1_rotation(rotation_axis, angle / 2);
  for (Axis mu : kAxes) b.vectors[index_of(mu)] = r * basis_state(mu);
  return b;
}

// e^{-i pi S^{mu(angle)}}: the parity about mu conjugated into the rotated frame.
inline Mat3 rotated_parity(Axis mu, Axis rotation_axis, double angle) {
  const Mat3 r = spin1_rotation(rotation_axis, angle / 2);
  return r * spin1_parity(mu) * r.adjoint();
}

}  // namespace spinmbqc
