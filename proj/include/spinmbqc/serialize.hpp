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
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "spinmbqc/mps.hpp"

namespace spinmbqc {

// Binary MPS container, all integers and floats little-endian:
//   "SPMBQMPS" | u32 version | u8 blocked | u64 L | u64 N | i64 center (-1: none) | u64 sites
//   per site: u64 left, u64 phys, u64 right
//   then every site's components in row-major order as (f64 re, f64 im).
inline constexpr std::array<char, 8> kMpsMagic{'S', 'P', 'M', 'B', 'Q', 'M', 'P', 'S'};
inline constexpr std::uint32_t kMpsFormatVersion = 1;

namespace detail {

template <class U>
void put_le(std::ostream& os, U value) {
  static_assert(std::is_trivially_copyable_v<U>);
  std::array<char, sizeof(U)> buf;
  std::memcpy(buf.data(), &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
  os.write(buf.data(), sizeof(U));
}

template <class U>
U get_le(std::istream& is) {
  std::array<char, sizeof(U)> buf;
  if (!is.read(buf.data(), sizeof(U))) throw std::runtime_error("read_mps: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf.begin(), buf.end());
  U value;
  std::memcpy(&value, buf.data(), sizeof(U));
  return value;
}

}  // namespace detail

inline void write_mps(std::ostream& os, const Mps<cplx>& s) {
  const auto& lay = s.layout();
  os.write(kMpsMagic.data(), kMpsMagic.size());
  detail::put_le<std::uint32_t>(os, kMpsFormatVersion);
  detail::put_le<std::uint8_t>(os, lay.is_blocked() ? 1 : 0);
  detail::put_le<std::uint64_t>(os, lay.block_total());
  detail::put_le<std::uint64_t>(os, lay.junction_length());
  const auto c = s.canonical_center();
  detail::put_le<std::int64_t>(os, c ? static_cast<std::int64_t>(*c) : -1);
  detail::put_le<std::uint64_t>(os, s.size());
  for (const auto& t : s.tensors()) {
    for (std::size_t ax = 0; ax < 3; ++ax) detail::put_le<std::uint64_t>(os, t.extent(ax));
  }
  for (const auto& t : s.tensors()) {
    for (const cplx& v : t.components()) {
      detail::put_le<double>(os, v.real());
      detail::put_le<double>(os, v.imag());
    }
  }
  if (!os) throw std::runtime_error("write_mps: stream failure");
}

inline Mps<cplx> read_mps(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMpsMagic) {
    throw std::runtime_error("read_mps: not an MPS container");
  }
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kMpsFormatVersion) {
    throw std::runtime_error("read_mps: unsupported version " + std::to_string(version));
  }
  const bool blocked = detail::get_le<std::uint8_t>(is) != 0;
  const auto l = detail::get_le<std::uint64_t>(is);
  const auto j = detail::get_le<std::uint64_t>(is);
  const auto center = detail::get_le<std::int64_t>(is);
  const auto sites = detail::get_le<std::uint64_t>(is);
  const ChainLayout layout = blocked ? ChainLayout::blocked(l, j) : ChainLayout::uniform(l);
  if (sites != layout.n_sites()) throw std::runtime_error("read_mps: site count does not match layout");
  std::vector<Shape> shapes(sites);
  for (auto& sh : shapes) {
    sh.resize(3);
    for (auto& e : sh) {
      e = detail::get_le<std::uint64_t>(is);
      if (e == 0 || e > (1u << 20)) throw std::runtime_error("read_mps: implausible extent");
    }
  }
  std::vector<DenseTensor<cplx>> tensors;
  for (const auto& sh : shapes) {
    std::vector<cplx> data(shape_size(sh));
    for (auto& v : data) {
      const double re = detail::get_le<double>(is);
      v = cplx(re, detail::get_le<double>(is));
    }
    tensors.emplace_back(sh, std::move(data));
  }
  std::optional<std::size_t> c;
  if (center >= 0) c = static_cast<std::size_t>(center);
  return Mps<cplx>(layout, std::move(tensors), c);
}

inline void save_mps(const std::filesystem::path& path, const Mps<cplx>& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_mps: cannot open " + path.string());
  write_mps(os, s);
}

inline Mps<cplx> load_mps(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_mps: cannot open " + path.string());
  return read_mps(is);
}

}  // namespace spinmbqc
