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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinmbqc/spin_ops.hpp"

namespace spinmbqc {

enum class SegmentKind { bulk, block_a, junction_left, block_b, junction_right, block_c };

// Inclusive range of chain sites. Site 0 is the input qubit, sites 1..n are the spin-1s and
// site n+1 is the output qubit.
struct Segment {
  SegmentKind kind = SegmentKind::bulk;
  std::size_t first = 1;
  std::size_t last = 0;
  // Rotation axis of the measurements in an anisotropic block.
  std::optional<Axis> axis;

  std::size_t size() const { return last >= first ? last - first + 1 : 0; }
  bool contains(std::size_t site) const { return site >= first && site <= last; }
};

class ChainLayout {
 public:
  ChainLayout() = default;

  static ChainLayout uniform(std::size_t n_spin1) {
    if (n_spin1 == 0) throw std::invalid_argument("ChainLayout: need at least one spin-1 site");
    ChainLayout c;
    c.n_spin1_ = n_spin1;
    c.block_total_ = n_spin1;
    return c;
  }

  // Three anisotropic blocks of block_total/3 sites separated by two isotropic junctions of
  // `junction` sites each.
  static ChainLayout blocked(std::size_t block_total, std::size_t junction) {
    if (block_total == 0 || block_total % 3 != 0) {
      throw std::invalid_argument("ChainLayout: blocked chain needs L divisible by 3, got " +
                                  std::to_string(block_total));
    }
    ChainLayout c;
    c.blocked_ = true;
    c.block_total_ = block_total;
    c.junction_ = junction;
    c.n_spin1_ = block_total + 2 * junction;
    return c;
  }

  bool is_blocked() const { return blocked_; }
  std::size_t n_spin1() const { return n_spin1_; }
  std::size_t n_sites() const { return n_spin1_ + 2; }
  std::size_t block_total() const { return block_total_; }
  std::size_t block_length() const { return blocked_ ? block_total_ / 3 : block_total_; }
  std::size_t junction_length() const { return junction_; }
  std::size_t in_site() const { return 0; }
  std::size_t out_site() const { return n_spin1_ + 1; }
  bool is_qubit(std::size_t site) const { return site == 0 || site == n_spin1_ + 1; }

  std::size_t local_dim(std::size_t site) const {
    if (site >= n_sites()) throw std::out_of_range("ChainLayout: site " + std::to_string(site));
    return is_qubit(site) ? 2 : 3;
  }

  std::vector<std::size_t> local_dims() const {
    std::vector<std::size_t> d(n_sites(), 3);
    d.front() = d.back() = 2;
    return d;
  }

  std::size_t dense_dim() const {
    std::size_t d = 4;
    for (std::size_t i = 0; i < n_spin1_; ++i) d *= 3;
    return d;
  }

  // Blocked chains list A, L, B, R, C in chain order; empty junctions are kept with size 0.
  std::vector<Segment> segments() const {
    if (!blocked_) return {Segment{SegmentKind::bulk, 1, n_spin1_, std::nullopt}};
    const std::size_t n = block_total_ / 3, j = junction_;
    return {
        Segment{SegmentKind::block_a, 1, n, Axis::z},
        Segment{SegmentKind::junction_left, n + 1, n + j, std::nullopt},
        Segment{SegmentKind::block_b, n + j + 1, 2 * n + j, Axis::y},
        Segment{SegmentKind::junction_right, 2 * n + j + 1, 2 * n + 2 * j, std::nullopt},
        Segment{SegmentKind::block_c, 2 * n + 2 * j + 1, 3 * n + 2 * j, Axis::x},
    };
  }

  friend bool operator==(const ChainLayout&, const ChainLayout&) = default;

 private:
  bool blocked_ = false;
  std::size_t n_spin1_ = 0;
  std::size_t block_total_ = 0;
  std::size_t junction_ = 0;
};

}  // namespace spinmbqc
