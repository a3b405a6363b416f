// Copyright 2026 The genret Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Hilbert curve cell <-> distance mapping on a 2^order x 2^order grid.
// Convention: d = 0 at cell (0, 0); the order-1 traversal visits
// (0,0) -> (0,1) -> (1,1) -> (1,0).

#ifndef GENRET_HILBERT_HPP
#define GENRET_HILBERT_HPP

#include <cstdint>
#include <utility>

#include "genret/common.hpp"

namespace genret {

namespace detail {
// Rotate/flip a quadrant so lower bits index into the child curve.
inline void hilbert_rot(std::uint32_t s, std::uint32_t& x, std::uint32_t& y,
                        std::uint32_t rx, std::uint32_t ry) {
  if (ry == 0) {
    if (rx == 1) {
      x = s - 1 - x;
      y = s - 1 - y;
    }
    std::swap(x, y);
  }
}
}  // namespace detail

// Curve distance of cell (x, y). Bijective onto [0, 4^order).
inline std::uint64_t hilbert_xy_to_d(std::uint32_t x_cell, std::uint32_t y_cell, int order) {
  require(order >= 1 && order <= 31, "hilbert order out of range: ", order);
  const std::uint64_t side = 1ULL << order;
  require(x_cell < side && y_cell < side,
          "hilbert cell (", x_cell, ",", y_cell, ") outside 2^", order, " grid");
  std::uint32_t x = x_cell, y = y_cell;
  std::uint64_t d = 0;
  for (std::uint32_t s = std::uint32_t(side >> 1); s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += std::uint64_t(s) * s * ((3 * rx) ^ ry);
    detail::hilbert_rot(s, x, y, rx, ry);
  }
  return d;
}

// Inverse of hilbert_xy_to_d.
inline std::pair<std::uint32_t, std::uint32_t> hilbert_d_to_xy(std::uint64_t d, int order) {
  require(order >= 1 && order <= 31, "hilbert order out of range: ", order);
  const std::uint64_t cells = 1ULL << (2 * order);
  require(d < cells, "hilbert distance ", d, " out of range for order ", order);
  std::uint32_t x = 0, y = 0;
  std::uint64_t t = d;
  for (std::uint32_t s = 1; s < (1ULL << order); s <<= 1) {
    const std::uint32_t rx = std::uint32_t(1 & (t / 2));
    const std::uint32_t ry = std::uint32_t(1 & (t ^ rx));
    detail::hilbert_rot(s, x, y, rx, ry);
    x += s * rx;
    y += s * ry;
    t /= 4;
  }
  return {x, y};
}

}  // namespace genret

#endif  // GENRET_HILBERT_HPP
