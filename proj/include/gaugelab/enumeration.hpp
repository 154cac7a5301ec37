#pragma once

#include <bit>
#include <cstdint>
#include <optional>

#include "gaugelab/core.hpp"

namespace gaugelab {

// Enumeration of the rationals in [0, 1]:
//
//   q_1 = 0/1, q_2 = 1/1, then the Stern-Brocot subtree rooted at 1/2 in
//   breadth-first order, each level left to right:
//   1/2 | 1/3 2/3 | 1/4 2/5 3/5 3/4 | 1/5 2/7 3/8 3/7 4/7 5/8 5/7 4/5 | ...
//
// q_m for m >= 3 is the node with heap index j = m - 2: the bits of j below
// its leading one, read from the top, select left (0) or right (1) children.
// Every rational in (0, 1) occurs exactly once in the tree, so the
// enumeration is injective and exhaustive.

inline Rational stern_brocot_rational(std::uint64_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "enumeration index starts at 1");
  if (m == 1) return {0, 1};
  if (m == 2) return {1, 1};
  const std::uint64_t j = m - 2;
  const int levels = std::bit_width(j) - 1;
  std::int64_t lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 1;
  std::int64_t n = 1, d = 2;
  for (int bit = levels - 1; bit >= 0; --bit) {
    if ((j >> bit) & 1U) {
      lo_n = n;
      lo_d = d;
    } else {
      hi_n = n;
      hi_d = d;
    }
    n = lo_n + hi_n;
    d = lo_d + hi_d;
  }
  return {n, d};
}

inline Tag rational_enumeration(std::uint64_t m) {
  const Rational r = stern_brocot_rational(m);
  return Tag::exact(r.num, r.den);
}

/// Position m of r in the enumeration, or nullopt when r lies outside [0, 1]
/// or deeper than max_levels below the root.
inline std::optional<std::uint64_t> enumeration_index(Rational r, int max_levels = 61) {
  if (r.den <= 0) return std::nullopt;
  if (r.num == 0) return 1;
  if (r.num == r.den) return 2;
  if (r.num < 0 || r.num > r.den) return std::nullopt;
  std::int64_t lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 1;
  std::int64_t n = 1, d = 2;
  std::uint64_t j = 1;
  for (int level = 0; level <= max_levels; ++level) {
    const __int128 lhs = static_cast<__int128>(r.num) * d;
    const __int128 rhs = static_cast<__int128>(n) * r.den;
    if (lhs == rhs) return j + 2;
    if (level == max_levels) break;
    if (lhs < rhs) {
      hi_n = n;
      hi_d = d;
      j = 2 * j;
    } else {
      lo_n = n;
      lo_d = d;
      j = 2 * j + 1;
    }
    n = lo_n + hi_n;
    d = lo_d + hi_d;
  }
  return std::nullopt;
}

}  // namespace gaugelab
