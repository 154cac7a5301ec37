#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gaugelab/error.hpp"

namespace gaugelab {

/// Compact interval [a, b] with a < b and a width well above rounding scale.
class Interval {
 public:
  Interval(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
      throw Error(ErrorCode::InvalidInterval,
                  "need finite a < b, got [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    if (b - a < 64.0 * std::numeric_limits<double>::epsilon() * scale) {
      throw Error(ErrorCode::InvalidInterval, "degenerate width " + std::to_string(b - a));
    }
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double width() const noexcept { return b_ - a_; }
  bool contains(double x) const noexcept { return a_ <= x && x <= b_; }
  bool contains(const Interval& other) const noexcept { return a_ <= other.a_ && other.b_ <= b_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double a_;
  double b_;
};

/// Exact rational numerator/denominator, always in lowest terms with den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
};

inline Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidTag, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

/// A tag point. The optional exact part marks the point as a known rational;
/// a tag without it is treated as irrational by rationality-sensitive code.
class Tag {
 public:
  Tag() = default;
  explicit Tag(double value) : value_(value) {}

  Tag(double value, Rational exact) : value_(value), exact_(exact) {
    if (exact.den <= 0 || std::gcd(exact.num, exact.den) != 1) {
      throw Error(ErrorCode::InvalidTag, "exact part not in lowest terms");
    }
    const long double q = static_cast<long double>(exact.num) / static_cast<long double>(exact.den);
    const double ulp = std::nextafter(std::abs(value), std::numeric_limits<double>::infinity()) -
                       std::abs(value);
    if (std::abs(static_cast<long double>(value) - q) > static_cast<long double>(ulp)) {
      throw Error(ErrorCode::InvalidTag, "value disagrees with exact part");
    }
  }

  static Tag exact(std::int64_t num, std::int64_t den) {
    const Rational r = make_rational(num, den);
    return Tag(static_cast<double>(static_cast<long double>(r.num) / static_cast<long double>(r.den)), r);
  }

  double value() const noexcept { return value_; }
  const std::optional<Rational>& exact() const noexcept { return exact_; }
  bool is_rational() const noexcept { return exact_.has_value(); }

  friend bool operator==(const Tag&, const Tag&) = default;

 private:
  double value_ = 0.0;
  std::optional<Rational> exact_;
};

struct Cell {
  double left = 0.0;
  double right = 0.0;
  Tag tag;

  double width() const noexcept { return right - left; }
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Ordered tagged cells over an interval. Construction does not validate;
/// use validate_partition (or the operations that require validity).
struct TaggedPartition {
  Interval interval;
  std::vector<Cell> cells;

  friend bool operator==(const TaggedPartition&, const TaggedPartition&) = default;
};

struct Violation {
  std::size_t cell = 0;
  std::string rule;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

inline ValidationResult validate_partition(const TaggedPartition& p) {
  ValidationResult res;
  auto add = [&](std::size_t i, std::string rule) { res.violations.push_back({i, std::move(rule)}); };
  const auto& cells = p.cells;
  if (cells.empty()) {
    add(0, "empty partition");
    return res;
  }
  if (cells.front().left != p.interval.a()) add(0, "first cell does not start at a");
  if (cells.back().right != p.interval.b()) add(cells.size() - 1, "last cell does not end at b");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    if (!(c.left < c.right)) add(i, "empty cell " + std::to_string(i));
    if (!(c.left <= c.tag.value() && c.tag.value() <= c.right)) {
      add(i, "tag outside cell " + std::to_string(i));
    }
    if (i + 1 < cells.size() && c.right != cells[i + 1].left) {
      add(i, "gap between cells " + std::to_string(i) + " and " + std::to_string(i + 1));
    }
  }
  return res;
}

inline void require_valid(const TaggedPartition& p) {
  const auto res = validate_partition(p);
  if (!res.ok()) throw Error(ErrorCode::InvalidPartition, res.violations.front().rule);
}

/// Right-left procedure: split the indexed cell at its interior tag into two
/// abutting cells that both carry that tag.
inline TaggedPartition right_left_split(const TaggedPartition& p, std::size_t index) {
  require_valid(p);
  if (index >= p.cells.size()) throw Error(ErrorCode::InvalidArgument, "cell index out of range");
  const Cell& c = p.cells[index];
  const double t = c.tag.value();
  if (!(c.left < t && t < c.right)) {
    throw Error(ErrorCode::TagOnBoundary, "tag of cell " + std::to_string(index) + " is an endpoint");
  }
  TaggedPartition out{p.interval, {}};
  out.cells.reserve(p.cells.size() + 1);
  out.cells.insert(out.cells.end(), p.cells.begin(), p.cells.begin() + static_cast<std::ptrdiff_t>(index));
  out.cells.push_back({c.left, t, c.tag});
  out.cells.push_back({t, c.right, c.tag});
  out.cells.insert(out.cells.end(), p.cells.begin() + static_cast<std::ptrdiff_t>(index) + 1, p.cells.end());
  return out;
}

/// Inverse of right_left_split: join cells index and index+1 when both are
/// tagged at their shared endpoint.
inline TaggedPartition right_left_merge(const TaggedPartition& p, std::size_t index) {
  require_valid(p);
  if (index + 1 >= p.cells.size()) throw Error(ErrorCode::NotMergeable, "no cell to the right");
  const Cell& lhs = p.cells[index];
  const Cell& rhs = p.cells[index + 1];
  if (!(lhs.tag == rhs.tag) || lhs.tag.value() != lhs.right) {
    throw Error(ErrorCode::NotMergeable,
                "cells " + std::to_string(index) + " and " + std::to_string(index + 1) +
                    " do not share a tag at their common endpoint");
  }
  TaggedPartition out{p.interval, {}};
  out.cells.reserve(p.cells.size() - 1);
  out.cells.insert(out.cells.end(), p.cells.begin(), p.cells.begin() + static_cast<std::ptrdiff_t>(index));
  out.cells.push_back({lhs.left, rhs.right, lhs.tag});
  out.cells.insert(out.cells.end(), p.cells.begin() + static_cast<std::ptrdiff_t>(index) + 2, p.cells.end());
  return out;
}

}  // namespace gaugelab
