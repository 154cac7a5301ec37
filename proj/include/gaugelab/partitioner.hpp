#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gaugelab/core.hpp"
#include "gaugelab/gauge.hpp"

namespace gaugelab {

/// How the partitioner picks the candidate tag of a subinterval.
struct TagPolicy {
  enum class Kind { Midpoint, LeftEndpoint, RightEndpoint, RandomUniform, HintFirst };

  Kind kind = Kind::Midpoint;
  std::uint64_t seed = 0;                     // RandomUniform only
  std::shared_ptr<const TagPolicy> fallback;  // HintFirst only

  static TagPolicy midpoint() { return {Kind::Midpoint, 0, nullptr}; }
  static TagPolicy left_endpoint() { return {Kind::LeftEndpoint, 0, nullptr}; }
  static TagPolicy right_endpoint() { return {Kind::RightEndpoint, 0, nullptr}; }
  static TagPolicy random_uniform(std::uint64_t seed) { return {Kind::RandomUniform, seed, nullptr}; }
  static TagPolicy hint_first(TagPolicy fallback) {
    if (fallback.kind == Kind::HintFirst) throw Error(ErrorCode::InvalidArgument, "nested hint-first policy");
    return {Kind::HintFirst, 0, std::make_shared<const TagPolicy>(std::move(fallback))};
  }

  /// Same policy with every random seed replaced.
  TagPolicy reseeded(std::uint64_t new_seed) const {
    if (kind == Kind::RandomUniform) return random_uniform(new_seed);
    if (kind == Kind::HintFirst) return hint_first(fallback->reseeded(new_seed));
    return *this;
  }

  bool randomized() const noexcept {
    return kind == Kind::RandomUniform || (kind == Kind::HintFirst && fallback->randomized());
  }

  /// "midpoint", "left", "right", "random", "hint-first:<fallback>".
  std::string name() const {
    switch (kind) {
      case Kind::Midpoint: return "midpoint";
      case Kind::LeftEndpoint: return "left";
      case Kind::RightEndpoint: return "right";
      case Kind::RandomUniform: return "random";
      case Kind::HintFirst: return "hint-first:" + fallback->name();
    }
    return "midpoint";
  }

  static TagPolicy parse(const std::string& text, std::uint64_t seed = 0) {
    if (text == "midpoint") return midpoint();
    if (text == "left") return left_endpoint();
    if (text == "right") return right_endpoint();
    if (text == "random") return random_uniform(seed);
    const std::string prefix = "hint-first:";
    if (text.rfind(prefix, 0) == 0) return hint_first(parse(text.substr(prefix.size()), seed));
    throw Error(ErrorCode::Config, "unknown tag policy '" + text + "'");
  }
};

struct PartitionBudget {
  int max_depth = 60;
  double gauge_floor = 1e-14;  // relative to the interval width
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform in [0, 1) keyed by (seed, node). A node of the bisection tree is
/// identified by its depth and its left-to-right index on that level, so the
/// draw does not depend on traversal order.
inline double node_uniform(std::uint64_t seed, int depth, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(depth) << 58) ^ index));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline bool contains_cell(double left, double right, double tag, double gauge) {
  return tag - 0.5 * gauge <= left && right <= tag + 0.5 * gauge;
}

inline Tag policy_tag(const TagPolicy& policy, double left, double right, int depth, std::uint64_t index) {
  switch (policy.kind) {
    case TagPolicy::Kind::Midpoint: return Tag(left + 0.5 * (right - left));
    case TagPolicy::Kind::LeftEndpoint: return Tag(left);
    case TagPolicy::Kind::RightEndpoint: return Tag(right);
    case TagPolicy::Kind::RandomUniform: {
      const double t = left + node_uniform(policy.seed, depth, index) * (right - left);
      return Tag(std::clamp(t, left, right));
    }
    case TagPolicy::Kind::HintFirst: return policy_tag(*policy.fallback, left, right, depth, index);
  }
  return Tag(left);
}

}  // namespace detail

/// Constructive Cousin lemma: a tagged partition of `interval` in which every
/// cell lies inside [t - g(t)/2, t + g(t)/2] around its tag t.
///
/// Each subinterval is offered candidate tags; the first one whose gauge ball
/// contains the subinterval is accepted, otherwise the subinterval is bisected
/// at its midpoint. Under HintFirst the gauge's hint tags inside the
/// subinterval come first (smallest gauge value first), then the fallback tag.
/// Other policies try their own tag first and the hints afterwards, which
/// keeps forced-tag gauges satisfiable under every policy.
///
/// Cells tagged at a forced point that lies strictly inside them are split
/// there (right-left procedure), so forced points become partition points.
inline TaggedPartition cousin_partition(const Gauge& g, const Interval& interval, const TagPolicy& policy,
                                        const PartitionBudget& budget = {}) {
  if (budget.max_depth < 1 || !(budget.gauge_floor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "partition budget needs max_depth >= 1 and gauge_floor > 0");
  }
  const double min_width = budget.gauge_floor * interval.width();
  const auto& hints = g.hints();
  const bool hints_first = policy.kind == TagPolicy::Kind::HintFirst;

  struct Node {
    double left;
    double right;
    int depth;
    std::uint64_t index;
  };
  std::vector<Node> stack{{interval.a(), interval.b(), 0, 0}};
  std::vector<std::pair<double, Tag>> inside;
  TaggedPartition out{interval, {}};

  auto try_hints = [&](const Node& node) -> const Tag* {
    auto first = std::lower_bound(hints.begin(), hints.end(), node.left,
                                  [](const Tag& t, double x) { return t.value() < x; });
    inside.clear();
    for (auto it = first; it != hints.end() && it->value() <= node.right; ++it) inside.emplace_back(g(*it), *it);
    std::stable_sort(inside.begin(), inside.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [d, t] : inside) {
      if (detail::contains_cell(node.left, node.right, t.value(), d)) return &t;
    }
    return nullptr;
  };

  while (!stack.empty()) {
    const Node node = stack.back();
    stack.pop_back();

    std::optional<Tag> accepted;
    if (hints_first) {
      if (const Tag* t = try_hints(node)) accepted = *t;
    }
    if (!accepted) {
      Tag t = detail::policy_tag(policy, node.left, node.right, node.depth, node.index);
      if (detail::contains_cell(node.left, node.right, t.value(), g(t))) accepted = t;
    }
    if (!accepted && !hints_first) {
      if (const Tag* t = try_hints(node)) accepted = *t;
    }
    if (accepted) {
      out.cells.push_back({node.left, node.right, *accepted});
      continue;
    }

    const double mid = node.left + 0.5 * (node.right - node.left);
    if (node.depth + 1 > budget.max_depth || mid - node.left < min_width || node.right - mid < min_width ||
        !(node.left < mid && mid < node.right)) {
      throw Error(ErrorCode::DepthExceeded, "gauge too small near [" + std::to_string(node.left) + ", " +
                                                std::to_string(node.right) + "] at depth " +
                                                std::to_string(node.depth));
    }
    stack.push_back({mid, node.right, node.depth + 1, 2 * node.index + 1});
    stack.push_back({node.left, mid, node.depth + 1, 2 * node.index});
  }

  for (double c : g.forced_points()) {
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
      const Cell& cell = out.cells[i];
      if (cell.tag.value() == c && cell.left < c && c < cell.right) {
        out = right_left_split(out, i);
        break;
      }
    }
  }
  return out;
}

/// The cells of p whose indices are in keep, in partition order.
inline std::vector<Cell> subpartition_sample(const TaggedPartition& p, const std::vector<std::size_t>& keep) {
  std::vector<bool> mask(p.cells.size(), false);
  for (std::size_t i : keep) {
    if (i >= p.cells.size()) throw Error(ErrorCode::InvalidArgument, "subpartition index out of range");
    mask[i] = true;
  }
  std::vector<Cell> out;
  for (std::size_t i = 0; i < p.cells.size(); ++i) {
    if (mask[i]) out.push_back(p.cells[i]);
  }
  return out;
}

}  // namespace gaugelab
