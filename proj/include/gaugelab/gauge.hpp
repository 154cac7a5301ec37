#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "gaugelab/core.hpp"
#include "gaugelab/enumeration.hpp"

namespace gaugelab {

class Gauge;

namespace detail {

struct ConstantGauge {
  double c;
};
struct PointwiseGauge {
  std::string name;
  std::function<double(double)> rule;
};
struct DirichletGauge {
  double eps;
  int depth;
};
struct ForcedTagGauge;
struct MinGauge;

}  // namespace detail

/// Strictly positive function on the line, evaluated at tags.
///
/// Kinds: constant, pointwise rule, Dirichlet (eps / 2^m at the m-th
/// enumerated rational for m <= depth, 1 elsewhere), forced tag at c, and the
/// pointwise minimum of two gauges. A gauge also carries candidate tags
/// ("hints") that the partitioner may try before its own policy.
class Gauge {
 public:
  enum class Kind { Constant, Pointwise, Dirichlet, ForcedTag, Min };

  static Gauge constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::GaugeNonPositive, "constant gauge " + std::to_string(c));
    return Gauge(std::make_shared<const Node>(Node{detail::ConstantGauge{c}, {}, {}}));
  }

  static Gauge pointwise(std::string name, std::function<double(double)> rule) {
    return Gauge(std::make_shared<const Node>(Node{detail::PointwiseGauge{std::move(name), std::move(rule)}, {}, {}}));
  }

  static Gauge dirichlet(double eps, int depth) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::GaugeNonPositive, "dirichlet eps must be positive");
    if (depth < 1 || depth > 62) throw Error(ErrorCode::InvalidArgument, "dirichlet depth must be in [1, 62]");
    std::vector<Tag> hints;
    hints.reserve(static_cast<std::size_t>(depth));
    for (int m = 1; m <= depth; ++m) hints.push_back(rational_enumeration(static_cast<std::uint64_t>(m)));
    return Gauge(std::make_shared<const Node>(Node{detail::DirichletGauge{eps, depth}, normalize(std::move(hints)), {}}));
  }

  static Gauge forced_tag(double c, Gauge left, Gauge right);
  static Gauge pointwise_min(Gauge a, Gauge b);

  /// Copy with extra candidate tags.
  Gauge with_hints(std::vector<Tag> extra) const {
    Node node = *node_;
    node.hints.insert(node.hints.end(), extra.begin(), extra.end());
    node.hints = normalize(std::move(node.hints));
    return Gauge(std::make_shared<const Node>(std::move(node)));
  }

  Kind kind() const noexcept { return static_cast<Kind>(node_->impl.index()); }
  const std::vector<Tag>& hints() const noexcept { return node_->hints; }
  /// Points that every fine partition must use as a tag (forced-tag centres).
  const std::vector<double>& forced_points() const noexcept { return node_->forced; }

  /// Gauge value at t; throws GaugeNonPositive unless strictly positive and finite.
  double operator()(const Tag& t) const {
    const double v = raw(t);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::GaugeNonPositive, "gauge is " + std::to_string(v) + " at " + std::to_string(t.value()));
    }
    return v;
  }
  double operator()(double x) const { return (*this)(Tag(x)); }

  nlohmann::json to_json() const;

 private:
  using Impl = std::variant<detail::ConstantGauge, detail::PointwiseGauge, detail::DirichletGauge,
                            std::shared_ptr<const detail::ForcedTagGauge>, std::shared_ptr<const detail::MinGauge>>;
  struct Node {
    Impl impl;
    std::vector<Tag> hints;
    std::vector<double> forced;
  };

  explicit Gauge(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static std::vector<Tag> normalize(std::vector<Tag> tags) {
    std::sort(tags.begin(), tags.end(), [](const Tag& x, const Tag& y) {
      if (x.value() != y.value()) return x.value() < y.value();
      return x.is_rational() && !y.is_rational();
    });
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    return tags;
  }

  static std::vector<double> merge_points(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x);
    out.insert(out.end(), y.begin(), y.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  double raw(const Tag& t) const;

  std::shared_ptr<const Node> node_;
};

namespace detail {

struct ForcedTagGauge {
  double c;
  Gauge left;
  Gauge right;
};
struct MinGauge {
  Gauge a;
  Gauge b;
};

}  // namespace detail

inline Gauge Gauge::forced_tag(double c, Gauge left, Gauge right) {
  std::vector<Tag> hints = left.hints();
  hints.insert(hints.end(), right.hints().begin(), right.hints().end());
  hints.emplace_back(c);
  std::vector<double> forced = merge_points(left.forced_points(), right.forced_points());
  forced = merge_points(forced, {c});
  auto impl = std::make_shared<const detail::ForcedTagGauge>(detail::ForcedTagGauge{c, std::move(left), std::move(right)});
  return Gauge(std::make_shared<const Node>(Node{std::move(impl), normalize(std::move(hints)), std::move(forced)}));
}

inline Gauge Gauge::pointwise_min(Gauge a, Gauge b) {
  std::vector<Tag> hints = a.hints();
  hints.insert(hints.end(), b.hints().begin(), b.hints().end());
  std::vector<double> forced = merge_points(a.forced_points(), b.forced_points());
  auto impl = std::make_shared<const detail::MinGauge>(detail::MinGauge{std::move(a), std::move(b)});
  return Gauge(std::make_shared<const Node>(Node{std::move(impl), normalize(std::move(hints)), std::move(forced)}));
}

inline double Gauge::raw(const Tag& t) const {
  struct Visitor {
    const Tag& t;
    double operator()(const detail::ConstantGauge& g) const { return g.c; }
    double operator()(const detail::PointwiseGauge& g) const { return g.rule(t.value()); }
    double operator()(const detail::DirichletGauge& g) const {
      if (!t.exact()) return 1.0;
      const int levels = std::bit_width(static_cast<unsigned>(g.depth)) + 1;
      const auto m = enumeration_index(*t.exact(), levels);
      if (!m || *m > static_cast<std::uint64_t>(g.depth)) return 1.0;
      return std::ldexp(g.eps, -static_cast<int>(*m));
    }
    double operator()(const std::shared_ptr<const detail::ForcedTagGauge>& g) const {
      const double x = t.value();
      if (x < g->c) return std::min(g->left(t), 0.5 * (g->c - x));
      if (x > g->c) return std::min(g->right(t), 0.5 * (x - g->c));
      return std::min(g->left(t), g->right(t));
    }
    double operator()(const std::shared_ptr<const detail::MinGauge>& g) const { return std::min(g->a(t), g->b(t)); }
  };
  return std::visit(Visitor{t}, node_->impl);
}

inline nlohmann::json tag_to_json(const Tag& t) {
  nlohmann::json j;
  j["tag"] = t.value();
  if (t.exact()) {
    j["exact"] = nlohmann::json::array({t.exact()->num, t.exact()->den});
  } else {
    j["exact"] = nullptr;
  }
  return j;
}

inline nlohmann::json Gauge::to_json() const {
  struct Visitor {
    nlohmann::json operator()(const detail::ConstantGauge& g) const { return {{"kind", "constant"}, {"c", g.c}}; }
    nlohmann::json operator()(const detail::PointwiseGauge& g) const { return {{"kind", "pointwise"}, {"name", g.name}}; }
    nlohmann::json operator()(const detail::DirichletGauge& g) const {
      return {{"kind", "dirichlet"}, {"eps", g.eps}, {"depth", g.depth}};
    }
    nlohmann::json operator()(const std::shared_ptr<const detail::ForcedTagGauge>& g) const {
      return {{"kind", "forced-tag"}, {"c", g->c}, {"left", g->left.to_json()}, {"right", g->right.to_json()}};
    }
    nlohmann::json operator()(const std::shared_ptr<const detail::MinGauge>& g) const {
      return {{"kind", "min"}, {"a", g->a.to_json()}, {"b", g->b.to_json()}};
    }
  };
  return std::visit(Visitor{}, node_->impl);
}

/// Rebuilds a gauge from to_json output. Pointwise rules are code, so they are
/// looked up by name through the resolver.
inline Gauge gauge_from_json(const nlohmann::json& j,
                             const std::function<Gauge(const std::string&)>& resolve_pointwise = {}) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return Gauge::constant(j.at("c").get<double>());
    if (kind == "dirichlet") return Gauge::dirichlet(j.at("eps").get<double>(), j.at("depth").get<int>());
    if (kind == "forced-tag") {
      return Gauge::forced_tag(j.at("c").get<double>(), gauge_from_json(j.at("left"), resolve_pointwise),
                               gauge_from_json(j.at("right"), resolve_pointwise));
    }
    if (kind == "min") {
      return Gauge::pointwise_min(gauge_from_json(j.at("a"), resolve_pointwise),
                                  gauge_from_json(j.at("b"), resolve_pointwise));
    }
    if (kind == "pointwise") {
      if (!resolve_pointwise) throw Error(ErrorCode::Config, "no resolver for pointwise gauge");
      return resolve_pointwise(j.at("name").get<std::string>());
    }
    throw Error(ErrorCode::Config, "unknown gauge kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("malformed gauge: ") + e.what());
  }
}

/// Family delta_n, n = 1, 2, ... When decreasing is enforced the realized
/// gauge at n + 1 is min(generator(n + 1), realized(n)).
class GaugeSequence {
 public:
  using Generator = std::function<Gauge(int)>;

  explicit GaugeSequence(Generator generator, bool enforce_decreasing = true)
      : generator_(std::move(generator)), enforce_decreasing_(enforce_decreasing) {}

  /// delta_n = Constant(width / 2^n), the Riemann-style default.
  static GaugeSequence halving(const Interval& interval, double scale = 1.0) {
    const double w = interval.width() * scale;
    return GaugeSequence([w](int n) { return Gauge::constant(std::ldexp(w, -n)); });
  }

  bool enforce_decreasing() const noexcept { return enforce_decreasing_; }

  Gauge operator()(int n) const {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "gauge index starts at 1");
    if (!enforce_decreasing_) return generator_(n);
    Gauge g = generator_(1);
    for (int k = 2; k <= n; ++k) g = Gauge::pointwise_min(generator_(k), g);
    return g;
  }

  /// Raw generator output, without the decreasing envelope.
  Gauge generated(int n) const { return generator_(n); }

 private:
  Generator generator_;
  bool enforce_decreasing_;
};

enum class Fineness { Width, Containment };

inline bool is_delta_fine(std::span<const Cell> cells, const Gauge& g, Fineness mode) {
  for (const Cell& c : cells) {
    const double d = g(c.tag);
    if (mode == Fineness::Width) {
      if (!(c.right - c.left < d)) return false;
    } else {
      const double t = c.tag.value();
      if (!(t - 0.5 * d <= c.left && c.right <= t + 0.5 * d)) return false;
    }
  }
  return true;
}

inline bool is_delta_fine(const TaggedPartition& p, const Gauge& g, Fineness mode) {
  return is_delta_fine(std::span<const Cell>(p.cells), g, mode);
}

}  // namespace gaugelab
