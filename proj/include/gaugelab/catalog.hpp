#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gaugelab/gauge.hpp"
#include "gaugelab/integrand.hpp"
#include "gaugelab/partitioner.hpp"

namespace gaugelab {

struct ParamSpec {
  enum class Type { Number, Integer, NumberList };
  std::string name;
  Type type = Type::Number;
  nlohmann::json default_value;
  std::string description;
};

struct ReferenceRule {
  Provenance kind = Provenance::None;
  std::string description;
};

struct Partners {
  std::string antiderivative;  // empty when none
  std::string derivative;
};

enum class Monotone { None, NonDecreasing, NonIncreasing };

/// Metadata of a parameterized family f_k (parameter "k").
struct FamilyMeta {
  Monotone monotone = Monotone::None;
  std::function<double(int)> uniform_rate;  // sup |f_k - limit| on the default interval
  std::function<double(int)> tail_bound;    // |int f_k - int limit| on the default interval
  std::string limit_id;
  nlohmann::json limit_params = nlohmann::json::object();
};

using Params = nlohmann::json;

struct CatalogEntry {
  std::string id;
  std::string description;
  std::vector<ParamSpec> params;
  ReferenceRule reference_rule;
  std::optional<Partners> partners;
  std::optional<FamilyMeta> family;
  Interval default_interval{0.0, 1.0};
  bool lipschitz = false;
  double recommended_tau = 1e-6;
  std::function<Integrand(const Params&)> build;
  /// Gauge sequence suited to the integrand on an interval; `scale` shrinks or
  /// widens every gauge so that two different sequences can be compared.
  std::function<GaugeSequence(const Params&, const Interval&, double scale)> gauges;
};

namespace detail {

inline double oscillatory_denjoy(double x) { return x == 0.0 ? 0.0 : std::sin(1.0 / (x * x * x)) / x; }

inline double ftc_F(double x) { return x == 0.0 ? 0.0 : x * x * std::sin(1.0 / (x * x)); }

inline double ftc_f(double x) {
  if (x == 0.0) return 0.0;
  const double u = 1.0 / (x * x);
  return 2.0 * x * std::sin(u) - 2.0 / x * std::cos(u);
}

/// Uniform midpoint rule on [lo, hi] with n cells.
inline double midpoint_rule(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
  const double h = (hi - lo) / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f(lo + (static_cast<double>(i) + 0.5) * h);
  return s * h;
}

/// Oracle for (1/x) sin(1/x^3): midpoint refinement on [eta, hi] until two
/// successive doublings agree, for a decreasing schedule of cut-offs eta.
/// The value at the smallest cut-off is reported, with the spread of the last
/// three cut-offs as its uncertainty.
inline std::pair<double, double> denjoy_oracle(double lo, double hi) {
  auto f = [](double x) { return oscillatory_denjoy(x); };
  auto stable = [&](double a, double b, double finest) {
    std::size_t n = static_cast<std::size_t>(std::ceil((b - a) / finest)) + 16;
    double prev = midpoint_rule(f, a, b, n);
    for (int k = 0; k < 6; ++k) {
      n *= 2;
      const double next = midpoint_rule(f, a, b, n);
      if (std::abs(next - prev) < 1e-9) return next;
      prev = next;
    }
    return prev;
  };
  // local oscillation period of sin(1/x^3) is 2 pi x^4 / 3; sample it 6 times
  auto step_at = [](double x) { return 2.0 * std::numbers::pi * std::pow(x, 4) / 3.0 / 6.0; };
  if (lo > 0.0) return {stable(lo, hi, step_at(lo)), 0.0};
  std::vector<double> values;
  for (double eta = std::min(0.1, hi / 2); values.size() < 5; eta *= 0.8) {
    values.push_back(stable(eta, hi, step_at(eta)));
  }
  const auto last3 = std::vector<double>(values.end() - 3, values.end());
  const auto [mn, mx] = std::minmax_element(last3.begin(), last3.end());
  return {values.back(), *mx - *mn};
}

inline double horner(const std::vector<double>& c, double x) {
  double y = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) y = y * x + *it;
  return y;
}

}  // namespace detail

/// Registry of integrands with reference values, derivative partners and
/// family metadata. Immutable after construction.
class Catalog {
 public:
  Catalog() { register_defaults(); }

  const CatalogEntry& entry(const std::string& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw Error(ErrorCode::UnknownId, "no catalog entry '" + id + "'");
    return it->second;
  }

  bool contains(const std::string& id) const { return entries_.count(id) != 0; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, e] : entries_) out.push_back(id);
    return out;
  }

  /// Defaults merged with the given parameters; unknown keys or wrong types
  /// are rejected.
  Params resolve(const CatalogEntry& e, const Params& given) const {
    if (!given.is_null() && !given.is_object()) throw Error(ErrorCode::BadParams, "params must be an object");
    Params out = Params::object();
    for (const auto& p : e.params) out[p.name] = p.default_value;
    if (given.is_object()) {
      for (const auto& [key, value] : given.items()) {
        auto spec = std::find_if(e.params.begin(), e.params.end(), [&](const ParamSpec& p) { return p.name == key; });
        if (spec == e.params.end()) throw Error(ErrorCode::BadParams, e.id + " has no parameter '" + key + "'");
        check_type(e.id, *spec, value);
        out[key] = value;
      }
    }
    return out;
  }

  std::pair<Integrand, const CatalogEntry&> get(const std::string& id, const Params& params = Params::object()) const {
    const CatalogEntry& e = entry(id);
    Integrand f = e.build(resolve(e, params));
    if (!f.reference() && e.reference_rule.kind == Provenance::ClosedForm && f.antiderivative()) {
      const Interval& I = e.default_interval;
      f = f.with_reference({f.exact_integral(I.a(), I.b()), Provenance::ClosedForm});
    }
    return {f, e};
  }

  GaugeSequence gauges(const std::string& id, const Params& params, const Interval& interval,
                       double scale = 1.0) const {
    const CatalogEntry& e = entry(id);
    return e.gauges(resolve(e, params), interval, scale);
  }

  nlohmann::json manifest_entry(const CatalogEntry& e) const {
    nlohmann::json params = nlohmann::json::array();
    for (const auto& p : e.params) {
      const char* type = p.type == ParamSpec::Type::Number    ? "number"
                         : p.type == ParamSpec::Type::Integer ? "integer"
                                                              : "number-list";
      params.push_back({{"name", p.name}, {"type", type}, {"default", p.default_value}, {"description", p.description}});
    }
    nlohmann::json j = {{"id", e.id},
                        {"description", e.description},
                        {"params", params},
                        {"referenceRule", {{"kind", to_string(e.reference_rule.kind)},
                                           {"description", e.reference_rule.description}}},
                        {"defaultInterval", {e.default_interval.a(), e.default_interval.b()}}};
    if (e.partners) {
      j["partners"] = {{"antiderivative", e.partners->antiderivative.empty() ? nlohmann::json(nullptr)
                                                                            : nlohmann::json(e.partners->antiderivative)},
                       {"derivative", e.partners->derivative.empty() ? nlohmann::json(nullptr)
                                                                    : nlohmann::json(e.partners->derivative)}};
    } else {
      j["partners"] = nullptr;
    }
    if (e.family) {
      const char* mono = e.family->monotone == Monotone::NonDecreasing   ? "non-decreasing"
                         : e.family->monotone == Monotone::NonIncreasing ? "non-increasing"
                                                                          : "none";
      j["family"] = {{"monotone", mono},
                     {"uniformRate", static_cast<bool>(e.family->uniform_rate)},
                     {"tailBound", static_cast<bool>(e.family->tail_bound)},
                     {"limitId", e.family->limit_id},
                     {"limitParams", e.family->limit_params}};
    } else {
      j["family"] = nullptr;
    }
    j["lipschitz"] = e.lipschitz;
    j["recommendedTau"] = e.recommended_tau;
    return j;
  }

  nlohmann::json manifest() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [id, e] : entries_) out.push_back(manifest_entry(e));
    return out;
  }

 private:
  static void check_type(const std::string& id, const ParamSpec& spec, const nlohmann::json& v) {
    bool ok = false;
    switch (spec.type) {
      case ParamSpec::Type::Number: ok = v.is_number(); break;
      case ParamSpec::Type::Integer: ok = v.is_number_integer() && v.get<long long>() >= 1; break;
      case ParamSpec::Type::NumberList:
        ok = v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const auto& x) { return x.is_number(); });
        break;
    }
    if (!ok) throw Error(ErrorCode::BadParams, id + ": bad value for '" + spec.name + "'");
  }

  void add(CatalogEntry e) {
    if (!e.gauges) {
      e.gauges = [](const Params&, const Interval& I, double scale) { return GaugeSequence::halving(I, scale); };
    }
    entries_.emplace(e.id, std::move(e));
  }

  void register_defaults();

  std::map<std::string, CatalogEntry> entries_;
};

inline void Catalog::register_defaults() {
  using T = ParamSpec::Type;
  const Interval line(-1e6, 1e6);
  const Interval unit(0.0, 1.0);
  const double pi = std::numbers::pi;

  add({"constant", "f(x) = c", {{"c", T::Number, 1.0, "value"}},
       {Provenance::ClosedForm, "c (b - a)"}, std::nullopt, std::nullopt, unit, true, 1e-6,
       [=](const Params& p) {
         const double c = p["c"].get<double>();
         return Integrand::from_real("constant", [c](double) { return c; }, line)
             .with_antiderivative([c](double x) { return c * x; });
       },
       {}});

  add({"poly", "polynomial sum_i coeffs[i] x^i",
       {{"coeffs", T::NumberList, nlohmann::json::array({0.0, 4.0, -1.0}), "ascending coefficients"}},
       {Provenance::ClosedForm, "antiderivative sum_i coeffs[i] x^(i+1) / (i+1)"}, std::nullopt, std::nullopt,
       Interval(0.0, 4.0), true, 1e-6,
       [=](const Params& p) {
         const auto c = p["coeffs"].get<std::vector<double>>();
         std::vector<double> anti{0.0};
         for (std::size_t i = 0; i < c.size(); ++i) anti.push_back(c[i] / static_cast<double>(i + 1));
         return Integrand::from_real("poly", [c](double x) { return detail::horner(c, x); }, line)
             .with_antiderivative([anti](double x) { return detail::horner(anti, x); });
       },
       {}});

  add({"sin", "f(x) = sin x", {}, {Provenance::ClosedForm, "-cos x"}, Partners{"", "cos"}, std::nullopt,
       Interval(0.0, pi), true, 1e-6,
       [=](const Params&) {
         return Integrand::from_real("sin", [](double x) { return std::sin(x); }, line)
             .with_antiderivative([](double x) { return -std::cos(x); });
       },
       {}});

  add({"cos", "f(x) = cos x", {}, {Provenance::ClosedForm, "sin x"}, Partners{"sin", ""}, std::nullopt,
       Interval(0.0, pi), true, 1e-6,
       [=](const Params&) {
         return Integrand::from_real("cos", [](double x) { return std::cos(x); }, line)
             .with_antiderivative([](double x) { return std::sin(x); });
       },
       {}});

  add({"exp", "f(x) = exp x", {}, {Provenance::ClosedForm, "exp x"}, Partners{"exp", "exp"}, std::nullopt, unit,
       true, 1e-6,
       [=](const Params&) {
         return Integrand::from_real("exp", [](double x) { return std::exp(x); }, Interval(-50.0, 50.0))
             .with_antiderivative([](double x) { return std::exp(x); });
       },
       {}});

  add({"step", "piecewise constant: values[i] on [breaks[i-1], breaks[i]), right-continuous",
       {{"breaks", T::NumberList, nlohmann::json::array({0.5}), "increasing jump points"},
        {"values", T::NumberList, nlohmann::json::array({1.0, 0.0}), "one more value than breaks"}},
       {Provenance::ClosedForm, "piecewise-linear antiderivative"}, std::nullopt, std::nullopt, unit, false, 1e-6,
       [=](const Params& p) {
         const auto breaks = p["breaks"].get<std::vector<double>>();
         const auto values = p["values"].get<std::vector<double>>();
         if (values.size() != breaks.size() + 1 || !std::is_sorted(breaks.begin(), breaks.end())) {
           throw Error(ErrorCode::BadParams, "step needs sorted breaks and one more value than breaks");
         }
         auto piece = [breaks](double x) {
           return static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin());
         };
         // integral from breaks[0] to x
         auto F = [breaks, values](double x) {
           if (x < breaks[0]) return -values[0] * (breaks[0] - x);
           double acc = 0.0;
           for (std::size_t i = 1; i < values.size(); ++i) {
             const double hi = i < breaks.size() ? std::min(x, breaks[i]) : x;
             if (hi > breaks[i - 1]) acc += values[i] * (hi - breaks[i - 1]);
           }
           return acc;
         };
         return Integrand::from_real("step", [values, piece](double x) { return values[piece(x)]; }, line)
             .with_antiderivative(F);
       },
       {}});

  add({"dirichlet", "1 at tags carrying an exact rational identity, 0 otherwise", {},
       {Provenance::ClosedForm, "0 on any subinterval of [0, 1]"}, std::nullopt, std::nullopt, unit, false, 1e-3,
       [=](const Params&) {
         return Integrand("dirichlet", [](const Tag& t) { return t.is_rational() ? 1.0 : 0.0; }, unit)
             .with_antiderivative([](double) { return 0.0; })
             .with_reference({0.0, Provenance::ClosedForm});
       },
       [](const Params&, const Interval&, double scale) {
         return GaugeSequence([scale](int n) { return Gauge::dirichlet(scale * std::ldexp(1.0, -n), 30); });
       }});

  add({"oscillatory-denjoy", "f(x) = (1/x) sin(1/x^3), f(0) = 0", {},
       {Provenance::Oracle, "midpoint refinement on [eta, b] for decreasing eta; spread of the last cut-offs"},
       std::nullopt, std::nullopt, unit, false, 1e-3,
       [=](const Params&) {
         return Integrand::from_real("oscillatory-denjoy", detail::oscillatory_denjoy, unit).with_singularities({0.0});
       },
       [](const Params&, const Interval&, double scale) {
         return GaugeSequence([scale](int n) {
           const double s = scale * std::ldexp(1.0, -n);
           return Gauge::pointwise("denjoy",
                                   [s](double x) {
                                     const double ax = std::abs(x);
                                     return ax == 0.0 ? s * s : std::min(s, s * ax * ax * ax * ax);
                                   })
               .with_hints({Tag::exact(0, 1)});
         });
       }});

  auto ftc_gauges = [](const Params&, const Interval&, double scale) {
    return GaugeSequence([scale](int n) {
      const double s = scale * std::ldexp(1.0, -n);
      return Gauge::pointwise("ftc-pathological",
                              [s](double x) {
                                const double ax = std::abs(x);
                                return ax == 0.0 ? 0.5 * std::sqrt(s) : std::min(s, s * ax * ax * ax);
                              })
          .with_hints({Tag::exact(0, 1)});
    });
  };

  add({"ftc-pathological", "F(x) = x^2 sin(1/x^2), F(0) = 0", {}, {Provenance::None, ""},
       Partners{"", "ftc-pathological-derivative"}, std::nullopt, unit, false, 1e-3,
       [=](const Params&) { return Integrand::from_real("ftc-pathological", detail::ftc_F, Interval(-1.0, 1.0)); },
       ftc_gauges});

  add({"ftc-pathological-derivative", "f(x) = 2x sin(1/x^2) - (2/x) cos(1/x^2), f(0) = 0", {},
       {Provenance::ClosedForm, "F(b) - F(a) with F(x) = x^2 sin(1/x^2)"}, Partners{"ftc-pathological", ""},
       std::nullopt, unit, false, 1e-3,
       [=](const Params&) {
         return Integrand::from_real("ftc-pathological-derivative", detail::ftc_f, Interval(-1.0, 1.0))
             .with_singularities({0.0})
             .with_antiderivative(detail::ftc_F);
       },
       ftc_gauges});

  add({"family-power", "f_k(x) = x^k on [0, 1]", {{"k", T::Integer, 1, "power"}},
       {Provenance::ClosedForm, "x^(k+1) / (k+1)"}, std::nullopt,
       FamilyMeta{Monotone::NonIncreasing, {}, [](int k) { return 1.0 / (k + 1.0); }, "family-power-limit", {}},
       unit, true, 1e-6,
       [=](const Params& p) {
         const int k = p["k"].get<int>();
         return Integrand::from_real("family-power", [k](double x) { return std::pow(x, k); }, unit)
             .with_antiderivative([k](double x) { return std::pow(x, k + 1) / (k + 1.0); });
       },
       {}});

  add({"family-power-limit", "pointwise limit of x^k: 0 on [0, 1), 1 at x = 1", {},
       {Provenance::ClosedForm, "0 (a single point does not contribute)"}, std::nullopt, std::nullopt, unit, false,
       1e-6,
       [=](const Params&) {
         return Integrand::from_real("family-power-limit", [](double x) { return x == 1.0 ? 1.0 : 0.0; }, unit)
             .with_antiderivative([](double) { return 0.0; });
       },
       {}});

  add({"family-capped-invsqrt", "f_k(x) = min(k, x^(-1/2)), f_k(0) = k", {{"k", T::Integer, 1, "cap"}},
       {Provenance::ClosedForm, "k x below 1/k^2, 2 sqrt(x) - 1/k above"}, std::nullopt,
       FamilyMeta{Monotone::NonDecreasing, {}, [](int k) { return 1.0 / k; }, "invsqrt", {}}, unit, true, 1e-6,
       [=](const Params& p) {
         const double k = p["k"].get<int>();
         return Integrand::from_real("family-capped-invsqrt",
                                     [k](double x) { return x <= 0.0 ? k : std::min(k, 1.0 / std::sqrt(x)); }, unit)
             .with_antiderivative([k](double x) { return x <= 1.0 / (k * k) ? k * x : 2.0 * std::sqrt(x) - 1.0 / k; });
       },
       {}});

  add({"invsqrt", "f(x) = x^(-1/2), f(0) = 0 by convention", {}, {Provenance::ClosedForm, "2 sqrt(x)"},
       std::nullopt, std::nullopt, unit, false, 1e-3,
       [=](const Params&) {
         return Integrand::from_real("invsqrt", [](double x) { return x <= 0.0 ? 0.0 : 1.0 / std::sqrt(x); }, unit)
             .with_singularities({0.0})
             .with_antiderivative([](double x) { return 2.0 * std::sqrt(std::max(x, 0.0)); });
       },
       [](const Params&, const Interval&, double scale) {
         return GaugeSequence([scale](int n) {
           const double s = scale * std::ldexp(1.0, -n);
           // the cell tagged at 0 loses about 2 sqrt(d0) of mass
           const double d0 = std::max(std::pow(s, 6.0), 0x1p-40);
           return Gauge::pointwise("invsqrt",
                                   [s, d0](double x) { return x <= 0.0 ? d0 : std::min(s, std::max(s * x, d0)); })
               .with_hints({Tag::exact(0, 1)});
         });
       }});

  add({"family-uniform-shift", "f_k(x) = x + 1/k", {{"k", T::Integer, 1, "index"}},
       {Provenance::ClosedForm, "x^2/2 + x/k"}, std::nullopt,
       FamilyMeta{Monotone::NonIncreasing, [](int k) { return 1.0 / k; }, [](int k) { return 1.0 / k; }, "poly",
                  {{"coeffs", {0.0, 1.0}}}},
       unit, true, 1e-6,
       [=](const Params& p) {
         const double k = p["k"].get<int>();
         return Integrand::from_real("family-uniform-shift", [k](double x) { return x + 1.0 / k; }, line)
             .with_antiderivative([k](double x) { return 0.5 * x * x + x / k; });
       },
       {}});

  add({"family-sin-decay", "f_k(x) = sin(x) / k", {{"k", T::Integer, 1, "index"}},
       {Provenance::ClosedForm, "-cos(x) / k"}, std::nullopt,
       FamilyMeta{Monotone::None, [](int k) { return 1.0 / k; }, [](int k) { return 2.0 / k; }, "constant",
                  {{"c", 0.0}}},
       Interval(0.0, pi), true, 1e-6,
       [=](const Params& p) {
         const double k = p["k"].get<int>();
         return Integrand::from_real("family-sin-decay", [k](double x) { return std::sin(x) / k; }, line)
             .with_antiderivative([k](double x) { return -std::cos(x) / k; });
       },
       {}});
}

inline const Catalog& catalog() {
  static const Catalog instance;
  return instance;
}

inline std::pair<Integrand, const CatalogEntry&> catalog_get(const std::string& id,
                                                             const Params& params = Params::object()) {
  return catalog().get(id, params);
}

struct OracleValue {
  double value = 0.0;
  double uncertainty = 0.0;
};

/// Reference integral over `interval`, computed without the gauge integrator.
inline OracleValue oracle_value(const std::string& id, const Params& params, const Interval& interval) {
  const auto [f, entry] = catalog_get(id, params);
  switch (entry.reference_rule.kind) {
    case Provenance::ClosedForm: return {f.exact_integral(interval.a(), interval.b()), 0.0};
    case Provenance::Oracle: {
      if (id == "oscillatory-denjoy") {
        if (interval.a() < 0.0) throw Error(ErrorCode::EvalDomain, "oracle covers [0, 1] only");
        const auto [v, u] = detail::denjoy_oracle(interval.a(), interval.b());
        return {v, u};
      }
      throw Error(ErrorCode::NoReference, id + " has no oracle procedure");
    }
    case Provenance::None: break;
  }
  throw Error(ErrorCode::NoReference, id + " has no reference value");
}

}  // namespace gaugelab
