#pragma once

#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gaugelab/catalog.hpp"
#include "gaugelab/harness.hpp"

namespace gaugelab {

// Named verification suites, shared by the CLI and the acceptance tests.

struct SuiteContext {
  std::uint64_t seed = 42;
  HarnessIntegrator base;    // bias hook lives here
  std::string pair = "all";  // ftc pair filter
};

using SuiteFn = std::function<std::vector<PropertyReport>(const SuiteContext&)>;

namespace suites {

inline Integrand cat(const std::string& id, const Params& p = Params::object()) { return catalog_get(id, p).first; }

inline HarnessIntegrator with_catalog_gauges(HarnessIntegrator base, const std::string& id) {
  base.gauges = [id](const Integrand&, const Interval& I) { return catalog().gauges(id, {}, I); };
  return base;
}

inline std::vector<PropertyReport> algebraic(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  out.push_back(check_algebraic(cat("poly", {{"coeffs", {0.0, 0.0, 1.0}}}), cat("poly", {{"coeffs", {1.0, -1.0}}}),
                                Interval(0.0, 1.0), 1e-6, 20, ctx.seed, ctx.base));
  out.back().property_id = "algebraic:x^2,1-x";
  out.push_back(check_algebraic(cat("sin"), cat("cos"), Interval(0.0, std::numbers::pi), 1e-6, 6, ctx.seed + 1,
                                ctx.base));
  out.back().property_id = "algebraic:sin,cos";
  return out;
}

inline std::vector<PropertyReport> ftc(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  auto want = [&](const std::string& name) { return ctx.pair == "all" || ctx.pair == name; };
  if (want("poly")) {
    out.push_back(check_ftc(cat("poly", {{"coeffs", {0.0, 0.0, 2.0, -1.0 / 3.0}}}), cat("poly"), Interval(0.0, 4.0),
                            1e-6, ctx.seed, ctx.base));
    out.back().property_id = "ftc:poly";
  }
  if (want("sin")) {
    out.push_back(check_ftc(scaled(-1.0, cat("cos")), cat("sin"), Interval(0.0, std::numbers::pi), 1e-6, ctx.seed,
                            ctx.base));
    out.back().property_id = "ftc:sin";
  }
  if (want("constant")) {
    out.push_back(check_ftc(cat("constant", {{"c", 3.0}}), cat("constant", {{"c", 0.0}}), Interval(0.0, 1.0), 1e-6,
                            ctx.seed, ctx.base));
    out.back().property_id = "ftc:constant";
  }
  if (want("pathological")) {
    FtcOptions opt;
    opt.part1_tol = 1e-2;
    out.push_back(check_ftc(cat("ftc-pathological"), cat("ftc-pathological-derivative"), Interval(0.0, 1.0), 1e-3,
                            ctx.seed, with_catalog_gauges(ctx.base, "ftc-pathological-derivative"), opt));
    out.back().property_id = "ftc:pathological";
    out.back().tolerances["sin1"] = std::sin(1.0);
  }
  if (out.empty()) throw Error(ErrorCode::Config, "unknown ftc pair '" + ctx.pair + "'");
  return out;
}

inline std::vector<PropertyReport> parts(const SuiteContext& ctx) {
  const Interval line(-1e6, 1e6);
  const Integrand x = cat("poly", {{"coeffs", {0.0, 1.0}}});
  const Integrand one = cat("constant", {{"c", 1.0}});
  const Integrand zero = cat("constant", {{"c", 0.0}});
  const Integrand square = cat("poly", {{"coeffs", {0.0, 0.0, 1.0}}});
  const Integrand twice = cat("poly", {{"coeffs", {0.0, 2.0}}});
  std::vector<PropertyReport> out;
  out.push_back(check_parts_and_substitution({x, one, cat("sin"), cat("cos"), square, twice, cat("cos")},
                                             Interval(0.0, std::numbers::pi), 1e-6, ctx.seed, ctx.base));
  out.back().property_id = "parts:x,sin|psi=x^2";
  out.push_back(check_parts_and_substitution({one, zero, cat("exp"), cat("exp"), x, one, cat("exp")},
                                             Interval(0.0, 1.0), 1e-6, ctx.seed + 1, ctx.base));
  out.back().property_id = "parts:1,exp|psi=x";
  return out;
}

inline std::vector<PropertyReport> henstock(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  const Interval unit(0.0, 1.0);
  for (const auto& [name, coeffs] : {std::pair<std::string, std::vector<double>>{"x", {0.0, 1.0}},
                                     std::pair<std::string, std::vector<double>>{"x^2", {0.0, 0.0, 1.0}}}) {
    for (int n = 5; n <= 10; ++n) {
      out.push_back(check_henstock_lemma(cat("poly", {{"coeffs", coeffs}}), GaugeSequence::halving(unit), unit, n, 50,
                                         ctx.seed + static_cast<std::uint64_t>(n)));
      out.back().property_id = "henstock-lemma:" + name + ":n=" + std::to_string(n);
    }
  }
  return out;
}

inline std::vector<PropertyReport> uniform(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  for (const std::string id : {"family-uniform-shift", "family-sin-decay"}) {
    const CatalogEntry& e = catalog().entry(id);
    const auto& meta = *e.family;
    out.push_back(check_uniform_convergence([id](int k) { return cat(id, {{"k", k}}); },
                                            cat(meta.limit_id, meta.limit_params), meta.uniform_rate,
                                            e.default_interval, 8, 1e-6, ctx.seed, ctx.base));
    out.back().property_id = "uniform:" + id;
  }
  return out;
}

inline std::vector<PropertyReport> monotone(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  for (const auto& [id, K] : {std::pair<std::string, int>{"family-power", 10}, {"family-capped-invsqrt", 8}}) {
    const CatalogEntry& e = catalog().entry(id);
    const auto& meta = *e.family;
    const double limit = oracle_value(meta.limit_id, meta.limit_params, e.default_interval).value;
    const Direction dir = meta.monotone == Monotone::NonDecreasing ? Direction::NonDecreasing : Direction::NonIncreasing;
    auto res = check_monotone_convergence([id = id](int k) { return cat(id, {{"k", k}}); }, limit, dir,
                                          meta.tail_bound, e.default_interval, K, 1e-6, ctx.seed, ctx.base);
    res.report.property_id = "monotone:" + id;
    out.push_back(std::move(res.report));
  }
  return out;
}

struct BracketRun {
  ConvergenceReport report;
  BracketCheck check;
};

inline BracketRun darboux_run(const Integrand& f, const Interval& I, double tau, std::uint64_t seed,
                              const HarnessIntegrator& base) {
  const auto gs = base.gauges_for(f, I);
  auto report = integrate_sequential(f, gs, I, {tau, 40, 3}, base.policy, seed, base.budget);
  report.estimate += base.bias;
  auto check = darboux_bracket_check(f, gs, I, report, tau, 5, seed, base.policy, base.budget);
  return {std::move(report), std::move(check)};
}

inline std::vector<PropertyReport> darboux(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  const std::vector<std::tuple<std::string, Params, Interval>> cases{
      {"poly", Params::object(), Interval(0.0, 4.0)},
      {"sin", Params::object(), Interval(0.0, std::numbers::pi)},
      {"family-power", {{"k", 3}}, Interval(0.0, 1.0)},
      {"family-capped-invsqrt", {{"k", 4}}, Interval(0.0, 1.0)},
      {"family-uniform-shift", {{"k", 2}}, Interval(0.0, 1.0)}};
  for (const auto& [id, params, I] : cases) {
    PropertyReport rep{"darboux-bracket:" + id, 1, {}, {{"tau", 1e-6}}};
    const auto run = darboux_run(cat(id, params), I, 1e-6, ctx.seed, ctx.base);
    const auto& last = run.check.brackets.back();
    rep.tolerances["final_width"] = last.upper - last.lower;
    if (!run.report.certified) rep.fail(ctx.seed, "not certified");
    if (!run.check.contains_estimate) rep.fail(ctx.seed, "estimate outside the final bracket");
    if (!run.check.contains_index_means) rep.fail(ctx.seed, "an index mean lies outside its bracket");
    if (!run.check.widths_shrink) rep.fail(ctx.seed, "bracket width grew by more than 10%");
    if (id == "poly" && last.upper - last.lower > 1e-3) rep.fail(ctx.seed, "final bracket wider than 1e-3");
    out.push_back(std::move(rep));
  }
  return out;
}

/// Gauge sequence on [a, b] forcing c to be a tag at every index.
inline GaugeSequence forced_sequence(const Interval& I, double c) {
  const double wl = c - I.a(), wr = I.b() - c;
  return GaugeSequence([=](int n) {
    return Gauge::forced_tag(c, Gauge::constant(std::ldexp(wl, -n)), Gauge::constant(std::ldexp(wr, -n)));
  });
}

inline std::vector<PropertyReport> additivity(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  const double tau = 1e-6;
  for (const auto& [id, I] : {std::pair<std::string, Interval>{"poly", Interval(0.0, 4.0)},
                              std::pair<std::string, Interval>{"sin", Interval(0.0, std::numbers::pi)}}) {
    PropertyReport rep{"additivity:" + id, 3, {}, {{"tau", tau}, {"slack", 3.0 * tau}}};
    const Integrand f = cat(id);
    const HarnessIntegrator integ = ctx.base.with_tau(tau);
    for (int k = 0; k < 3; ++k) {
      const std::uint64_t cs = case_seed(ctx.seed, k);
      std::mt19937_64 rng(cs);
      const double c = I.a() + I.width() * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
      const auto left = detail::certified_integral(integ, f, Interval(I.a(), c), cs, rep, cs);
      const auto right = detail::certified_integral(integ, f, Interval(c, I.b()), cs + 1, rep, cs);
      HarnessIntegrator forced = integ;
      forced.gauges = [c](const Integrand&, const Interval& J) { return forced_sequence(J, c); };
      const auto whole = detail::certified_integral(forced, f, I, cs + 2, rep, cs);
      if (left && right && whole && std::abs(*left + *right - *whole) > 3.0 * tau) {
        rep.fail(cs, "|int_a^c + int_c^b - int_a^b| = " + detail::fmt(std::abs(*left + *right - *whole)));
      }
    }
    out.push_back(std::move(rep));
  }
  return out;
}

/// Catalog entries with a closed-form reference, at default parameters.
inline std::vector<std::string> closed_form_ids() {
  std::vector<std::string> out;
  for (const auto& id : catalog().ids()) {
    if (catalog().entry(id).reference_rule.kind == Provenance::ClosedForm) out.push_back(id);
  }
  return out;
}

inline std::vector<PropertyReport> uniqueness(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  for (const auto& id : closed_form_ids()) {
    const CatalogEntry& e = catalog().entry(id);
    const double tau = e.recommended_tau;
    const Interval I = e.default_interval;
    PropertyReport rep{"uniqueness:" + id, 1, {}, {{"tau", tau}, {"slack", 2.0 * tau}}};
    HarnessIntegrator a = ctx.base.with_tau(tau), b = ctx.base.with_tau(tau);
    a.gauges = [id](const Integrand&, const Interval& J) { return catalog().gauges(id, {}, J, 1.0); };
    b.gauges = [id](const Integrand&, const Interval& J) { return catalog().gauges(id, {}, J, 0.6); };
    const Integrand f = cat(id);
    const std::uint64_t sa = ctx.seed, sb = detail::splitmix64(ctx.seed ^ 0xabcdefULL);
    const auto va = detail::certified_integral(a, f, I, sa, rep, sa);
    const auto vb = detail::certified_integral(b, f, I, sb, rep, sa);
    if (va && vb) {
      rep.tolerances["difference"] = std::abs(*va - *vb);
      if (std::abs(*va - *vb) > 2.0 * tau) rep.fail(sa, "runs disagree: " + detail::fmt(*va) + " vs " + detail::fmt(*vb));
    }
    out.push_back(std::move(rep));
  }
  return out;
}

inline Integrand random_poly(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::vector<double> c(1 + rng() % 4);
  for (double& x : c) x = coef(rng);
  return cat("poly", {{"coeffs", c}});
}

inline TaggedPartition random_partition(std::mt19937_64& rng, const Interval& I, std::size_t cells) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> pts{I.a(), I.b()};
  while (pts.size() < cells + 1) pts.push_back(I.a() + I.width() * u(rng));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  TaggedPartition p{I, {}};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double t = pts[i] + (pts[i + 1] - pts[i]) * u(rng);
    p.cells.push_back({pts[i], pts[i + 1], Tag(std::clamp(t, pts[i], pts[i + 1]))});
  }
  return p;
}

inline bool close_rel(double x, double y, double rel) {
  return std::abs(x - y) <= rel * std::max({std::abs(x), std::abs(y), 1.0});
}

inline std::vector<PropertyReport> structural(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  {
    PropertyReport rep{"structural:right-left", 100, {}, {{"relative", 1e-12}}};
    for (int k = 0; k < 100; ++k) {
      const std::uint64_t cs = case_seed(ctx.seed, k);
      std::mt19937_64 rng(cs);
      const Interval I(-2.0, 3.0);
      const Integrand f = random_poly(rng);
      const TaggedPartition p = random_partition(rng, I, 2 + rng() % 30);
      const std::size_t i = rng() % p.cells.size();
      const Cell& c = p.cells[i];
      if (!(c.left < c.tag.value() && c.tag.value() < c.right)) continue;
      const TaggedPartition split = right_left_split(p, i);
      const TaggedPartition merged = right_left_merge(split, i);
      if (!validate_partition(split).ok()) rep.fail(cs, "split result invalid");
      if (!(merged == p)) rep.fail(cs, "merge does not invert split");
      if (!close_rel(riemann_sum(f, p), riemann_sum(f, split), 1e-12)) rep.fail(cs, "split changed the sum");
      if (!close_rel(riemann_sum(f, p), riemann_sum(f, merged), 1e-12)) rep.fail(cs, "merge changed the sum");
    }
    out.push_back(std::move(rep));
  }
  {
    PropertyReport rep{"structural:min-gauge", 200, {}, {}};
    for (int k = 0; k < 200; ++k) {
      const std::uint64_t cs = case_seed(ctx.seed + 1, k);
      std::mt19937_64 rng(cs);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const Interval I(0.0, 1.0);
      const double c1 = 0.01 + u(rng), s = 0.05 + u(rng);
      const Gauge g1 = Gauge::constant(c1);
      const Gauge g2 = Gauge::pointwise("affine", [s](double x) { return s * (0.1 + x); });
      const Gauge both = Gauge::pointwise_min(g1, g2);
      // partitions fine for the min, plus random ones that may or may not be
      const TaggedPartition p = (k % 2 == 0) ? cousin_partition(both, I, TagPolicy::random_uniform(cs))
                                             : random_partition(rng, I, 1 + rng() % 40);
      if (is_delta_fine(p, both, Fineness::Width) &&
          !(is_delta_fine(p, g1, Fineness::Width) && is_delta_fine(p, g2, Fineness::Width))) {
        rep.fail(cs, "min-gauge fineness does not imply fineness for both gauges");
      }
      const Gauge doubled = Gauge::pointwise("2g", [both](double x) { return 2.0 * both(x); });
      if (is_delta_fine(p, both, Fineness::Containment) && !is_delta_fine(p, doubled, Fineness::Width)) {
        rep.fail(cs, "containment fineness without width fineness for 2g");
      }
    }
    out.push_back(std::move(rep));
  }
  {
    PropertyReport rep{"structural:forced-tag", 100, {}, {}};
    for (int k = 0; k < 100; ++k) {
      const std::uint64_t cs = case_seed(ctx.seed + 2, k);
      std::mt19937_64 rng(cs);
      const Interval I(0.0, 1.0);
      const double c = std::uniform_real_distribution<double>(0.001, 0.999)(rng);
      const std::vector<TagPolicy> policies{TagPolicy::midpoint(), TagPolicy::random_uniform(cs),
                                            TagPolicy::hint_first(TagPolicy::random_uniform(cs)),
                                            TagPolicy::left_endpoint()};
      const TaggedPartition p =
          cousin_partition(forced_sequence(I, c)(1 + static_cast<int>(rng() % 8)), I, policies[k % policies.size()]);
      const bool tagged = std::any_of(p.cells.begin(), p.cells.end(), [c](const Cell& x) { return x.tag.value() == c; });
      const bool point = std::any_of(p.cells.begin(), p.cells.end(), [c](const Cell& x) { return x.right == c; });
      if (!tagged) rep.fail(cs, "c = " + detail::fmt(c) + " is not a tag");
      if (!point) rep.fail(cs, "c = " + detail::fmt(c) + " is not a partition point");
      if (!validate_partition(p).ok()) rep.fail(cs, "invalid partition");
    }
    out.push_back(std::move(rep));
  }
  return out;
}

/// Riemann sums of the Dirichlet function over Dirichlet-fine partitions are
/// bounded by eps. Half the partitions use min(Dirichlet, Constant(h)) so that
/// rational hint tags actually get selected.
inline std::vector<PropertyReport> dirichlet(const SuiteContext& ctx) {
  std::vector<PropertyReport> out;
  const Interval unit(0.0, 1.0);
  const Integrand f = cat("dirichlet");
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    PropertyReport rep{"dirichlet:eps=" + detail::fmt(eps), 100, {}, {{"eps", eps}}};
    const Gauge dg = Gauge::dirichlet(eps, 30);
    double worst = 0.0;
    int rational_cells = 0;
    for (int k = 0; k < 100; ++k) {
      const std::uint64_t cs = case_seed(ctx.seed, k);
      std::mt19937_64 rng(cs);
      const double h = std::pow(10.0, std::uniform_real_distribution<double>(-4.0, 0.0)(rng));
      const Gauge g = k % 2 == 0 ? dg : Gauge::pointwise_min(dg, Gauge::constant(h));
      const TaggedPartition p = cousin_partition(g, unit, TagPolicy::hint_first(TagPolicy::random_uniform(cs)));
      if (!is_delta_fine(p, dg, Fineness::Containment)) rep.fail(cs, "partition is not Dirichlet-fine");
      const double s = riemann_sum(f, p);
      worst = std::max(worst, std::abs(s));
      rational_cells += static_cast<int>(
          std::count_if(p.cells.begin(), p.cells.end(), [](const Cell& c) { return c.tag.is_rational(); }));
      if (!(std::abs(s) <= eps)) rep.fail(cs, "|S| = " + detail::fmt(s) + " exceeds eps");
    }
    rep.tolerances["worst_sum"] = worst;
    rep.tolerances["rational_tagged_cells"] = rational_cells;
    out.push_back(std::move(rep));
  }
  {
    PropertyReport rep{"dirichlet:driver", 1, {}, {{"tolerance", 1e-3}}};
    const auto r = integrate_sequential(f, catalog().gauges("dirichlet", {}, unit), unit, {1e-3, 30, 3},
                                        TagPolicy::hint_first(TagPolicy::random_uniform(0)), ctx.seed);
    const double est = r.estimate + ctx.base.bias;
    rep.tolerances["estimate"] = est;
    if (!r.certified || std::abs(est) > 1e-3) rep.fail(ctx.seed, "driver estimate " + detail::fmt(est));
    for (std::size_t n = 0; n < r.sums.size(); ++n)
      for (double s : r.sums[n])
        if (std::abs(s) > std::ldexp(1.0, -static_cast<int>(n + 1))) rep.fail(ctx.seed, "sum above eps_n");
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace suites

inline const std::map<std::string, SuiteFn>& suite_registry() {
  static const std::map<std::string, SuiteFn> registry{
      {"algebraic", suites::algebraic},   {"ftc", suites::ftc},
      {"parts", suites::parts},           {"henstock-lemma", suites::henstock},
      {"uniform", suites::uniform},       {"monotone", suites::monotone},
      {"darboux-bracket", suites::darboux}, {"additivity", suites::additivity},
      {"uniqueness", suites::uniqueness}, {"structural", suites::structural},
      {"dirichlet", suites::dirichlet}};
  return registry;
}

/// Runs one named suite, or every suite for "all".
inline std::vector<PropertyReport> run_suite(const std::string& name, const SuiteContext& ctx) {
  const auto& reg = suite_registry();
  if (name == "all") {
    std::vector<PropertyReport> out;
    for (const auto& [n, fn] : reg) {
      auto part = fn(ctx);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  auto it = reg.find(name);
  if (it == reg.end()) throw Error(ErrorCode::Config, "unknown suite '" + name + "'");
  return it->second(ctx);
}

}  // namespace gaugelab
