#include <gtest/gtest.h>

#include <random>

#include "gaugelab/catalog.hpp"
#include "gaugelab/harness.hpp"

using namespace gaugelab;

namespace {

const Interval unit(0.0, 1.0);

// (pi/2 - Si(1)) / 3, from the alternating series of Si evaluated with 40
// significant digits; the substitution u = x^-3 turns the integral of
// sin(x^-3)/x over (0, 1] into (1/3) int_1^inf sin(u)/u du.
constexpr double kDenjoyExact = 0.2082377521425712014;

}  // namespace

TEST(Catalog, ListsEveryEntry) {
  const std::vector<std::string> expected{"constant", "cos", "dirichlet", "exp", "family-capped-invsqrt",
                                          "family-power", "family-power-limit", "family-sin-decay",
                                          "family-uniform-shift", "ftc-pathological",
                                          "ftc-pathological-derivative", "invsqrt", "oscillatory-denjoy", "poly",
                                          "sin", "step"};
  EXPECT_EQ(catalog().ids(), expected);
}

TEST(Catalog, ParabolaReference) {
  const auto [f, e] = catalog_get("poly", {{"coeffs", {0.0, 4.0, -1.0}}});
  ASSERT_TRUE(f.reference().has_value());
  EXPECT_EQ(f.reference()->provenance, Provenance::ClosedForm);
  EXPECT_DOUBLE_EQ(f.reference()->value, 32.0 / 3.0);
  EXPECT_EQ(e.default_interval, Interval(0.0, 4.0));
  EXPECT_DOUBLE_EQ(f(1.0), 3.0);
}

TEST(Catalog, DirichletReferenceAndValues) {
  const auto [f, e] = catalog_get("dirichlet");
  ASSERT_TRUE(f.reference().has_value());
  EXPECT_EQ(f.reference()->value, 0.0);
  EXPECT_EQ(e.reference_rule.kind, Provenance::ClosedForm);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t den = 1 + static_cast<std::int64_t>(rng() % 1000);
    const std::int64_t num = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(den + 1));
    EXPECT_EQ(f(Tag::exact(num, den)), 1.0);
    EXPECT_EQ(f(Tag(u(rng))), 0.0);
  }
}

TEST(Catalog, DenjoyUsesOracleRule) {
  const auto [f, e] = catalog_get("oscillatory-denjoy");
  EXPECT_EQ(e.reference_rule.kind, Provenance::Oracle);
  EXPECT_FALSE(f.reference().has_value());
  EXPECT_EQ(f(0.0), 0.0);
  EXPECT_NEAR(f(0.5), 2.0 * std::sin(8.0), 1e-15);
}

TEST(Catalog, OracleValues) {
  const auto poly = oracle_value("poly", {{"coeffs", {0.0, 4.0, -1.0}}}, Interval(0.0, 4.0));
  EXPECT_DOUBLE_EQ(poly.value, 32.0 / 3.0);
  EXPECT_EQ(poly.uncertainty, 0.0);
  const auto step = oracle_value("step", {}, unit);
  EXPECT_DOUBLE_EQ(step.value, 0.5);
  EXPECT_EQ(step.uncertainty, 0.0);
  const auto capped = oracle_value("family-capped-invsqrt", {{"k", 4}}, unit);
  EXPECT_DOUBLE_EQ(capped.value, 1.75);
  EXPECT_THROW(oracle_value("ftc-pathological", {}, unit), Error);
}

TEST(Catalog, DenjoyOracleAgainstSineIntegral) {
  const auto v = oracle_value("oscillatory-denjoy", {}, unit);
  EXPECT_GT(v.uncertainty, 0.0);
  EXPECT_LE(v.uncertainty, 1e-4);
  EXPECT_LE(std::abs(v.value - kDenjoyExact), v.uncertainty);
  // int_{1/2}^1 = (Si(8) - Si(1)) / 3
  const double si8 = 1.5741868217069421, si1 = 0.9460830703671830;
  const auto w = oracle_value("oscillatory-denjoy", {}, Interval(0.5, 1.0));
  EXPECT_NEAR(w.value, (si8 - si1) / 3.0, std::max(w.uncertainty, 1e-7));
}

TEST(Catalog, StepFunction) {
  const auto f = catalog_get("step", {{"breaks", {0.25, 0.5}}, {"values", {2.0, -1.0, 3.0}}}).first;
  EXPECT_EQ(f(0.0), 2.0);
  EXPECT_EQ(f(0.25), -1.0);  // right-continuous
  EXPECT_EQ(f(0.75), 3.0);
  EXPECT_DOUBLE_EQ(f.exact_integral(0.0, 1.0), 0.5 - 0.25 + 1.5);
  EXPECT_DOUBLE_EQ(f.exact_integral(0.1, 0.3), 0.3 - 0.05);
  EXPECT_THROW(catalog_get("step", {{"breaks", {0.5}}, {"values", {1.0}}}), Error);
}

TEST(Catalog, FamilyClosedForms) {
  for (int k = 1; k <= 10; ++k) {
    const auto f = catalog_get("family-power", {{"k", k}}).first;
    EXPECT_DOUBLE_EQ(f.exact_integral(0.0, 1.0), 1.0 / (k + 1));
    const auto g = catalog_get("family-capped-invsqrt", {{"k", k}}).first;
    EXPECT_NEAR(g.exact_integral(0.0, 1.0), 2.0 - 1.0 / k, 1e-15);
    EXPECT_EQ(g(0.0), k);
    const auto s = catalog_get("family-sin-decay", {{"k", k}}).first;
    EXPECT_NEAR(s.exact_integral(0.0, std::numbers::pi), 2.0 / k, 1e-15);
    const auto u = catalog_get("family-uniform-shift", {{"k", k}}).first;
    EXPECT_NEAR(u.exact_integral(0.0, 1.0), 0.5 + 1.0 / k, 1e-15);
  }
  const auto& meta = *catalog().entry("family-power").family;
  EXPECT_EQ(meta.monotone, Monotone::NonIncreasing);
  EXPECT_EQ(meta.limit_id, "family-power-limit");
  EXPECT_EQ(catalog().entry("family-capped-invsqrt").family->monotone, Monotone::NonDecreasing);
}

TEST(Catalog, PathologicalPair) {
  const auto F = catalog_get("ftc-pathological").first;
  const auto f = catalog_get("ftc-pathological-derivative").first;
  for (int i = 1; i <= 1000; ++i) {
    const double x = i / 1000.0;
    EXPECT_LE(std::abs(F(x)), x * x);
    EXPECT_LE(std::abs(F(-x)), x * x);
  }
  EXPECT_EQ(F(0.0), 0.0);
  EXPECT_EQ(f(0.0), 0.0);
  // centered differences of F match f away from 0; the error is F'''(x) h^2 / 6
  const double h = 1e-4;
  for (double x = 0.3; x <= 1.0; x += 0.05) {
    const double u = 1.0 / (x * x);
    const double third = 8.0 * u * u * u * u / x;  // dominant size of F''' near x
    EXPECT_NEAR((F(x + h) - F(x - h)) / (2.0 * h), f(x), third * h * h + 1e-8) << "x = " << x;
  }
  EXPECT_NEAR(f.exact_integral(0.0, 1.0), std::sin(1.0), 1e-15);
}

TEST(Catalog, ParamsAreValidated) {
  auto code = [](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Config;
  };
  EXPECT_EQ(code([] { catalog_get("nope"); }), ErrorCode::UnknownId);
  EXPECT_EQ(code([] { catalog_get("family-power", {{"k", 0}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code([] { catalog_get("family-power", {{"k", 1.5}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code([] { catalog_get("poly", {{"coeffs", "x"}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code([] { catalog_get("poly", {{"degree", 3}}); }), ErrorCode::BadParams);
  EXPECT_EQ(code([] { catalog_get("sin", nlohmann::json::array()); }), ErrorCode::BadParams);
}

TEST(Catalog, ManifestSchema) {
  const auto m = catalog().manifest();
  ASSERT_EQ(m.size(), catalog().ids().size());
  for (const auto& e : m) {
    for (const char* key : {"id", "description", "params", "referenceRule", "defaultInterval", "partners", "family",
                            "lipschitz", "recommendedTau"}) {
      EXPECT_TRUE(e.contains(key)) << key;
    }
    EXPECT_TRUE(e["referenceRule"]["kind"] == "closed-form" || e["referenceRule"]["kind"] == "oracle" ||
                e["referenceRule"]["kind"] == "none");
    EXPECT_EQ(e["defaultInterval"].size(), 2u);
  }
  const auto d = catalog().manifest_entry(catalog().entry("dirichlet"));
  EXPECT_EQ(d["referenceRule"]["kind"], "closed-form");
}

TEST(Catalog, ClosedFormEntriesMatchTheDriver) {
  HarnessIntegrator integ;
  for (const auto& id : catalog().ids()) {
    const auto& e = catalog().entry(id);
    if (e.reference_rule.kind != Provenance::ClosedForm) continue;
    const double tau = e.recommended_tau;
    integ.gauges = [id](const Integrand&, const Interval& I) { return catalog().gauges(id, {}, I); };
    const auto r = integ.with_tau(tau).run(catalog_get(id).first, e.default_interval, 2024);
    ASSERT_TRUE(r.certified) << id;
    const double exact = oracle_value(id, {}, e.default_interval).value;
    EXPECT_NEAR(r.estimate, exact, tau) << id;
  }
}
