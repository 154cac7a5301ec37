#include <gtest/gtest.h>

#include "gaugelab/catalog.hpp"
#include "gaugelab/integrand.hpp"

using namespace gaugelab;

namespace {

const Interval unit(0.0, 1.0);

Integrand identity() {
  return Integrand::from_real("x", [](double x) { return x; }, Interval(-10.0, 10.0))
      .with_antiderivative([](double x) { return 0.5 * x * x; });
}

TaggedPartition uniform_midpoints(const Interval& I, int cells) {
  TaggedPartition p{I, {}};
  const double h = I.width() / cells;
  for (int i = 0; i < cells; ++i) {
    const double l = I.a() + i * h, r = (i + 1 == cells) ? I.b() : I.a() + (i + 1) * h;
    p.cells.push_back({l, r, Tag(0.5 * (l + r))});
  }
  return p;
}

}  // namespace

TEST(RiemannSum, ConstantFunction) {
  const Integrand two = Integrand::from_real("2", [](double) { return 2.0; }, Interval(0.0, 3.0));
  TaggedPartition p{Interval(0.0, 3.0), {{0.0, 0.7, Tag(0.0)}, {0.7, 2.0, Tag(1.9)}, {2.0, 3.0, Tag(3.0)}}};
  EXPECT_DOUBLE_EQ(riemann_sum(two, p), 6.0);
}

TEST(RiemannSum, MidpointTagsIntegrateIdentityExactly) {
  EXPECT_NEAR(riemann_sum(identity(), uniform_midpoints(unit, 37)), 0.5, 1e-15);
  TaggedPartition p{unit, {{0.0, 0.13, Tag(0.065)}, {0.13, 0.9, Tag(0.515)}, {0.9, 1.0, Tag(0.95)}}};
  EXPECT_NEAR(riemann_sum(identity(), p), 0.5, 1e-15);
}

TEST(RiemannSum, DirichletWithIrrationalTagsIsZero) {
  const Integrand d = catalog_get("dirichlet").first;
  TaggedPartition p{unit, {{0.0, 0.5, Tag(1.0 / std::numbers::sqrt2)}, {0.5, 1.0, Tag(std::numbers::pi / 4.0)}}};
  p.cells[0].tag = Tag(0.25);  // a double without exact identity counts as irrational
  EXPECT_EQ(riemann_sum(d, p), 0.0);
  p.cells[0].tag = Tag::exact(1, 4);
  EXPECT_EQ(riemann_sum(d, p), 0.5);
}

TEST(RiemannSum, LeftToRightOrderIsDeterministic) {
  const Integrand f = Integrand::from_real("mixed", [](double x) { return x < 0.5 ? 1e16 : 1.0; }, unit);
  TaggedPartition p{unit, {{0.0, 0.5, Tag(0.1)}, {0.5, 0.75, Tag(0.6)}, {0.75, 1.0, Tag(0.9)}}};
  const double expected = (5e15 + 0.25) + 0.25;
  EXPECT_EQ(riemann_sum(f, p), expected);
}

TEST(RiemannSum, ChecksDomain) {
  const Integrand f = Integrand::from_real("x", [](double x) { return x; }, Interval(0.0, 0.5));
  try {
    riemann_sum(f, uniform_midpoints(unit, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EvalDomain);
  }
}

TEST(Integrand, EvaluationOutsideDomainThrows) {
  const Integrand f = Integrand::from_real("x", [](double x) { return x; }, unit);
  try {
    f(1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EvalDomain);
  }
  EXPECT_THROW(f.exact_integral(0.0, 1.0), Error);
}

TEST(Integrand, Combinators) {
  const Integrand x = identity();
  const Integrand c = Integrand::from_real("3", [](double) { return 3.0; }, Interval(-1.0, 1.0));
  EXPECT_DOUBLE_EQ(linear_combination(2.0, x, -1.0, c)(0.5), -2.0);
  EXPECT_EQ(linear_combination(2.0, x, -1.0, c).domain(), Interval(-1.0, 1.0));
  EXPECT_DOUBLE_EQ(scaled(-2.0, x)(0.25), -0.5);
  EXPECT_DOUBLE_EQ(shifted(x, 1.0)(0.25), 1.25);
  EXPECT_DOUBLE_EQ(product(x, c)(0.5), 1.5);
  EXPECT_DOUBLE_EQ(absolute(x)(-0.5), 0.5);
  EXPECT_DOUBLE_EQ(pointwise_min(x, c)(0.5), 0.5);
  EXPECT_DOUBLE_EQ(pointwise_max(x, c)(0.5), 3.0);
  const Integrand sq = Integrand::from_real("x^2", [](double t) { return t * t; }, Interval(-5.0, 5.0));
  EXPECT_DOUBLE_EQ(compose(sq, shifted(x, 1.0))(1.0), 4.0);
  EXPECT_DOUBLE_EQ(scaled(2.0, x).exact_integral(0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(linear_combination(2.0, x, 1.0, x).exact_integral(0.0, 2.0), 6.0);
}

TEST(Integrand, CombinatorsKeepExactTagIdentity) {
  const Integrand d = catalog_get("dirichlet").first;
  EXPECT_EQ(scaled(3.0, d)(Tag::exact(1, 3)), 3.0);
  EXPECT_EQ(scaled(3.0, d)(Tag(1.0 / 3.0)), 0.0);
}
