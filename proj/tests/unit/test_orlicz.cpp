#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "philab/errors.hpp"
#include "philab/experiments.hpp"
#include "philab/orlicz.hpp"
#include "philab/rng.hpp"

using namespace philab;

namespace {

ScalarField constant_field(const GridDomain& d, double c) {
  return ScalarField::sample(d, [c](const Point&) { return c; }, FieldRole::Test);
}

PhiFamily jump_family(double inside, double outside) {
  const Subdomain rect = Subdomain::rect({0.25, 0.25}, {0.75, 0.75});
  return PhiFamily::piecewise(PhiFamily::constant_power(inside), PhiFamily::constant_power(outside),
                              [rect](const Point& x) { return rect.contains(x); }, rect.describe());
}

}  // namespace

TEST(Modular, ZeroField) {
  const GridDomain d(2, 9);
  EXPECT_EQ(modular(PhiFamily::constant_power(3.0), d, constant_field(d, 0.0)), 0.0);
}

TEST(Modular, UnitFieldGivesMeasure) {
  const GridDomain d(2, 33);
  EXPECT_NEAR(modular(PhiFamily::constant_power(2.0), d, constant_field(d, 1.0)), 1.0, 1e-12);
}

TEST(Modular, QuarticOfIdentityConvergesAtSecondOrder) {
  const GridDomain d(1, 129);
  const ScalarField u = ScalarField::sample(d, [](const Point& x) { return x[0]; }, FieldRole::Test);
  const double h = d.h();
  // Midpoint rule on x^4: error <= h^2 max|f''| / 24 = h^2 / 2.
  EXPECT_NEAR(modular(PhiFamily::constant_power(4.0), d, u), 0.2, 0.5 * h * h);
}

TEST(Luxemburg, ZeroField) {
  const GridDomain d(2, 9);
  EXPECT_EQ(luxemburg_norm(PhiFamily::constant_power(3.0), d, constant_field(d, 0.0)), 0.0);
}

TEST(Luxemburg, ConstantFieldClosedForm) {
  const GridDomain d(2, 17, 0.0, 3.0);
  for (double p : {2.0, 3.5, 16.0}) {
    for (double c : {0.2, 1.0, 7.0}) {
      const double expected = c * std::pow(d.measure(), 1.0 / p);
      EXPECT_NEAR(luxemburg_norm(PhiFamily::constant_power(p), d, constant_field(d, c)) / expected, 1.0,
                  1e-8)
          << "p=" << p << " c=" << c;
    }
  }
}

TEST(Embedding, ConstantFieldRatio) {
  const GridDomain d(2, 17);
  const auto rep = embedding_check(PhiFamily::constant_power(2.0), PhiFamily::constant_power(4.0), d,
                                   {constant_field(d, 1.0), constant_field(d, 0.0)});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_NEAR(rep.rows[0].ratio, 1.0, 1e-8);
  EXPECT_EQ(rep.rows[1].ratio, 0.0);
  EXPECT_TRUE(rep.pass);
  EXPECT_GE(rep.bound, 1.0);
}

TEST(Embedding, RandomBumpsStayBelowConstant) {
  const GridDomain d(2, 17);
  std::vector<ScalarField> fields;
  Stream rng(5, 0);
  for (int t = 0; t < 100; ++t) {
    const Point c{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)};
    const double w = rng.uniform(0.05, 0.3), a = rng.uniform(0.1, 5.0);
    fields.push_back(ScalarField::sample(
        d, [=](const Point& x) { return a * std::exp(-(std::pow(x[0] - c[0], 2) + std::pow(x[1] - c[1], 2)) / (w * w)); },
        FieldRole::Test));
  }
  const auto rep = embedding_check(PhiFamily::constant_power(2.0), PhiFamily::constant_power(4.0), d, fields);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.worst_ratio, rep.bound);
}

TEST(JumpCondition, ConstantExponentPasses) {
  const GridDomain d(2, 17);
  EXPECT_TRUE(jump_condition(PhiFamily::constant_power(4.0), d, 0.1).pass);
}

TEST(JumpCondition, ModestJumpPasses) {
  // p- = 2.5 >= d on mixed balls.
  const GridDomain d(2, 33);
  const auto rep = jump_condition(jump_family(3.0, 2.5), d, 0.1);
  EXPECT_TRUE(rep.pass);
  EXPECT_DOUBLE_EQ(sobolev_conjugate(1.5, 2), 6.0);
}

TEST(JumpCondition, LargeJumpBelowDimensionFails) {
  // (1.5)* = 6 < 8 on balls that straddle the jump.
  const GridDomain d(2, 33);
  const auto rep = jump_condition(jump_family(8.0, 1.5), d, 0.1);
  EXPECT_FALSE(rep.pass);
}

TEST(Poincare, QuadraticOnIntervalBelowInversePi) {
  const GridDomain d(1, 257);
  const auto rep = poincare_ratio(PhiFamily::constant_power(2.0), d, 200, 3);
  EXPECT_EQ(rep.skipped, 0);
  EXPECT_GT(rep.sup_ratio, 0.0);
  // The first sine mode attains 1/pi up to the grid; forward differences shrink
  // the gradient norm by at most O(h^2).
  EXPECT_LE(rep.sup_ratio, (1.0 / std::numbers::pi) * (1.0 + 1e-3));
  EXPECT_GE(rep.sup_ratio, 0.9 / std::numbers::pi);
}

TEST(Poincare, JumpFamilyStableUnderRefinement) {
  const PhiFamily f = jump_family(3.0, 2.5);
  std::vector<double> sups;
  for (int n : {17, 33, 65}) sups.push_back(poincare_ratio(f, GridDomain(2, n), 200, 9).sup_ratio);
  for (double s : sups) EXPECT_TRUE(std::isfinite(s) && s > 0.0);
  const double hi = *std::max_element(sups.begin(), sups.end());
  const double lo = *std::min_element(sups.begin(), sups.end());
  EXPECT_LT((hi - lo) / hi, 0.2);
}

// Properties.

TEST(OrliczProperty, NormIsHomogeneous) {
  const GridDomain d(2, 17);
  Stream rng(21, 0);
  for (const PhiFamily& f : audit_families(false)) {
    for (int i = 0; i < 10; ++i) {
      const ScalarField u = random_sine_field(d, 21, static_cast<std::uint64_t>(i));
      const double t = rng.uniform(-5.0, 5.0);
      ScalarField tu = u;
      for (double& v : tu.values) v *= t;
      const double a = luxemburg_norm(f, d, tu), b = std::fabs(t) * luxemburg_norm(f, d, u);
      EXPECT_NEAR(a / b, 1.0, 1e-9) << f.name();
    }
  }
}

TEST(OrliczProperty, ModularOfNormalizedFieldNearOne) {
  const GridDomain d(2, 17);
  for (const PhiFamily& f : audit_families(false)) {
    for (int i = 0; i < 10; ++i) {
      ScalarField u = random_sine_field(d, 22, static_cast<std::uint64_t>(i));
      const double n = luxemburg_norm(f, d, u);
      ASSERT_GT(n, 0.0);
      for (double& v : u.values) v /= n;
      const double m = modular(f, d, u);
      EXPECT_GE(m, 1.0 - 1e-6) << f.name();
      EXPECT_LE(m, 1.0 + 1e-12) << f.name();
    }
  }
}

TEST(OrliczProperty, ModularSandwichOnRandomFields) {
  // The full 1000-field sweep runs in the acceptance suite; this is a smaller seed.
  const AuditPart part = audit_luxemburg(99, 100);
  EXPECT_TRUE(part.verdict.pass) << part.verdict.detail;
}

TEST(OrliczProperty, PoincareNonIncreasingOnNestedSquares) {
  for (double p : {2.0, 3.0}) {
    const PhiFamily f = PhiFamily::constant_power(p);
    double previous = std::numeric_limits<double>::infinity();
    for (double side : {1.0, 0.5, 0.25}) {
      const double s = poincare_ratio(f, GridDomain(2, 33, 0.0, side), 100, 4).sup_ratio;
      EXPECT_LE(s, previous * (1.0 + 1e-12)) << "p=" << p << " side=" << side;
      previous = s;
    }
  }
}
