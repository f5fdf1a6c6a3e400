#include <gtest/gtest.h>

#include <cmath>

#include "philab/errors.hpp"
#include "philab/inequality.hpp"
#include "philab/rng.hpp"

using namespace philab;

namespace {

MonotoneTestCase make(double p, VecN xi, VecN eta, int dim = 2) {
  return MonotoneTestCase::make(PhiFamily::constant_power(p), dim, xi, eta);
}

VecN random_vec(Stream& rng, int dim, double scale) {
  VecN v{};
  for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-scale, scale);
  return v;
}

}  // namespace

TEST(MonotoneLhs, Examples) {
  EXPECT_EQ(monotone_lhs(make(4, {0.3, -0.2, 0}, {0.3, -0.2, 0})), 0.0);
  // psi = 2 for s^2, so the pairing is 2 |xi - eta|^2.
  EXPECT_NEAR(monotone_lhs(make(2, {1, 2, 0}, {-1, 0.5, 0})), 2.0 * (4.0 + 2.25), 1e-13);
  // psi(s) = 4 s^2: 4 * 1 with eta = 0, and 2 * 4 * 2 for opposite unit vectors.
  EXPECT_NEAR(monotone_lhs(make(4, {1, 0, 0}, {0, 0, 0})), 4.0, 1e-14);
  EXPECT_NEAR(monotone_lhs(make(4, {1, 0, 0}, {-1, 0, 0})), 16.0, 1e-14);
}

TEST(MonotoneLhs, RejectsBadDimension) {
  EXPECT_THROW(make(2, {}, {}, 4), DomainError);
  EXPECT_THROW(make(2, {}, {}, 0), DomainError);
}

TEST(Kappa, RatioExamples) {
  EXPECT_NEAR(kappa_ratio(1.0, 1.0, -1.0), 1.0 / 12.0, 1e-16);
  EXPECT_NEAR(kappa_ratio(1.0, 0.0, 0.0), 1.0 / 3.0, 1e-16);
  EXPECT_TRUE(std::isinf(kappa_ratio(1.0, 1.0, 1.0)));
}

TEST(Kappa, DerivedValueSitsJustBelowTwelfth) {
  const double k = derive_kappa();
  EXPECT_LE(k, 1.0 / 12.0);
  EXPECT_GE(k, 1.0 / 12.0 - 2e-9);
}

TEST(Kappa, RandomPairsNeverBeatTheInfimum) {
  // Oracle: direct evaluation on vectors, independent of the (a, b, t) parametrization.
  Stream rng(5, 0);
  double worst = 1e300;
  for (int s = 0; s < 1000000; ++s) {
    const VecN x = random_vec(rng, 3, 1.0), y = random_vec(rng, 3, rng.coin() ? 1.0 : 1e-3);
    double a = 0, b = 0, t = 0, d = 0;
    for (int i = 0; i < 3; ++i) {
      a += x[i] * x[i];
      b += y[i] * y[i];
      t += x[i] * y[i];
      d += (x[i] - y[i]) * (x[i] - y[i]);
    }
    if (d == 0.0) continue;
    worst = std::min(worst, (a + b + t) / (3.0 * d));
  }
  EXPECT_GE(worst, 1.0 / 12.0 - 1e-12);
  EXPECT_LT(worst, 1.0 / 12.0 + 1e-3);
}

TEST(Inequality, VarFormConstantExample) {
  // min(3^-2, (1/12)^2 / 4) * 1 * 2 for p = 2, gamma = 1.
  EXPECT_NEAR(var_form_constant(1.0, 2.0, 2.0, 1.0, 1.0 / 12.0), 1.0 / 288.0, 1e-16);
}

TEST(Inequality, SecondFormNeedsPMinusTwo) {
  const auto c = make(1.5, {1, 0, 0}, {0, 1, 0});
  EXPECT_FALSE(check_inequality(c, InequalityForm::Inq2).applicable);
  EXPECT_EQ(check_inequality_main(c).size(), 3u);
}

TEST(Inequality, SmallFuzzHasNoViolations) {
  FuzzPlan plan;
  plan.samples = 3000;
  plan.exponents = {1.5, 2.0, 4.0, 8.0};
  for (const FuzzRow& r : run_fuzz(plan)) {
    EXPECT_EQ(r.violations, 0) << r.family << " dim " << r.dim;
    EXPECT_EQ(r.samples, 3000);
  }
}

TEST(Inequality, FuzzRowsIndependentOfPlanOrder) {
  FuzzPlan a;
  a.samples = 500;
  a.exponents = {2.0, 4.0};
  FuzzPlan b = a;
  b.exponents = {4.0, 2.0};
  const auto ra = run_fuzz(a), rb = run_fuzz(b);
  ASSERT_EQ(ra.size(), rb.size());
  for (const FuzzRow& x : ra) {
    bool found = false;
    for (const FuzzRow& y : rb) {
      if (x.family == y.family && x.dim == y.dim) {
        EXPECT_EQ(x.worst_margin, y.worst_margin);
        found = true;
      }
    }
    EXPECT_TRUE(found) << x.family;
  }
}

// Properties.

TEST(InequalityProperty, LhsNonnegativeAndSymmetric) {
  Stream rng(9, 0);
  for (double p : {1.5, 2.0, 3.0, 8.0}) {
    for (int s = 0; s < 5000; ++s) {
      const VecN x = random_vec(rng, 3, 10.0), y = random_vec(rng, 3, 10.0);
      const double l = monotone_lhs(make(p, x, y, 3));
      EXPECT_GE(l, 0.0);
      EXPECT_NEAR(l, monotone_lhs(make(p, y, x, 3)), 1e-12 * (1.0 + l));
    }
  }
}

TEST(InequalityProperty, LhsScalesWithPower) {
  Stream rng(10, 0);
  for (double p : {2.0, 3.0, 5.0}) {
    for (int s = 0; s < 2000; ++s) {
      const VecN x = random_vec(rng, 2, 1.0), y = random_vec(rng, 2, 1.0);
      const double t = rng.uniform(0.1, 3.0);
      const VecN tx{t * x[0], t * x[1], 0}, ty{t * y[0], t * y[1], 0};
      const double l = monotone_lhs(make(p, x, y));
      EXPECT_NEAR(monotone_lhs(make(p, tx, ty)), std::pow(t, p) * l, 1e-11 * (1.0 + std::pow(t, p) * l));
    }
  }
}

TEST(InequalityProperty, MainFormsHoldOnRandomPairs) {
  Stream rng(11, 0);
  const double kappa = derive_kappa();
  for (double p : {2.0, 6.0}) {
    for (int s = 0; s < 2000; ++s) {
      auto c = make(p, random_vec(rng, 3, 5.0), random_vec(rng, 3, 5.0), 3);
      c.kappa = kappa;
      for (const InequalityCheck& chk : check_inequality_main(c)) {
        EXPECT_TRUE(chk.pass) << to_string(chk.form) << " margin " << chk.margin;
      }
    }
  }
}
