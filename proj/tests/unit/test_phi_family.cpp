#include <gtest/gtest.h>

#include <cmath>

#include "philab/errors.hpp"
#include "philab/experiments.hpp"
#include "philab/phi_family.hpp"
#include "philab/rng.hpp"

using namespace philab;

namespace {

PhiFamily variable_2_plus_x1(double n = 1.0) {
  return PhiFamily::variable_power(
      ExponentField::sampled([](const Point& x) { return 2.0 + x[0]; },
                             [](const Point&) { return Vec2{1.0, 0.0}; }, 2, 0.0, 1.0, "2+x1"),
      n);
}

// Independent oracle: sup over a uniform grid on [0, hi] with the given step.
double grid_sup(const std::function<double(double)>& big_phi, double t, double hi, double step) {
  double best = 0.0;
  const long n = std::lround(hi / step);
  for (long i = 0; i <= n; ++i) {
    const double s = i * step;
    best = std::max(best, t * s - big_phi(s));
  }
  return best;
}

}  // namespace

TEST(PhiFamily, ConstantPowerDerivative) {
  const PhiFamily f = PhiFamily::constant_power(3.0);
  EXPECT_DOUBLE_EQ(f.phi({0.0, 0.0}, 2.0), 12.0);
  EXPECT_DOUBLE_EQ(f.big_phi({0.0, 0.0}, 2.0), 8.0);
}

TEST(PhiFamily, ZeroArgumentGivesZero) {
  for (const PhiFamily& f : audit_families(true)) {
    EXPECT_EQ(f.phi({0.3, 0.6}, 0.0), 0.0) << f.name();
    EXPECT_EQ(f.big_phi({0.3, 0.6}, 0.0), 0.0) << f.name();
  }
}

TEST(PhiFamily, VariablePowerMatchesNumericDerivativeOfBigPhi) {
  const PhiFamily f = variable_2_plus_x1();
  const Point x{1.0, 0.0};
  EXPECT_NEAR(f.phi(x, 2.0), 12.0, 1e-12);
  // Oracle: central difference of Phi(x, s) = s^3.
  const double h = 1e-5;
  const double fd = (f.big_phi(x, 2.0 + h) - f.big_phi(x, 2.0 - h)) / (2.0 * h);
  EXPECT_NEAR(fd, 12.0, 1e-8);
}

TEST(PhiFamily, BigPhiPowerAndEmptyIntegral) {
  const PhiFamily f = PhiFamily::constant_power(4.0);
  EXPECT_DOUBLE_EQ(f.big_phi({0.0, 0.0}, 2.0), 16.0);
  EXPECT_EQ(f.big_phi({0.0, 0.0}, 0.0), 0.0);
}

TEST(PhiFamily, CustomQuadratureMatchesClosedForm) {
  CustomSpec spec;
  spec.name = "s exp(s)";
  spec.phi = [](double s) { return s * std::exp(s); };
  spec.dphi_ds = [](double s) { return (1.0 + s) * std::exp(s); };
  spec.p_minus = 2.0;
  spec.p_plus = 4.0;
  spec.lambda_zero = [](const Point&) { return Vec2{0.0, 0.0}; };
  const PhiFamily f = PhiFamily::custom(spec);
  EXPECT_NEAR(f.big_phi({0.0, 0.0}, 1.0), 1.0, 1e-10);
  for (double s : {0.1, 0.5, 2.0, 3.0}) {
    const double exact = (s - 1.0) * std::exp(s) + 1.0;
    EXPECT_NEAR(f.big_phi({0.0, 0.0}, s) / exact, 1.0, 1e-9) << s;
  }
}

TEST(PhiFamily, NegativeArgumentRejected) {
  EXPECT_THROW(PhiFamily::constant_power(3.0).phi({0.0, 0.0}, -1.0), DomainError);
}

TEST(PhiFamily, OverflowNamesTheInput) {
  const PhiFamily f = PhiFamily::constant_power(64.0);
  try {
    f.big_phi({0.0, 0.0}, 1e10);
    FAIL() << "expected overflow";
  } catch (const OverflowError& e) {
    EXPECT_NE(std::string(e.what()).find("s=10000000000"), std::string::npos) << e.what();
  }
}

TEST(Conjugate, SquareAtTwoIsOne) {
  const ConjugatePhi c(PhiFamily::constant_power(2.0));
  // Frozen from grid_sup(s^2, t = 2, [0, 10], step 1e-6).
  const double oracle = grid_sup([](double s) { return s * s; }, 2.0, 10.0, 1e-6);
  EXPECT_NEAR(oracle, 1.0, 1e-12);
  EXPECT_NEAR(c.eval({0.0, 0.0}, 2.0), 1.0, 1e-9);
}

TEST(Conjugate, ZeroSlopeIsZero) {
  for (const PhiFamily& f : audit_families(false)) {
    EXPECT_EQ(ConjugatePhi(f).eval({0.5, 0.5}, 0.0), 0.0) << f.name();
  }
}

TEST(Conjugate, QuarticStationaryPoint) {
  const double p = 4.0, t = 4.0;
  const double stationary = (p - 1.0) * std::pow(t / p, p / (p - 1.0));
  EXPECT_DOUBLE_EQ(stationary, 3.0);
  const double brute = grid_sup([](double s) { return std::pow(s, 4.0); }, t, 3.0, 1e-6);
  EXPECT_NEAR(brute, 3.0, 1e-10);
  EXPECT_NEAR(ConjugatePhi(PhiFamily::constant_power(p)).eval({0.0, 0.0}, t), 3.0, 3e-9);
}

TEST(Normalization, Examples) {
  EXPECT_DOUBLE_EQ(normalization_beta(1.0, 1.0, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(normalization_beta(1.0 / 16.0, 16.0, 2.0), 0.25);
  const auto [cm, cp] = normalization_constants(0.5, 3.0);
  EXPECT_DOUBLE_EQ(cm, 0.125);
  EXPECT_DOUBLE_EQ(cp, 8.0);
}

TEST(Structure, PurePowerPassesWithEquality) {
  const auto plan = SamplingPlan::with_points({{0.0, 0.0}, {0.5, 0.5}});
  const StructureReport rep = verify_structure(PhiFamily::constant_power(4.0), plan);
  EXPECT_TRUE(rep.all_pass());
  const CheckResult* sandwich = rep.find("lieberman_sandwich");
  ASSERT_NE(sandwich, nullptr);
  EXPECT_NEAR(sandwich->worst_margin, 0.0, 1e-12);
}

TEST(Structure, VariablePowerSandwichOnUnitSquare) {
  const PhiFamily f = variable_2_plus_x1();
  EXPECT_DOUBLE_EQ(f.p_minus(), 2.0);
  EXPECT_DOUBLE_EQ(f.p_plus(), 3.0);
  std::vector<Point> pts;
  for (int j = 0; j <= 8; ++j)
    for (int i = 0; i <= 8; ++i) pts.push_back({i / 8.0, j / 8.0});
  EXPECT_TRUE(verify_structure(f, SamplingPlan::with_points(pts)).all_pass());
}

TEST(Structure, CubeConvexity) {
  auto plan = SamplingPlan::with_points({{0.0, 0.0}});
  plan.gamma = 1.0;
  const StructureReport rep = verify_structure(PhiFamily::constant_power(3.0), plan);
  const CheckResult* c = rep.find("convexity_phi_pow_sqrt");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->applicable);
  EXPECT_TRUE(c->pass);
}

TEST(Structure, HighExponentSurvivesUnderflow) {
  // Phi(1e-6) = 1e-384 underflows; the checks must not read that as a violation.
  const StructureReport rep =
      verify_structure(PhiFamily::constant_power(64.0), SamplingPlan::with_points({{0.5, 0.5}}));
  EXPECT_TRUE(rep.all_pass());
}

// Properties over every audit family.

TEST(PhiProperty, LiebermanSandwichAtRandomSamples) {
  Stream rng(11, 0);
  for (const PhiFamily& f : audit_families(true)) {
    for (int i = 0; i < 500; ++i) {
      const Point x{rng.uniform(), rng.uniform()};
      const double s = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
      const double r = std::exp(std::log(s) + f.log_phi(x, s) - f.log_big_phi(x, s));
      EXPECT_GE(r, f.p_minus() * (1.0 - 1e-9)) << f.name() << " s=" << s;
      EXPECT_LE(r, f.p_plus() * (1.0 + 1e-9)) << f.name() << " s=" << s;
    }
  }
}

TEST(PhiProperty, ConjugateMatchesBruteForceForPowers) {
  Stream rng(12, 0);
  for (const PhiFamily& f : audit_families(false)) {
    const ConjugatePhi c(f);
    for (int i = 0; i < 20; ++i) {
      const Point x{rng.uniform(), rng.uniform()};
      const double t = std::exp(rng.uniform(std::log(1e-2), std::log(1e2)));
      const double brute = brute_force_conjugate(f, x, t);
      EXPECT_NEAR(c.eval(x, t) / brute, 1.0, 1e-7) << f.name() << " t=" << t;
    }
  }
}

TEST(PhiProperty, NormalizationRoundTripIsMonotone) {
  Stream rng(13, 0);
  for (int i = 0; i < 200; ++i) {
    const double beta = rng.uniform(0.05, 1.0);
    const double pm = rng.uniform(1.1, 8.0);
    const double pp = pm + rng.uniform(0.0, 8.0);
    const auto [cm, cp] = normalization_constants(beta, pp);
    const double back = normalization_beta(cm, cp, pm);
    EXPECT_LE(back, beta * (1.0 + 1e-12));
    EXPECT_NEAR(back, std::pow(beta, pp / pm), 1e-12);
  }
}

TEST(PhiProperty, YoungInequality) {
  Stream rng(14, 0);
  for (const PhiFamily& f : audit_families(true)) {
    const ConjugatePhi c(f);
    const int samples = f.kind() == FamilyKind::Custom ? 1000 : 10000;
    for (int i = 0; i < samples; ++i) {
      const Point x{rng.uniform(), rng.uniform()};
      const double s = rng.uniform(0.0, 2.0);
      const double t = rng.uniform(0.0, 2.0);
      EXPECT_GE(f.big_phi(x, s) + c.eval(x, t) - s * t, -1e-12) << f.name() << " s=" << s << " t=" << t;
    }
  }
}

TEST(PhiProperty, DriftIsLimitOfFiniteRatio) {
  // Oracle: d_x a_n / d_s a_n at n = 64, with d_x by central differences.
  const double n = 64.0;
  const PhiFamily f = variable_2_plus_x1(n / 2.0);
  Stream rng(15, 0);
  for (int i = 0; i < 50; ++i) {
    const Point x{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    const double s = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const double h = 1e-6;
    const double dx = (f.source_density({x[0] + h, x[1]}, s) - f.source_density({x[0] - h, x[1]}, s)) / (2 * h);
    const double ratio = dx / f.curvature(x, s);
    const Vec2 drift = f.lambda_drift(x, s).value();
    // The gap is |s ln s| |grad p| (1 / (p - 1/m) - 1 / p) where p_m = m p, so O(1/m).
    EXPECT_NEAR(ratio, drift[0], 4.0 * std::fabs(s * std::log(s)) / n + 1e-6) << "s=" << s;
    EXPECT_EQ(drift[1], 0.0);
  }
}
