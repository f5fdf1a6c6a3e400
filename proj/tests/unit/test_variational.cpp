#include <gtest/gtest.h>

#include <cmath>

#include "philab/errors.hpp"
#include "philab/experiments.hpp"
#include "philab/orlicz.hpp"
#include "philab/rng.hpp"
#include "philab/variational.hpp"

using namespace philab;

namespace {

ScalarField sample(const GridDomain& d, std::function<double(const Point&)> f) {
  return ScalarField::sample(d, std::move(f), FieldRole::BoundaryData);
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST(Gradient, AffineAndConstant) {
  const GridDomain d(2, 9);
  for (const Vec2& g : discrete_gradient(sample(d, [](const Point& x) { return x[0]; }), d)) {
    EXPECT_NEAR(g[0], 1.0, 1e-12);
    EXPECT_NEAR(g[1], 0.0, 1e-12);
  }
  for (const Vec2& g : discrete_gradient(sample(d, [](const Point&) { return 3.0; }), d)) {
    EXPECT_EQ(norm(g), 0.0);
  }
}

TEST(Gradient, ForwardDifferenceOfSquare) {
  const GridDomain d(1, 5);
  const auto g = discrete_gradient(sample(d, [](const Point& x) { return x[0] * x[0]; }), d);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i][0], (2.0 * i + 1.0) * 0.25, 1e-12);
}

TEST(Energy, AffineSlopeOne) {
  const GridDomain d(2, 17);
  const ScalarField g = sample(d, [](const Point& x) { return x[0]; });
  for (double p : {2.0, 4.0, 64.0}) {
    EXPECT_NEAR(energy({PhiFamily::constant_power(p), d, g, 0, 0.0}, g), 1.0 / p, 1e-12) << p;
  }
}

TEST(Energy, ConstantIsZero) {
  const GridDomain d(2, 9);
  const ScalarField g = sample(d, [](const Point&) { return 2.0; });
  EXPECT_EQ(energy({PhiFamily::constant_power(3.0), d, g, 0, 0.0}, g), 0.0);
}

TEST(Energy, TwoCellHandEvaluation) {
  const GridDomain d(1, 3);
  ScalarField g = sample(d, [](const Point& x) { return x[0]; });
  ScalarField u = g;
  u[1] = 0.3;
  // (0.6^2 + 1.4^2) / 2 * (1/2)
  EXPECT_NEAR(energy({PhiFamily::constant_power(2.0), d, g, 0, 0.0}, u), 0.58, 1e-14);
}

TEST(Energy, CellEnergiesSumToEnergy) {
  const GridDomain d(2, 9);
  const ScalarField g = sample(d, [](const Point& x) { return x[0] * x[1]; });
  const EnergyProblem pr{PhiFamily::constant_power(3.0), d, g, 1, 0.1};
  double s = 0.0;
  for (double e : cell_energies(pr, g)) s += e;
  EXPECT_NEAR(s, energy(pr, g), 1e-14);
}

TEST(Residual, AffineVanishes) {
  const GridDomain d(2, 9);
  const ScalarField g = sample(d, [](const Point& x) { return 0.3 * x[0] - 0.7 * x[1]; });
  for (double p : {2.0, 5.0}) {
    const ScalarField r = euler_residual({PhiFamily::constant_power(p), d, g, 0, 0.0}, g);
    for (double v : r.values) EXPECT_NEAR(v, 0.0, 1e-12);
  }
}

TEST(Residual, QuadraticIsLaplacianStencil) {
  for (int dim : {1, 2}) {
    const GridDomain d(dim, 9);
    const ScalarField u = sample(d, [](const Point& x) { return std::sin(3 * x[0]) + x[1] * x[1]; });
    const ScalarField r = euler_residual({PhiFamily::constant_power(2.0), d, u, 0, 0.0}, u);
    const double h2 = d.h() * d.h();
    for (std::size_t k : d.interior_nodes()) {
      const int i = d.node_i(k), j = d.node_j(k);
      double lap = 2.0 * u[k] - u[d.node_index(i - 1, j)] - u[d.node_index(i + 1, j)];
      if (dim == 2) lap += 2.0 * u[k] - u[d.node_index(i, j - 1)] - u[d.node_index(i, j + 1)];
      EXPECT_NEAR(r[k], lap / h2, 1e-9) << "dim " << dim << " node " << k;
    }
  }
}

TEST(Residual, MatchesFiniteDifferencesOfEnergy) {
  const AuditPart part = audit_residual(5, 20);
  EXPECT_TRUE(part.verdict.pass) << part.verdict.measured;
}

TEST(Minimize, OneDimensionalSolutionsAreAffine) {
  const GridDomain d(1, 257);
  ScalarField g = sample(d, [](const Point& x) { return x[0]; });
  ScalarField start = ScalarField::sample(d, [](const Point& x) { return x[0] * x[0]; });
  for (double p : {2.0, 4.0, 16.0, 64.0}) {
    const SolveReport rep = minimize({PhiFamily::constant_power(p), d, g, 0, 0.0}, start);
    ASSERT_TRUE(rep.converged) << p << " " << rep.message;
    EXPECT_LE(rep.residual_sup, 1e-8);
    EXPECT_LE(sup_diff(rep.solution, g), 1e-6) << p;
  }
}

TEST(Minimize, HarmonicPolynomialIsReproduced) {
  const GridDomain d(2, 17);
  const ScalarField g = sample(d, [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; });
  const SolveReport rep = minimize({PhiFamily::constant_power(2.0), d, g, 0, 0.0}, std::nullopt);
  ASSERT_TRUE(rep.converged);
  // x1^2 - x2^2 is discrete harmonic for the 5-point stencil.
  EXPECT_LE(sup_diff(rep.solution, g), 1e-7);
}

TEST(Minimize, SourceSignOrdersSolutions) {
  const GridDomain d(2, 17);
  const ScalarField g = sample(d, [](const Point& x) { return x[0]; });
  const PhiFamily f = PhiFamily::constant_power(4.0);
  const auto up = minimize({f, d, g, +1, 0.1}, std::nullopt);
  const auto mid = minimize({f, d, g, 0, 0.0}, std::nullopt);
  const auto lo = minimize({f, d, g, -1, 0.1}, std::nullopt);
  ASSERT_TRUE(up.converged && mid.converged && lo.converged);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_LE(lo.solution[k], mid.solution[k] + 1e-10);
    EXPECT_LE(mid.solution[k], up.solution[k] + 1e-10);
  }
}

TEST(Minimize, RejectsPiecewiseWithoutMask) {
  const GridDomain d(2, 9);
  const Subdomain disc = Subdomain::disc({0.5, 0.5}, 0.3);
  const PhiFamily f = PhiFamily::piecewise(PhiFamily::constant_power(4), PhiFamily::constant_power(3),
                                           [disc](const Point& x) { return disc.contains(x); }, "disc");
  const ScalarField g = sample(d, [](const Point& x) { return x[0]; });
  EXPECT_THROW(minimize({f, d, g, 0, 0.0}, std::nullopt), DomainError);
}

TEST(Lipschitz, PresetsAndPairSweep) {
  const GridDomain d(2, 17);
  EXPECT_NEAR(lipschitz_of_boundary(sample(d, [](const Point& x) { return x[0]; }), d), 1.0, 1e-12);
  EXPECT_NEAR(lipschitz_of_boundary(sample(d, [](const Point& x) { return 2 * x[0]; }), d), 2.0, 1e-12);

  const GridDomain a(2, 17, -1.0, 1.0);
  auto aronsson_g = [](const Point& x) {
    auto sp = [](double v) { return v < 0 ? -std::pow(-v, 4.0 / 3.0) : std::pow(v, 4.0 / 3.0); };
    return sp(x[0]) - sp(x[1]);
  };
  const ScalarField g = sample(a, aronsson_g);
  // Oracle: brute-force pair maximum over boundary points, written out independently.
  double best = 0.0;
  std::vector<Point> pts;
  for (std::size_t k : a.boundary_nodes()) pts.push_back(a.node_point(k));
  for (const Point& p : pts)
    for (const Point& q : pts) {
      const double dist = std::hypot(p[0] - q[0], p[1] - q[1]);
      if (dist > 0) best = std::max(best, std::fabs(aronsson_g(p) - aronsson_g(q)) / dist);
    }
  EXPECT_NEAR(lipschitz_of_boundary(g, a), best, 1e-12);
  // Frozen value of the oracle on the 17x17 lattice.
  EXPECT_NEAR(best, 1.8451822200138452, 1e-12);
}

TEST(GradientNorms, AffineIsOne) {
  const GridDomain d(2, 17);
  const ScalarField g = sample(d, [](const Point& x) { return x[0]; });
  SolverOptions opts;
  opts.m_list = {4.0, 8.0, 3.0};
  const SolveReport rep = minimize({PhiFamily::constant_power(4.0), d, g, 0, 0.0}, std::nullopt, opts);
  for (double v : rep.lm_norms) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(GradientNorms, ExplicitBound) {
  EXPECT_DOUBLE_EQ(explicit_gradient_bound(1.0, 1.0, 1.0), 96.0);
  const GridDomain d(2, 17);
  const ScalarField g = sample(d, [](const Point& x) { return std::sin(2 * x[0]) * 0.5 + x[1] * 0.5; });
  std::optional<ScalarField> warm;
  for (double p : {4.0, 8.0, 16.0}) {
    const EnergyProblem pr{PhiFamily::constant_power(p), d, g, 0, 0.0};
    const SolveReport rep = minimize(pr, warm);
    warm = rep.solution;
    const auto chk = check_gradient_bounds(pr, rep, {4.0, 8.0, 3.0});
    EXPECT_TRUE(chk.applicable);
    EXPECT_TRUE(chk.pass);
    EXPECT_TRUE(chk.power_norm_pass) << chk.power_norm_lhs << " vs " << chk.power_norm_rhs;
  }
}

// Properties.

TEST(VariationalProperty, EnergyNeverIncreases) {
  const GridDomain d(2, 17);
  const ScalarField g = sample(d, [](const Point& x) { return std::cos(3 * x[0]) * x[1]; });
  for (double p : {2.0, 8.0, 32.0}) {
    const SolveReport rep = minimize({PhiFamily::constant_power(p), d, g, 0, 0.0}, std::nullopt);
    ASSERT_GE(rep.energy_trace.size(), 2u);
    for (std::size_t i = 1; i < rep.energy_trace.size(); ++i) {
      EXPECT_LE(rep.energy_trace[i], rep.energy_trace[i - 1] * (1.0 + 1e-12)) << "p=" << p << " step " << i;
    }
  }
}

TEST(VariationalProperty, MinimizerIndependentOfStart) {
  const GridDomain d(2, 17);
  const ScalarField g = sample(d, [](const Point& x) { return x[0] * x[1]; });
  Stream rng(31, 0);
  ScalarField start_a = g, start_b = g;
  for (std::size_t k : d.interior_nodes()) {
    start_a[k] = rng.uniform(-1.0, 1.0);
    start_b[k] = rng.uniform(-1.0, 1.0);
  }
  for (double p : {3.0, 12.0}) {
    const PhiFamily f = PhiFamily::constant_power(p);
    const auto a = minimize({f, d, g, 0, 0.0}, start_a);
    const auto b = minimize({f, d, g, 0, 0.0}, start_b);
    ASSERT_TRUE(a.converged && b.converged);
    EXPECT_LE(sup_diff(a.solution, b.solution), 1e-6) << p;
  }
}

TEST(VariationalProperty, MaximumPrinciple) {
  const GridDomain d(2, 17);
  Subdomain disc = Subdomain::disc({0.5, 0.5}, 0.3);
  GridDomain masked(2, 17);
  masked.set_subdomain(disc);
  const ScalarField g = sample(d, [](const Point& x) { return std::sin(6 * x[0]) + x[1]; });
  double lo = 1e300, hi = -1e300;
  for (std::size_t k : d.boundary_nodes()) {
    lo = std::min(lo, g[k]);
    hi = std::max(hi, g[k]);
  }
  for (const PhiFamily& f : audit_families(true)) {
    const GridDomain& dom = f.kind() == FamilyKind::Piecewise ? masked : d;
    const SolveReport rep = minimize({f, dom, g, 0, 0.0}, std::nullopt);
    ASSERT_TRUE(rep.converged) << f.name() << ": " << rep.message;
    for (double v : rep.solution.values) {
      EXPECT_GE(v, lo - 1e-8) << f.name();
      EXPECT_LE(v, hi + 1e-8) << f.name();
    }
  }
}

TEST(VariationalProperty, EnergyTrendsWithLipschitzConstant) {
  const GridDomain d(2, 17);
  for (double slope : {1.0, 2.0}) {
    const ScalarField g = sample(d, [slope](const Point& x) { return slope * x[0]; });
    std::vector<double> e;
    std::optional<ScalarField> warm;
    for (double p : {4.0, 8.0, 16.0}) {
      const SolveReport rep = minimize({PhiFamily::constant_power(p), d, g, 0, 0.0}, warm);
      warm = rep.solution;
      e.push_back(rep.final_energy);
      if (slope == 1.0) {
        EXPECT_LE(rep.final_energy, 1.1 * d.measure() / p);
      }
    }
    EXPECT_TRUE(slope == 1.0 ? strictly_decreasing(e) : strictly_increasing(e));
  }
}
