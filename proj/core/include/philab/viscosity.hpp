#pragma once

#include <functional>
#include <optional>

#include "philab/grid.hpp"
#include "philab/phi_family.hpp"
#include "philab/variational.hpp"

namespace philab {

struct LimitOperator {
  // Lambda(x, s) for s > 0; Lambda(x, 0) = 0 by convention.
  std::function<Vec2(const Point&, double)> lambda;
  double lipschitz_lambda = 0.0;

  static LimitOperator zero();
  // lipschitz_lambda = sup over the grid nodes of |grad p| / p for power families.
  static LimitOperator from_family(const PhiFamily& family, const GridDomain& domain);

  // Theta = Lambda / s; 0 at s = 0.
  Vec2 theta(const Point& x, double s) const;
};

struct LambdaAssumptionReport {
  // max over samples of |Theta(as) - Theta(s)| / |a - 1|, to compare with lipschitz_lambda.
  double worst_lipschitz_ratio = 0.0;
  bool lipschitz_pass = true;
  // max |s^2 Lambda(x, s)| over the smallest sampled s.
  double small_s_value = 0.0;
  bool small_s_pass = true;
};

LambdaAssumptionReport check_lambda_assumptions(const LimitOperator& op, const GridDomain& domain);

// Extremal slopes over the primitive lattice directions with max(|di|,|dj|) <= radius
// (8 neighbours at radius 1, 16 at radius 2; 2 neighbours in 1D):
// up = max (u(y) - u(x)) / |y - x|, down = max (u(x) - u(y)) / |y - x|.
struct StencilSlopes {
  double up = 0.0;
  double down = 0.0;
  double up_distance = 0.0;
  double down_distance = 0.0;
};

StencilSlopes stencil_slopes(const ScalarField& u, const GridDomain& domain, std::size_t node,
                             int radius = 1);

// Normalized infinity Laplacian 2 (up - down) / (d_up + d_down). For an axial
// extremal pair this is (max + min - 2u) / h^2.
double infinity_laplacian(const ScalarField& u, const GridDomain& domain, std::size_t node,
                          int radius = 1);

// (up - down) / h; nondecreasing in every neighbour value. Used by the iteration.
double monotone_slope_operator(const ScalarField& u, const GridDomain& domain, std::size_t node,
                               int radius = 1);

// Centered-difference gradient at an interior node.
Vec2 centered_gradient(const ScalarField& u, const GridDomain& domain, std::size_t node);

inline constexpr double kDriftClamp = 1e-10;

struct LimitOptions {
  // Absolute tolerance on the sup update; defaults to 1e-10 ||g||_inf.
  std::optional<double> tol;
  long max_iters = 1000000;
  // Wider stencils resolve more gradient directions.
  int stencil_radius = 2;
};

SolveReport solve_limit(const LimitOperator& op, const GridDomain& domain, const ScalarField& g,
                        const LimitOptions& opts = {});

// Scheme operator per node: (up - down) / (h f) plus the upwinded drift, with f the
// aligned distance factor and drift coefficients taken fresh from u.
std::vector<double> limit_residual(const LimitOperator& op, const GridDomain& domain,
                                   const ScalarField& u, int radius = 1);

struct ZetaParams {
  double alpha = 1.0;
  double A = 2.0;

  void validate() const;
  double zeta(double s) const;
  double zeta_minus_identity(double s) const;
  double zeta_prime(double s) const;
  double zeta_prime_minus_one(double s) const;
  double zeta_second(double s) const;
  // eps^3 (alpha eps - lambda) (zeta'(v_sup) - 1).
  double margin(double epsilon, double lambda, double v_sup) const;
};

struct ZetaResult {
  ScalarField field;
  double max_shift = 0.0;        // max (zeta(s) - s)
  double min_shift = 0.0;        // min over s > 0
  double max_slope_excess = 0.0; // max (zeta'(s) - 1)
  double min_slope_excess = 0.0;
  bool certificates_pass = true;
};

ZetaResult zeta_transform(const ScalarField& v, const ZetaParams& params);

struct ComparisonReport {
  double ordering_violation = 0.0;  // largest violation of u- <= u <= u+
  double scale = 1.0;
  bool ordering_pass = true;
  double gap = 0.0;                 // sup (u+ - u-)
  double bound = 0.0;
  bool gap_pass = true;
};

double uniqueness_gap_bound(const GridDomain& domain, double epsilon, double kappa);

ComparisonReport comparison_audit(const ScalarField& u_lower, const ScalarField& u_mid,
                                  const ScalarField& u_upper, const GridDomain& domain,
                                  double epsilon, double kappa);

}  // namespace philab
