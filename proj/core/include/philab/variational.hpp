#pragma once

#include <optional>
#include <string>
#include <vector>

#include "philab/grid.hpp"
#include "philab/phi_family.hpp"

namespace philab {

struct EnergyProblem {
  PhiFamily family;
  GridDomain domain;
  ScalarField g;
  int source_sign = 0;
  double epsilon = 0.0;

  // Throws DomainError when the problem is ill-formed.
  void validate() const;
};

struct SolveReport {
  ScalarField solution;
  double final_energy = 0.0;
  // max over interior nodes of |r_k| / (sum of |terms| entering r_k).
  double residual_sup = 0.0;
  // Sup-norm of the residual as returned by euler_residual.
  double residual_abs = 0.0;
  long iterations = 0;
  long line_search_failures = 0;
  bool converged = false;
  std::string message;
  // |grad u| per gradient sample: one per cell in 1D, two per cell (lower-left
  // triangle, then upper-right) in 2D.
  std::vector<double> gradient_field;
  std::vector<double> lm_norms;
  // Energy at the start and after every accepted step.
  std::vector<double> energy_trace;
};

// Newton uses the exact per-sample Hessian; WeightedLaplacian keeps only its
// isotropic part, which underestimates the curvature along the gradient by p - 1.
enum class Preconditioner { Diagonal, WeightedLaplacian, Newton };

struct SolverOptions {
  double residual_tol = 1e-8;
  double energy_tol = 1e-12;
  long max_iters = 200000;
  Preconditioner preconditioner = Preconditioner::Newton;
  // Relative floor on preconditioner weights. Only exact zeros need it: a
  // larger floor starves flat regions at high p, where true weights sit 1e-60
  // below the steepest cell.
  double curvature_floor = 1e-300;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  std::vector<double> m_list;
};

double energy(const EnergyProblem& problem, const ScalarField& u);
// Per-cell contributions; energy() is their pairwise sum.
std::vector<double> cell_energies(const EnergyProblem& problem, const ScalarField& u);
ScalarField euler_residual(const EnergyProblem& problem, const ScalarField& u);

// Per-node cancellation ratio of the residual, as reported in residual_sup.
// Scale free, so one tolerance serves p = 4 and p = 64 alike.
double relative_residual(const EnergyProblem& problem, const ScalarField& u);

SolveReport minimize(const EnergyProblem& problem, const std::optional<ScalarField>& warm_start,
                     const SolverOptions& opts = {});

double lipschitz_of_boundary(const ScalarField& g, const GridDomain& domain);

// (sum |grad u|^m times sample volume)^(1/m) for each m; the field holds a whole
// number of equally weighted samples per cell.
std::vector<double> gradient_lm_norms(const std::vector<double>& gradient_field,
                                      const GridDomain& domain, const std::vector<double>& m_list);
std::vector<double> gradient_lm_norms(const SolveReport& report, const GridDomain& domain,
                                      const std::vector<double>& m_list);

// 12 mu (1 + eta^mu) (1 + |Omega|)^2.
double explicit_gradient_bound(double mu, double eta, double measure);

struct GradientBoundCheck {
  double bound = 0.0;
  double worst_norm = 0.0;
  bool applicable = false;
  bool pass = true;
  // ||grad u||_{p-}^{p-} against |Omega| + E mu p-.
  double power_norm_lhs = 0.0;
  double power_norm_rhs = 0.0;
  bool power_norm_pass = true;
};

GradientBoundCheck check_gradient_bounds(const EnergyProblem& problem, const SolveReport& report,
                                         const std::vector<double>& m_list);

}  // namespace philab
