#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "philab/phi_family.hpp"

namespace philab {

// Vectors up to dimension 3; entries past dim are ignored.
using VecN = std::array<double, 3>;

struct MonotoneTestCase {
  int dim = 2;
  VecN xi{};
  VecN eta{};
  PhiFamily family;
  // Point at which Phi(x, .) is evaluated; the origin when absent.
  std::optional<Point> x;
  double gamma = 1.0;
  double kappa = 1.0 / 12.0;
  // min{p- - 1, 1}; distinct from the normalization constant c- of the family.
  double c_minus_coef = 1.0;

  static MonotoneTestCase make(const PhiFamily& family, int dim, const VecN& xi, const VecN& eta,
                               std::optional<Point> x = std::nullopt);
};

// <psi(|xi|) xi - psi(|eta|) eta, xi - eta> with psi = phi / s and psi(0) 0 = 0.
double monotone_lhs(const MonotoneTestCase& c);

// inf over xi, eta of (|xi|^2 + |eta|^2 + <xi, eta>) / (3 |xi - eta|^2), minus 1e-9.
double derive_kappa();

// The ratio minimized by derive_kappa, in terms of a = |xi|^2, b = |eta|^2, t = <xi, eta>.
double kappa_ratio(double a, double b, double t);

enum class InequalityForm { Inq1, Inq2, Var, X };

const char* to_string(InequalityForm form);

struct InequalityCheck {
  InequalityForm form = InequalityForm::Inq1;
  bool applicable = true;
  double lhs = 0.0;
  double rhs = 0.0;
  // (lhs - rhs) / (1 + |lhs| + |rhs|); a violation is margin < -1e-12.
  double margin = 0.0;
  bool pass = true;
};

inline constexpr double kInequalitySlack = 1e-12;

// Lower bounds assembled from the two-branch estimates; the Var form uses
// c- p- kappa^((1 + gamma) p+ / 2) / 4 in front of Phi^(1+gamma)(|xi - eta|) / Phi^gamma(|xi| + |eta|).
InequalityCheck check_inequality(const MonotoneTestCase& c, InequalityForm form);

// Inq1, plus Inq2 when p- >= 2, plus Var; the X form is Inq1 evaluated at c.x.
std::vector<InequalityCheck> check_inequality_main(const MonotoneTestCase& c);

// Constant in front of the Var form.
double var_form_constant(double c_minus_coef, double p_minus, double p_plus, double gamma,
                         double kappa);

struct FuzzRow {
  std::string family;  // family name and form, e.g. "ConstantPower(4)/inq1"
  int dim = 2;
  double p = 0.0;
  long samples = 0;
  long violations = 0;
  double worst_margin = 0.0;
  // Components of the worst case, for reproduction.
  VecN worst_xi{};
  VecN worst_eta{};
};

struct FuzzPlan {
  std::vector<int> dims{2, 3};
  std::vector<double> exponents{2.0, 4.0, 8.0};
  long samples = 100000;
  std::uint64_t seed = 1;
  double gamma = 1.0;
  bool include_x_form = true;
};

// Components drawn from [-1e3, 1e3] or [-1e-3, 1e-3] with equal odds. Each
// (dim, p) pair has its own stream, so rows do not depend on the plan order.
std::vector<FuzzRow> run_fuzz(const FuzzPlan& plan);

}  // namespace philab
