#include "philab/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "philab/errors.hpp"
#include "philab/rng.hpp"

namespace philab {

namespace {

double vnorm(const VecN& v, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

double distance(const VecN& a, const VecN& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Point at(const MonotoneTestCase& c) { return c.x.value_or(Point{0.0, 0.0}); }

double psi(const MonotoneTestCase& c, double s) {
  return s > 0.0 ? c.family.phi(at(c), s) / s : 0.0;
}

// log Phi(x, s); -inf at s = 0.
double log_big(const MonotoneTestCase& c, double s) {
  if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
  return c.family.log_big_phi(at(c), s);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, int steps) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < steps; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

MonotoneTestCase MonotoneTestCase::make(const PhiFamily& family, int dim, const VecN& xi,
                                        const VecN& eta, std::optional<Point> x) {
  if (dim < 1 || dim > 3) throw DomainError("monotone test case dimension must be 1, 2 or 3");
  MonotoneTestCase c{dim, xi, eta, family, x};
  c.c_minus_coef = std::min(family.p_minus() - 1.0, 1.0);
  return c;
}

double monotone_lhs(const MonotoneTestCase& c) {
  const double a = vnorm(c.xi, c.dim);
  const double b = vnorm(c.eta, c.dim);
  const double pa = psi(c, a);
  const double pb = psi(c, b);
  double sum = 0.0;
  for (int i = 0; i < c.dim; ++i) sum += (pa * c.xi[i] - pb * c.eta[i]) * (c.xi[i] - c.eta[i]);
  return sum;
}

double kappa_ratio(double a, double b, double t) {
  const double den = 3.0 * (a + b - 2.0 * t);
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return (a + b + t) / den;
}

double derive_kappa() {
  // The ratio is homogeneous, so a = 1, b = beta, t = tau sqrt(beta) with tau in [-1, 1].
  auto f = [](double log_beta, double tau) {
    const double beta = std::exp(log_beta);
    return kappa_ratio(1.0, beta, tau * std::sqrt(beta));
  };
  double best = kappa_ratio(1.0, 0.0, 0.0);
  double best_lb = 0.0, best_tau = 0.0;
  const int nb = 2001, nt = 1001;
  const double lo = std::log(1e-6), hi = std::log(1e6);
  for (int i = 0; i < nb; ++i) {
    const double lb = lo + (hi - lo) * i / (nb - 1);
    for (int j = 0; j < nt; ++j) {
      const double tau = -1.0 + 2.0 * j / (nt - 1);
      const double v = f(lb, tau);
      if (v < best) {
        best = v;
        best_lb = lb;
        best_tau = tau;
      }
    }
  }
  // Coordinate refinement around the best grid point.
  const double db = (hi - lo) / (nb - 1);
  const double dt = 2.0 / (nt - 1);
  for (int round = 0; round < 8; ++round) {
    best_tau = golden_min([&](double t) { return f(best_lb, t); }, std::max(-1.0, best_tau - dt),
                          std::min(1.0, best_tau + dt), 80);
    best_lb = golden_min([&](double b) { return f(b, best_tau); }, best_lb - db, best_lb + db, 80);
    best = std::min(best, f(best_lb, best_tau));
  }
  best = std::min(best, f(best_lb, -1.0));
  return best - 1e-9;
}

const char* to_string(InequalityForm form) {
  switch (form) {
    case InequalityForm::Inq1: return "inq1";
    case InequalityForm::Inq2: return "inq2";
    case InequalityForm::Var: return "var";
    case InequalityForm::X: return "x";
  }
  return "?";
}

double var_form_constant(double c_minus_coef, double p_minus, double p_plus, double gamma,
                         double kappa) {
  // Phi(rho s) >= rho^(p+) Phi(s) for rho < 1 turns both branches into multiples
  // of Phi^(1+gamma)(|xi - eta|); kappa < 1/3 makes the second branch the smaller.
  const double e = 0.5 * (1.0 + gamma) * p_plus;
  const double branch1 = std::pow(3.0, -e);
  const double branch2 = 0.25 * std::pow(kappa, e);
  return c_minus_coef * p_minus * std::min(branch1, branch2);
}

InequalityCheck check_inequality(const MonotoneTestCase& c, InequalityForm form) {
  InequalityCheck out;
  out.form = form;
  const double pm = c.family.p_minus();
  if (form == InequalityForm::Inq2 && pm < 2.0) {
    out.applicable = false;
    return out;
  }
  out.lhs = monotone_lhs(c);
  const double r = distance(c.xi, c.eta, c.dim);
  const double sum = vnorm(c.xi, c.dim) + vnorm(c.eta, c.dim);
  const double g = c.gamma;
  double log_rhs = -std::numeric_limits<double>::infinity();
  if (r > 0.0) {
    // Ratios are formed in log space; Phi^gamma alone overflows for p = 8 at |xi| = 1e3.
    const double l_sum = log_big(c, sum);
    const double l_k = log_big(c, std::sqrt(c.kappa) * r);
    switch (form) {
      case InequalityForm::Inq1:
      case InequalityForm::X: {
        const double l3 = log_big(c, r / std::sqrt(3.0));
        const double a = (1.0 + g) * l3 - g * l_sum;
        const double b = (1.0 + g) * l_k - g * l_sum - std::log(4.0);
        log_rhs = std::log(c.c_minus_coef * pm) + std::min(a, b);
        break;
      }
      case InequalityForm::Inq2:
        log_rhs = std::min(log_big(c, r), std::log(pm / 4.0) + l_k);
        break;
      case InequalityForm::Var: {
        const double k = var_form_constant(c.c_minus_coef, pm, c.family.p_plus(), g, c.kappa);
        log_rhs = std::log(k) + (1.0 + g) * log_big(c, r) - g * l_sum;
        break;
      }
    }
  }
  out.rhs = std::exp(log_rhs);
  if (!std::isfinite(out.rhs) || !std::isfinite(out.lhs)) {
    std::ostringstream os;
    os << "inequality " << to_string(form) << " overflowed for family " << c.family.name();
    throw OverflowError(os.str());
  }
  out.margin = (out.lhs - out.rhs) / (1.0 + std::fabs(out.lhs) + std::fabs(out.rhs));
  out.pass = out.margin >= -kInequalitySlack;
  return out;
}

std::vector<InequalityCheck> check_inequality_main(const MonotoneTestCase& c) {
  std::vector<InequalityCheck> out;
  out.push_back(check_inequality(c, InequalityForm::Inq1));
  out.push_back(check_inequality(c, InequalityForm::Inq2));
  out.push_back(check_inequality(c, InequalityForm::Var));
  if (c.x) out.push_back(check_inequality(c, InequalityForm::X));
  return out;
}

namespace {

double fuzz_component(Stream& rng) {
  return rng.coin() ? rng.uniform(-1e3, 1e3) : rng.uniform(-1e-3, 1e-3);
}

struct Tally {
  FuzzRow row;
  bool seen = false;

  void add(const InequalityCheck& chk, const MonotoneTestCase& c) {
    ++row.samples;
    if (!chk.pass) ++row.violations;
    if (!seen || chk.margin < row.worst_margin) {
      row.worst_margin = chk.margin;
      row.worst_xi = c.xi;
      row.worst_eta = c.eta;
      seen = true;
    }
  }
};

}  // namespace

std::vector<FuzzRow> run_fuzz(const FuzzPlan& plan) {
  if (plan.samples <= 0) throw DomainError("fuzz plan needs a positive sample count");
  std::vector<FuzzRow> rows;
  const double kappa = derive_kappa();
  for (int dim : plan.dims) {
    for (double p : plan.exponents) {
      const PhiFamily constant = PhiFamily::constant_power(p);
      const PhiFamily variable = PhiFamily::variable_power(
          ExponentField::sampled([](const Point& x) { return 1.0 + 0.5 * x[0]; },
                                 [](const Point&) { return Vec2{0.5, 0.0}; }, 2, 0.0, 1.0,
                                 "1+x1/2"),
          p);
      std::vector<InequalityForm> forms{InequalityForm::Inq1, InequalityForm::Var};
      if (constant.p_minus() >= 2.0) forms.insert(forms.begin() + 1, InequalityForm::Inq2);
      std::vector<Tally> tallies(forms.size());
      Tally x_tally;
      for (std::size_t f = 0; f < forms.size(); ++f) {
        tallies[f].row.family = constant.name() + "/" + to_string(forms[f]);
      }
      x_tally.row.family = variable.name() + "/" + to_string(InequalityForm::X);

      const auto stream_index =
          static_cast<std::uint64_t>(dim) * 1000u + static_cast<std::uint64_t>(std::lround(p * 10.0));
      Stream rng(plan.seed, stream_index);
      for (long s = 0; s < plan.samples; ++s) {
        VecN xi{}, eta{};
        for (int i = 0; i < dim; ++i) xi[i] = fuzz_component(rng);
        for (int i = 0; i < dim; ++i) eta[i] = fuzz_component(rng);
        MonotoneTestCase c = MonotoneTestCase::make(constant, dim, xi, eta);
        c.gamma = plan.gamma;
        c.kappa = kappa;
        for (std::size_t f = 0; f < forms.size(); ++f) tallies[f].add(check_inequality(c, forms[f]), c);
        if (plan.include_x_form) {
          const Point x{rng.uniform(), rng.uniform()};
          MonotoneTestCase cx = MonotoneTestCase::make(variable, dim, xi, eta, x);
          cx.gamma = plan.gamma;
          cx.kappa = kappa;
          x_tally.add(check_inequality(cx, InequalityForm::X), cx);
        }
      }
      for (Tally& t : tallies) {
        t.row.dim = dim;
        t.row.p = p;
        rows.push_back(t.row);
      }
      if (plan.include_x_form) {
        x_tally.row.dim = dim;
        x_tally.row.p = p;
        rows.push_back(x_tally.row);
      }
    }
  }
  return rows;
}

}  // namespace philab
