#include "philab/phi_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "philab/errors.hpp"

namespace philab {

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::ConstantPower: return "constant_power";
    case FamilyKind::VariablePower: return "variable_power";
    case FamilyKind::Piecewise: return "piecewise";
    case FamilyKind::Custom: return "custom";
  }
  return "unknown";
}

ExponentField ExponentField::constant(double p) {
  ExponentField f;
  f.value = [p](const Point&) { return p; };
  f.gradient = [](const Point&) { return Vec2{0.0, 0.0}; };
  f.min_value = p;
  f.max_value = p;
  std::ostringstream os;
  os << p;
  f.label = os.str();
  return f;
}

ExponentField ExponentField::sampled(std::function<double(const Point&)> value,
                                     std::function<Vec2(const Point&)> gradient, int dim,
                                     double lower, double upper, std::string label) {
  constexpr int kSamples = 257;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const int nj = dim == 1 ? 1 : kSamples;
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < kSamples; ++i) {
      Point x{lower + (upper - lower) * i / (kSamples - 1),
              dim == 1 ? 0.0 : lower + (upper - lower) * j / (kSamples - 1)};
      const double v = value(x);
      if (!std::isfinite(v)) throw DomainError("exponent field is not finite on the domain");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  ExponentField f;
  f.value = std::move(value);
  f.gradient = std::move(gradient);
  f.min_value = lo;
  f.max_value = hi;
  f.label = std::move(label);
  return f;
}

// ---------------------------------------------------------------------------
// PhiModel defaults

double PhiModel::log_phi(const Point& x, double s) const { return std::log(phi(x, s)); }
double PhiModel::log_big_phi(const Point& x, double s) const { return std::log(big_phi(x, s)); }

double PhiModel::energy_density(const Point& x, double s) const {
  return big_phi(x, s) / phi(x, 1.0);
}

double PhiModel::energy_density_change(const Point& x, double s, double t, double) const {
  return energy_density(x, t) - energy_density(x, s);
}

double PhiModel::flux_coefficient(const Point& x, double s) const {
  if (s <= 0.0) return 0.0;
  return phi(x, s) / (s * phi(x, 1.0));
}

double PhiModel::curvature(const Point& x, double s) const { return dphi_ds(x, s) / phi(x, 1.0); }

double PhiModel::source_density(const Point& x, double s) const {
  return phi(x, s) / phi(x, 1.0);
}

std::optional<double> PhiModel::exponent(const Point&) const { return std::nullopt; }
std::optional<Vec2> PhiModel::lambda_drift(const Point&, double) const { return std::nullopt; }
std::optional<Vec2> PhiModel::lambda_zero(const Point&) const { return std::nullopt; }

namespace {

// Pure power s^q with q = exponent(x); Phi(x,1) = 1.
class PowerModel : public PhiModel {
 public:
  virtual double q(const Point& x) const = 0;

  double phi(const Point& x, double s) const override {
    if (s < kPowerGuard) return 0.0;
    const double e = q(x);
    return e * std::pow(s, e - 1.0);
  }
  double dphi_ds(const Point& x, double s) const override {
    if (s < kPowerGuard) return 0.0;
    const double e = q(x);
    return e * (e - 1.0) * std::pow(s, e - 2.0);
  }
  double big_phi(const Point& x, double s) const override {
    if (s < kPowerGuard) return 0.0;
    return std::pow(s, q(x));
  }
  double log_phi(const Point& x, double s) const override {
    if (s < kPowerGuard) return -std::numeric_limits<double>::infinity();
    const double e = q(x);
    return std::log(e) + (e - 1.0) * std::log(s);
  }
  double log_big_phi(const Point& x, double s) const override {
    if (s < kPowerGuard) return -std::numeric_limits<double>::infinity();
    return q(x) * std::log(s);
  }
  double energy_density(const Point& x, double s) const override {
    if (s < kPowerGuard) return 0.0;
    const double e = q(x);
    return std::pow(s, e) / e;
  }
  double energy_density_change(const Point& x, double s, double t,
                               double t_minus_s) const override {
    if (s < kPowerGuard) return energy_density(x, t);
    return energy_density(x, s) * std::expm1(q(x) * std::log1p(t_minus_s / s));
  }
  double flux_coefficient(const Point& x, double s) const override {
    if (s < kPowerGuard) return 0.0;
    return std::pow(s, q(x) - 2.0);
  }
  double curvature(const Point& x, double s) const override {
    if (s < kPowerGuard) return 0.0;
    const double e = q(x);
    return (e - 1.0) * std::pow(s, e - 2.0);
  }
  double source_density(const Point& x, double s) const override {
    if (s < kPowerGuard) return 0.0;
    return std::pow(s, q(x) - 1.0);
  }
  std::optional<double> exponent(const Point& x) const override { return q(x); }
};

class ConstantPowerModel final : public PowerModel {
 public:
  explicit ConstantPowerModel(double p) : p_(p) {}
  double q(const Point&) const override { return p_; }
  std::optional<Vec2> lambda_drift(const Point&, double) const override { return Vec2{0.0, 0.0}; }
  std::optional<Vec2> lambda_zero(const Point&) const override { return Vec2{0.0, 0.0}; }

 private:
  double p_;
};

class VariablePowerModel final : public PowerModel {
 public:
  VariablePowerModel(ExponentField base, double n) : base_(std::move(base)), n_(n) {}
  double q(const Point& x) const override { return n_ * base_.value(x); }

  // s ln s grad p / p, independent of n.
  std::optional<Vec2> lambda_drift(const Point& x, double s) const override {
    if (s <= 0.0) return Vec2{0.0, 0.0};
    const double p = base_.value(x);
    const Vec2 g = base_.gradient(x);
    const double f = s * std::log(s) / p;
    return Vec2{f * g[0], f * g[1]};
  }
  std::optional<Vec2> lambda_zero(const Point&) const override { return Vec2{0.0, 0.0}; }

 private:
  ExponentField base_;
  double n_;
};

class PiecewiseModel final : public PhiModel {
 public:
  PiecewiseModel(PhiFamily inside, PhiFamily outside, std::function<bool(const Point&)> pred)
      : in_(std::move(inside)), out_(std::move(outside)), pred_(std::move(pred)) {}

  const PhiModel& side(const Point& x) const {
    return pred_(x) ? in_.model() : out_.model();
  }
  double phi(const Point& x, double s) const override { return side(x).phi(x, s); }
  double dphi_ds(const Point& x, double s) const override { return side(x).dphi_ds(x, s); }
  double big_phi(const Point& x, double s) const override { return side(x).big_phi(x, s); }
  double log_phi(const Point& x, double s) const override { return side(x).log_phi(x, s); }
  double log_big_phi(const Point& x, double s) const override {
    return side(x).log_big_phi(x, s);
  }
  double energy_density(const Point& x, double s) const override {
    return side(x).energy_density(x, s);
  }
  double energy_density_change(const Point& x, double s, double t,
                               double t_minus_s) const override {
    return side(x).energy_density_change(x, s, t, t_minus_s);
  }
  double flux_coefficient(const Point& x, double s) const override {
    return side(x).flux_coefficient(x, s);
  }
  double curvature(const Point& x, double s) const override { return side(x).curvature(x, s); }
  double source_density(const Point& x, double s) const override {
    return side(x).source_density(x, s);
  }
  std::optional<double> exponent(const Point& x) const override { return side(x).exponent(x); }
  std::optional<Vec2> lambda_drift(const Point& x, double s) const override {
    return side(x).lambda_drift(x, s);
  }
  std::optional<Vec2> lambda_zero(const Point& x) const override {
    return side(x).lambda_zero(x);
  }

 private:
  PhiFamily in_;
  PhiFamily out_;
  std::function<bool(const Point&)> pred_;
};

class CustomModel final : public PhiModel {
 public:
  explicit CustomModel(CustomSpec spec) : spec_(std::move(spec)), phi_one_(spec_.phi(1.0)) {}

  double phi(const Point&, double s) const override { return s <= 0.0 ? 0.0 : spec_.phi(s); }
  double dphi_ds(const Point&, double s) const override { return spec_.dphi_ds(s); }
  double big_phi(const Point&, double s) const override {
    if (s <= 0.0) return 0.0;
    if (spec_.big_phi) return (*spec_.big_phi)(s);
    return adaptive_simpson(spec_.phi, 0.0, s);
  }
  double energy_density(const Point& x, double s) const override {
    return big_phi(x, s) / phi_one_;
  }
  double flux_coefficient(const Point&, double s) const override {
    if (s <= 0.0) return 0.0;
    return spec_.phi(s) / (s * phi_one_);
  }
  double curvature(const Point&, double s) const override { return spec_.dphi_ds(s) / phi_one_; }
  double source_density(const Point&, double s) const override {
    return s <= 0.0 ? 0.0 : spec_.phi(s) / phi_one_;
  }
  std::optional<Vec2> lambda_drift(const Point& x, double s) const override {
    if (!spec_.lambda_drift) return std::nullopt;
    return (*spec_.lambda_drift)(x, s);
  }
  std::optional<Vec2> lambda_zero(const Point& x) const override { return spec_.lambda_zero(x); }

 private:
  CustomSpec spec_;
  double phi_one_;
};

[[noreturn]] void overflow(const char* what, const std::string& family, const Point& x, double s) {
  std::ostringstream os;
  os.precision(17);
  os << what << " of family '" << family << "' is not finite at x=(" << x[0] << ", " << x[1]
     << "), s=" << s;
  throw OverflowError(os.str());
}

double checked(double v, const char* what, const std::string& family, const Point& x, double s) {
  if (!std::isfinite(v)) overflow(what, family, x, s);
  return v;
}

void require_argument(double s) {
  if (!(s >= 0.0)) throw DomainError("Phi-function argument must be nonnegative");
}

}  // namespace

// ---------------------------------------------------------------------------
// PhiFamily

PhiFamily PhiFamily::constant_power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("power exponent must exceed 1");
  PhiFamily f;
  f.kind_ = FamilyKind::ConstantPower;
  std::ostringstream os;
  os << "power(" << p << ")";
  f.name_ = os.str();
  f.p_minus_ = p;
  f.p_plus_ = p;
  f.has_drift_ = true;
  f.exponent_field_ = ExponentField::constant(p);
  f.model_ = std::make_shared<ConstantPowerModel>(p);
  return f;
}

PhiFamily PhiFamily::variable_power(ExponentField base, double n) {
  if (!(n > 0.0)) throw DomainError("variable power scale index must be positive");
  if (!(n * base.min_value > 1.0)) throw DomainError("variable power exponent must exceed 1");
  PhiFamily f;
  f.kind_ = FamilyKind::VariablePower;
  std::ostringstream os;
  os << "variable_power(" << base.label << ", n=" << n << ")";
  f.name_ = os.str();
  f.p_minus_ = n * base.min_value;
  f.p_plus_ = n * base.max_value;
  f.scale_index_ = n;
  f.has_drift_ = true;
  f.exponent_field_ = base;
  f.model_ = std::make_shared<VariablePowerModel>(std::move(base), n);
  return f;
}

PhiFamily PhiFamily::piecewise(PhiFamily inside, PhiFamily outside,
                               std::function<bool(const Point&)> is_inside, std::string label) {
  PhiFamily f;
  f.kind_ = FamilyKind::Piecewise;
  f.name_ = "piecewise(" + label + ": " + inside.name() + " | " + outside.name() + ")";
  f.p_minus_ = std::min(inside.p_minus(), outside.p_minus());
  f.p_plus_ = std::max(inside.p_plus(), outside.p_plus());
  f.c_minus_ = std::min(inside.c_minus(), outside.c_minus());
  f.c_plus_ = std::max(inside.c_plus(), outside.c_plus());
  f.unit_normalized_ = inside.unit_normalized() && outside.unit_normalized();
  f.has_drift_ = inside.has_lambda_drift() && outside.has_lambda_drift();
  f.model_ = std::make_shared<PiecewiseModel>(std::move(inside), std::move(outside),
                                              std::move(is_inside));
  return f;
}

PhiFamily PhiFamily::custom(CustomSpec spec) {
  if (!spec.phi || !spec.dphi_ds) throw DomainError("custom family needs phi and dphi_ds");
  if (!spec.lambda_zero) throw DomainError("custom family must declare lambda_zero");
  if (!(spec.p_minus > 1.0) || !(spec.p_plus >= spec.p_minus))
    throw DomainError("custom family needs 1 < p_minus <= p_plus");
  if (!(spec.c_minus > 0.0) || !(spec.c_minus <= spec.c_plus))
    throw DomainError("custom family needs 0 < c_minus <= c_plus");
  PhiFamily f;
  f.kind_ = FamilyKind::Custom;
  f.name_ = spec.name.empty() ? "custom" : spec.name;
  f.p_minus_ = spec.p_minus;
  f.p_plus_ = spec.p_plus;
  f.c_minus_ = spec.c_minus;
  f.c_plus_ = spec.c_plus;
  f.unit_normalized_ = spec.c_minus == 1.0 && spec.c_plus == 1.0;
  f.has_drift_ = spec.lambda_drift.has_value();
  f.model_ = std::make_shared<CustomModel>(std::move(spec));
  return f;
}

PhiFamily PhiFamily::sum_of_powers(double p, double q) {
  if (!(p > 1.0) || !(q >= p)) throw DomainError("sum_of_powers needs 1 < p <= q");
  CustomSpec spec;
  std::ostringstream os;
  os << "sum_of_powers(" << p << ", " << q << ")";
  spec.name = os.str();
  spec.phi = [p, q](double s) { return std::pow(s, p - 1.0) + std::pow(s, q - 1.0); };
  spec.dphi_ds = [p, q](double s) {
    return (p - 1.0) * std::pow(s, p - 2.0) + (q - 1.0) * std::pow(s, q - 2.0);
  };
  spec.p_minus = p;
  spec.p_plus = q;
  spec.c_minus = 1.0 / p + 1.0 / q;
  spec.c_plus = spec.c_minus;
  spec.lambda_zero = [](const Point&) { return Vec2{0.0, 0.0}; };
  spec.lambda_drift = [](const Point&, double) { return Vec2{0.0, 0.0}; };
  return custom(std::move(spec));
}

double PhiFamily::phi(const Point& x, double s) const {
  require_argument(s);
  return checked(model_->phi(x, s), "phi", name_, x, s);
}

double PhiFamily::dphi_ds(const Point& x, double s) const {
  require_argument(s);
  return checked(model_->dphi_ds(x, s), "dphi_ds", name_, x, s);
}

double PhiFamily::big_phi(const Point& x, double s) const {
  require_argument(s);
  return checked(model_->big_phi(x, s), "Phi", name_, x, s);
}

double PhiFamily::log_phi(const Point& x, double s) const {
  require_argument(s);
  const double v = model_->log_phi(x, s);
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) overflow("log phi", name_, x, s);
  return v;
}

double PhiFamily::log_big_phi(const Point& x, double s) const {
  require_argument(s);
  const double v = model_->log_big_phi(x, s);
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) overflow("log Phi", name_, x, s);
  return v;
}

double PhiFamily::energy_density(const Point& x, double s) const {
  return checked(model_->energy_density(x, s), "energy density", name_, x, s);
}

double PhiFamily::flux_coefficient(const Point& x, double s) const {
  return checked(model_->flux_coefficient(x, s), "flux coefficient", name_, x, s);
}

double PhiFamily::curvature(const Point& x, double s) const {
  return checked(model_->curvature(x, s), "curvature", name_, x, s);
}

double PhiFamily::source_density(const Point& x, double s) const {
  return checked(model_->source_density(x, s), "source density", name_, x, s);
}

std::optional<Vec2> PhiFamily::lambda_drift(const Point& x, double s) const {
  if (s <= 0.0) return has_drift_ ? std::optional<Vec2>(Vec2{0.0, 0.0}) : std::nullopt;
  return model_->lambda_drift(x, s);
}

// ---------------------------------------------------------------------------
// Conjugate

ConjugatePhi::ConjugatePhi(PhiFamily base, double bracket_growth)
    : base_(std::move(base)), growth_(bracket_growth) {
  if (!(growth_ > 1.0)) throw DomainError("bracket growth must exceed 1");
}

double ConjugatePhi::eval(const Point& x, double t) const {
  if (!(t >= 0.0)) throw DomainError("conjugate argument must be nonnegative");
  if (t == 0.0) return 0.0;

  auto phi_at_least = [&](double s) {
    try {
      return base_.phi(x, s) >= t;
    } catch (const OverflowError&) {
      return true;
    }
  };

  double lo = 0.0;
  double hi = 1.0;
  if (phi_at_least(hi)) {
    lo = hi / growth_;
    int shrinks = 0;
    while (phi_at_least(lo)) {
      hi = lo;
      lo /= growth_;
      if (++shrinks > 4000) {
        lo = 0.0;
        break;
      }
    }
  } else {
    int expansions = 0;
    while (!phi_at_least(hi)) {
      if (++expansions > 200) {
        std::ostringstream os;
        os << "conjugate of '" << base_.name() << "' unbounded: no bracket for t=" << t;
        throw UnboundedConjugateError(os.str());
      }
      lo = hi;
      hi *= growth_;
    }
  }

  // Concave objective; golden-section on [lo, hi].
  auto f = [&](double s) { return t * s - base_.big_phi(x, s); };
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 400 && (b - a) > 1e-10 * b; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double best = std::max({fc, fd, f(0.5 * (a + b))});
  return std::max(0.0, best);
}

double ConjugatePhi::derivative(const Point& x, double t) const {
  const double dt = 1e-5 * t;
  if (dt <= 0.0) throw DomainError("conjugate derivative needs t > 0");
  return (eval(x, t + dt) - eval(x, t - dt)) / (2.0 * dt);
}

// ---------------------------------------------------------------------------
// Normalization

double normalization_beta(double c_minus, double c_plus, double p_minus) {
  if (!(c_minus > 0.0 && c_minus <= 1.0 && 1.0 <= c_plus))
    throw DomainError("normalization constants need 0 < c_minus <= 1 <= c_plus");
  if (!(p_minus > 1.0)) throw DomainError("normalization needs p_minus > 1");
  return std::min(std::pow(c_minus, 1.0 / p_minus), std::pow(c_plus, -1.0 / p_minus));
}

std::pair<double, double> normalization_constants(double beta, double p_plus) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
  return {std::pow(beta, p_plus), std::pow(beta, -p_plus)};
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth,
                    double& worst) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    worst = std::max(worst, std::fabs(delta) / 15.0);
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, worst) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, worst);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::fabs(whole), std::numeric_limits<double>::min());
  double worst = 0.0;
  const double result =
      simpson_step(f, a, fa, b, fb, m, fm, whole, rel_tol * scale, max_depth, worst);
  if (worst > 0.0) {
    const double achieved = worst / std::max(std::fabs(result), scale);
    if (achieved > rel_tol) throw NumericError("adaptive Simpson did not converge", achieved);
  }
  if (!std::isfinite(result)) throw NumericError("adaptive Simpson produced a non-finite value", 0);
  return result;
}

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    out.push_back(count == 1 ? lo : std::exp(a + (b - a) * i / (count - 1)));
  }
  if (count > 1) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure verification

SamplingPlan SamplingPlan::with_points(std::vector<Point> x_points) {
  SamplingPlan plan;
  plan.s_values = log_space(1e-6, 1e3, 64);
  plan.x_points = std::move(x_points);
  return plan;
}

bool StructureReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* StructureReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

struct Margin {
  double worst = std::numeric_limits<double>::infinity();
  void update(double m) { worst = std::min(worst, m); }
};

// Relative second difference of s -> Phi(x, sqrt s)^power in log space.
double relative_second_difference(const PhiFamily& fam, const Point& x, double s, double power) {
  const double h = std::max(1e-6, 1e-6 * s);
  if (s - h <= 0.0) return 0.0;
  const double g0 = power * fam.log_big_phi(x, std::sqrt(s));
  const double gp = power * fam.log_big_phi(x, std::sqrt(s + h));
  const double gm = power * fam.log_big_phi(x, std::sqrt(s - h));
  return std::expm1(gp - g0) + std::expm1(gm - g0);
}

}  // namespace

StructureReport verify_structure(const PhiFamily& family, const SamplingPlan& plan) {
  StructureReport report;
  report.family = family.name();
  const double pm = family.p_minus();
  const double pp = family.p_plus();
  const double slack = kStructureSlack;

  Margin exponent_margin, sandwich, scaling, delta2, zero_increasing, normalization;
  Margin conv_sqrt, conv_pow;
  const bool sqrt_applicable = pm >= 2.0;

  for (const Point& x : plan.x_points) {
    const double phi_one = family.big_phi(x, 1.0);
    normalization.update(std::min((phi_one - family.c_minus()) / family.c_minus(),
                                  (family.c_plus() - phi_one) / family.c_plus()));
    if (family.unit_normalized()) normalization.update(phi_one == 1.0 ? 0.0 : -1.0);

    zero_increasing.update(family.big_phi(x, 0.0) == 0.0 ? 0.0 : -1.0);
    // Monotonicity is read in log space: at p = 64, Phi(1e-6) underflows to 0.
    double previous = -std::numeric_limits<double>::infinity();
    for (double s : plan.s_values) {
      const double lphi = family.log_phi(x, s);
      const double lbig = family.log_big_phi(x, s);
      zero_increasing.update(lbig > previous ? 0.0 : -1.0);
      previous = lbig;

      // The ratio s phi' / phi has no log form; samples where either factor
      // underflows carry no information and are skipped.
      const double dphi = family.dphi_ds(x, s);
      const double phi = family.phi(x, s);
      if (dphi >= std::numeric_limits<double>::min() && phi >= std::numeric_limits<double>::min()) {
        const double r1 = s * dphi / phi;
        exponent_margin.update(std::min((r1 - (pm - 1.0)) / pm, ((pp - 1.0) - r1) / pp));
      }

      const double r2 = std::exp(std::log(s) + lphi - lbig);
      sandwich.update(std::min((r2 - pm) / pm, (pp - r2) / pp));

      for (double rho : plan.rho_values) {
        const double diff = family.log_big_phi(x, rho * s) - lbig;
        const double lo = std::min(pm * std::log(rho), pp * std::log(rho));
        const double hi = std::max(pm * std::log(rho), pp * std::log(rho));
        scaling.update(std::min(diff - lo, hi - diff));
      }
      delta2.update(pp * std::log(2.0) - (family.log_big_phi(x, 2.0 * s) - lbig));

      if (sqrt_applicable) conv_sqrt.update(relative_second_difference(family, x, s, 1.0));
      conv_pow.update(relative_second_difference(family, x, s, 1.0 + plan.gamma));
    }
  }

  auto add = [&](const char* name, const Margin& m, double tol, bool applicable = true) {
    CheckResult c;
    c.name = name;
    c.applicable = applicable;
    c.worst_margin = applicable ? m.worst : 0.0;
    c.pass = !applicable || m.worst >= -tol;
    report.checks.push_back(c);
  };
  add("exponent_bounds", exponent_margin, slack);
  add("lieberman_sandwich", sandwich, slack);
  add("scaling_bounds", scaling, slack);
  add("delta2", delta2, slack);
  add("zero_and_increasing", zero_increasing, 0.0);
  add("normalization", normalization, slack);
  add("convexity_phi_sqrt", conv_sqrt, 1e-12, sqrt_applicable);
  add("convexity_phi_pow_sqrt", conv_pow, 1e-12, plan.gamma >= 1.0);
  return report;
}

}  // namespace philab
