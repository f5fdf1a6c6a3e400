#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "philab/types.hpp"

namespace philab {

// Values of s below this are treated as 0 by the power families.
inline constexpr double kPowerGuard = 1e-300;

enum class FamilyKind { ConstantPower, VariablePower, Piecewise, Custom };

const char* to_string(FamilyKind kind);

// A scalar exponent map x -> p(x) together with its gradient and range.
struct ExponentField {
  std::function<double(const Point&)> value;
  std::function<Vec2(const Point&)> gradient;
  double min_value = 0.0;
  double max_value = 0.0;
  std::string label;

  static ExponentField constant(double p);
  // Range is estimated on a (257^dim)-point lattice of [lower, upper]^dim including the corners.
  static ExponentField sampled(std::function<double(const Point&)> value,
                               std::function<Vec2(const Point&)> gradient, int dim, double lower,
                               double upper, std::string label);
};

// Evaluation backend of a family. The normalized quantities divide by phi(x, 1).
class PhiModel {
 public:
  virtual ~PhiModel() = default;

  virtual double phi(const Point& x, double s) const = 0;
  virtual double dphi_ds(const Point& x, double s) const = 0;
  virtual double big_phi(const Point& x, double s) const = 0;
  virtual double log_phi(const Point& x, double s) const;
  virtual double log_big_phi(const Point& x, double s) const;

  // Phi(x,s)/phi(x,1)
  virtual double energy_density(const Point& x, double s) const;
  // Phi(x,t)/phi(x,1) - Phi(x,s)/phi(x,1) given t - s; accurate when t is close to s.
  virtual double energy_density_change(const Point& x, double s, double t, double t_minus_s) const;
  // phi(x,s)/(s phi(x,1)), 0 at s = 0
  virtual double flux_coefficient(const Point& x, double s) const;
  // d/ds phi(x,s)/phi(x,1)
  virtual double curvature(const Point& x, double s) const;
  // a(x,s) = phi(x,s)/phi(x,1)
  virtual double source_density(const Point& x, double s) const;

  virtual std::optional<double> exponent(const Point& x) const;
  virtual std::optional<Vec2> lambda_drift(const Point& x, double s) const;
  virtual std::optional<Vec2> lambda_zero(const Point& x) const;
};

struct CustomSpec {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi_ds;
  std::optional<std::function<double(double)>> big_phi;  // quadrature when absent
  double p_minus = 2.0;
  double p_plus = 2.0;
  double c_minus = 1.0;
  double c_plus = 1.0;
  // Required: the limit of the x-derivative of a(x,s) as s -> 0.
  std::function<Vec2(const Point&)> lambda_zero;
  std::optional<std::function<Vec2(const Point&, double)>> lambda_drift;
};

// Value type over an immutable evaluation model. Every evaluator checks the
// result for finiteness and throws OverflowError naming (x, s) otherwise.
class PhiFamily {
 public:
  static PhiFamily constant_power(double p);
  // p_n(x) = n * base(x).
  static PhiFamily variable_power(ExponentField base, double n);
  static PhiFamily piecewise(PhiFamily inside, PhiFamily outside,
                             std::function<bool(const Point&)> is_inside, std::string label);
  static PhiFamily custom(CustomSpec spec);
  // phi(s) = s^(p-1) + s^(q-1) with Phi evaluated by quadrature.
  static PhiFamily sum_of_powers(double p, double q);

  FamilyKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  double c_minus() const { return c_minus_; }
  double c_plus() const { return c_plus_; }
  bool unit_normalized() const { return unit_normalized_; }
  // n for VariablePower, 1 otherwise.
  double scale_index() const { return scale_index_; }
  const std::optional<ExponentField>& exponent_field() const { return exponent_field_; }

  double phi(const Point& x, double s) const;
  double dphi_ds(const Point& x, double s) const;
  double big_phi(const Point& x, double s) const;
  double log_phi(const Point& x, double s) const;
  double log_big_phi(const Point& x, double s) const;
  double energy_density(const Point& x, double s) const;
  double flux_coefficient(const Point& x, double s) const;
  double curvature(const Point& x, double s) const;
  double source_density(const Point& x, double s) const;

  std::optional<double> exponent(const Point& x) const { return model_->exponent(x); }
  std::optional<Vec2> lambda_drift(const Point& x, double s) const;
  std::optional<Vec2> lambda_zero(const Point& x) const { return model_->lambda_zero(x); }
  bool has_lambda_drift() const { return has_drift_; }

  const PhiModel& model() const { return *model_; }

 private:
  PhiFamily() = default;

  FamilyKind kind_ = FamilyKind::ConstantPower;
  std::string name_;
  double p_minus_ = 2.0;
  double p_plus_ = 2.0;
  double c_minus_ = 1.0;
  double c_plus_ = 1.0;
  bool unit_normalized_ = true;
  bool has_drift_ = false;
  double scale_index_ = 1.0;
  std::optional<ExponentField> exponent_field_;
  std::shared_ptr<const PhiModel> model_;
};

// Phi*(x,t) = sup_{s >= 0} (t s - Phi(x,s)).
class ConjugatePhi {
 public:
  explicit ConjugatePhi(PhiFamily base, double bracket_growth = 2.0);

  double eval(const Point& x, double t) const;
  // Central difference of eval with step 1e-5 t.
  double derivative(const Point& x, double t) const;

  const PhiFamily& base() const { return base_; }
  double bracket_growth() const { return growth_; }

 private:
  PhiFamily base_;
  double growth_;
};

// beta = min{(c-)^(1/p-), (c+)^(-1/p-)}.
double normalization_beta(double c_minus, double c_plus, double p_minus);
// (c-, c+) = (beta^p+, beta^-p+).
std::pair<double, double> normalization_constants(double beta, double p_plus);

struct SamplingPlan {
  std::vector<double> s_values;
  std::vector<Point> x_points;
  std::vector<double> rho_values{0.1, 0.5, 2.0, 10.0};
  double gamma = 1.0;

  // 64 log-spaced s in [1e-6, 1e3].
  static SamplingPlan with_points(std::vector<Point> x_points);
};

struct CheckResult {
  std::string name;
  double worst_margin = 0.0;
  bool pass = true;
  bool applicable = true;
};

struct StructureReport {
  std::string family;
  std::vector<CheckResult> checks;
  bool all_pass() const;
  const CheckResult* find(const std::string& name) const;
};

// Relative slack applied to the exponent and scaling checks.
inline constexpr double kStructureSlack = 1e-9;

StructureReport verify_structure(const PhiFamily& family, const SamplingPlan& plan);

// Adaptive Simpson on [a, b]; throws NumericError when depth 40 does not reach rel_tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, int max_depth = 40);

// Log-spaced values lo..hi inclusive.
std::vector<double> log_space(double lo, double hi, int count);

}  // namespace philab
