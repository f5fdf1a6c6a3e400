#include "philab/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "philab/errors.hpp"
#include "philab/inequality.hpp"
#include "philab/orlicz.hpp"
#include "philab/rng.hpp"
#include "philab/variational.hpp"
#include "philab/viscosity.hpp"

namespace philab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string verdict_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.10g}", v);
}

SolveReport solve_or_throw(const EnergyProblem& problem, const std::optional<ScalarField>& warm,
                           const SolverOptions& opts = {}) {
  SolveReport rep = minimize(problem, warm, opts);
  if (!rep.converged) {
    throw NumericError(fmt::format("solver did not converge for {}: {}", problem.family.name(),
                                   rep.message),
                       rep.residual_sup);
  }
  return rep;
}

// Walks the sweep up to its last entry, warm starting each solve from the
// previous one. Cold starts at p = 64 stall: the weights vanish with the gradient.
SolveReport solve_continued(const ExperimentConfig& config, const GridDomain& domain,
                            const ScalarField& g, int sign, double eps,
                            std::optional<ScalarField> warm) {
  SolveReport rep;
  for (double p : config.p_sweep) {
    rep = solve_or_throw({make_family(config.family, config.domain, p), domain, g, sign, eps}, warm);
    warm = rep.solution;
  }
  return rep;
}

double sup_difference(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::fabs(a[k] - b[k]));
  return d;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

const Subdomain kAuditDisc = Subdomain::disc({0.5, 0.5}, 0.3);

PhiFamily disc_piecewise(double inside, double outside) {
  const Subdomain disc = kAuditDisc;
  return PhiFamily::piecewise(PhiFamily::constant_power(inside), PhiFamily::constant_power(outside),
                              [disc](const Point& x) { return disc.contains(x); }, disc.describe());
}

PhiFamily variable_family(double n) {
  ExponentField base = ExponentField::sampled([](const Point& x) { return 2.0 + x[0]; },
                                              [](const Point&) { return Vec2{1.0, 0.0}; }, 2, 0.0,
                                              1.0, "2+x1");
  return PhiFamily::variable_power(std::move(base), n);
}

std::vector<Point> lattice_points(int n) {
  std::vector<Point> pts;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) pts.push_back({i / double(n - 1), j / double(n - 1)});
  }
  return pts;
}

}  // namespace

std::string format_verdict(const Verdict& v) {
  return fmt::format("{} {} {} {}", v.pass ? "PASS" : "FAIL", v.id, verdict_real(v.measured),
                     verdict_real(v.bound));
}

bool ExperimentResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void write_result(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const CsvTable& t : result.tables) t.write(dir);
  std::ofstream f(dir / "verdict.txt", std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + (dir / "verdict.txt").string());
  for (const Verdict& v : result.verdicts) f << format_verdict(v) << '\n';
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

TrendReport decreasing_trend(const std::vector<double>& v, int allowed, double tolerance,
                             double abs_floor) {
  TrendReport r;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double rise = v[i] - v[i - 1];
    if (!(rise > abs_floor)) continue;
    ++r.inversions;
    const double rel = v[i - 1] > 0.0 ? rise / v[i - 1] : kInf;
    r.worst_inversion = std::max(r.worst_inversion, rel);
  }
  r.pass = r.inversions <= allowed && r.worst_inversion <= tolerance;
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  switch (config.id) {
    case ExperimentId::GammaEnergy: return run_gamma_energy(config);
    case ExperimentId::LimitConvergence: return run_limit_convergence(config);
    case ExperimentId::EpsSandwich: return run_eps_sandwich(config);
    case ExperimentId::SubdomainExtremal: return run_subdomain_extremal(config);
    case ExperimentId::InequalityFuzz: return run_inequality_fuzz(config);
    case ExperimentId::PoincareJump: return run_poincare_jump(config);
    case ExperimentId::StructureAudit: return run_structure_audit(config);
  }
  throw ConfigError("unknown experiment");
}

ExperimentResult run_gamma_energy(const ExperimentConfig& config) {
  ExperimentResult result;
  result.id = config.id;
  const GridDomain domain = make_domain(config.domain);
  const ScalarField g = make_boundary(config.boundary, domain);
  const double lip = lipschitz_of_boundary(g, domain);
  const std::vector<double> m_list{4.0, 8.0, static_cast<double>(domain.dim() + 1)};

  CsvTable table("energy_sweep.csv",
                 {"p", "p_minus", "energy", "measure_over_p", "iterations", "residual",
                  "grad_l4", "grad_l8", "grad_ldp1", "gradient_bound", "power_norm_lhs", "power_norm_rhs"});
  std::vector<double> energies;
  double worst_energy_ratio = 0.0;
  double worst_gradient_ratio = 0.0;
  bool gradient_applicable = true;
  bool power_norm_ok = true;
  SolverOptions opts;
  opts.m_list = m_list;
  std::optional<ScalarField> warm;
  for (double p : config.p_sweep) {
    const EnergyProblem problem{make_family(config.family, config.domain, p), domain, g, 0, 0.0};
    const SolveReport rep = solve_or_throw(problem, warm, opts);
    warm = rep.solution;
    const double pm = problem.family.p_minus();
    const GradientBoundCheck gb = check_gradient_bounds(problem, rep, m_list);
    gradient_applicable = gradient_applicable && gb.applicable;
    power_norm_ok = power_norm_ok && gb.power_norm_pass;
    if (gb.applicable) worst_gradient_ratio = std::max(worst_gradient_ratio, gb.worst_norm / gb.bound);
    energies.push_back(rep.final_energy);
    worst_energy_ratio = std::max(worst_energy_ratio, rep.final_energy * pm / domain.measure());

    // Norms with m > p- are not covered by the bound; they are still recorded.
    table.row()
        .add(p)
        .add(pm)
        .add(rep.final_energy)
        .add(domain.measure() / pm)
        .add(rep.iterations)
        .add(rep.residual_sup)
        .add(rep.lm_norms[0])
        .add(rep.lm_norms[1])
        .add(rep.lm_norms[2])
        .add(gb.bound)
        .add(gb.power_norm_lhs)
        .add(gb.power_norm_rhs)
        .done();
  }
  result.tables.push_back(std::move(table));

  if (lip <= 1.0 + 1e-12) {
    const bool trend = all_zero(energies) || strictly_decreasing(energies);
    Verdict v{"6", trend && worst_energy_ratio <= kEnergySlack, worst_energy_ratio, kEnergySlack,
              trend ? "energies strictly decreasing" : "energies not strictly decreasing"};
    result.verdicts.push_back(v);
  } else {
    const double ratio = energies.back() / energies.front();
    const bool trend = strictly_increasing(energies);
    Verdict v{"7", trend && ratio > kBlowupRatio, ratio, kBlowupRatio,
              trend ? "energies strictly increasing" : "energies not strictly increasing"};
    result.verdicts.push_back(v);
  }
  if (gradient_applicable) {
    result.verdicts.push_back({"8", worst_gradient_ratio <= 1.0 && power_norm_ok, worst_gradient_ratio, 1.0,
                               fmt::format("max norm/bound over the sweep, Lip(g) = {:.6g}", lip)});
  }
  return result;
}

ExperimentResult run_limit_convergence(const ExperimentConfig& config) {
  ExperimentResult result;
  result.id = config.id;
  const GridDomain domain = make_domain(config.domain);
  const ScalarField g = make_boundary(config.boundary, domain);

  const PhiFamily top = make_family(config.family, config.domain, config.p_sweep.back());
  const LimitOperator op = LimitOperator::from_family(top, domain);
  const SolveReport limit = solve_limit(op, domain, g);
  if (!limit.converged) {
    throw NumericError("limit solve did not converge: " + limit.message, limit.residual_sup);
  }

  CsvTable table("limit_sweep.csv", {"p", "p_minus", "p_plus", "sup_difference", "iterations", "residual"});
  std::vector<double> diffs;
  std::optional<ScalarField> warm;
  for (double p : config.p_sweep) {
    const EnergyProblem problem{make_family(config.family, config.domain, p), domain, g, 0, 0.0};
    const SolveReport rep = solve_or_throw(problem, warm);
    warm = rep.solution;
    diffs.push_back(sup_difference(rep.solution, limit.solution));
    table.row()
        .add(p)
        .add(problem.family.p_minus())
        .add(problem.family.p_plus())
        .add(diffs.back())
        .add(rep.iterations)
        .add(rep.residual_sup)
        .done();
  }
  result.tables.push_back(std::move(table));

  CsvTable lim("limit_solve.csv", {"lipschitz_lambda", "iterations", "update"});
  lim.row().add(op.lipschitz_lambda).add(limit.iterations).add(limit.residual_abs).done();
  result.tables.push_back(std::move(lim));

  const double bound = op.lipschitz_lambda == 0.0 ? kLimitBoundZeroDrift : kLimitBoundDrift;
  double scale = 1.0;
  for (double v : g.values) scale = std::max(scale, std::fabs(v));
  const TrendReport trend = decreasing_trend(diffs, 1, kInversionTolerance, 1e-9 * scale);
  result.verdicts.push_back(
      {"9", trend.pass && diffs.back() <= bound, diffs.back(), bound,
       fmt::format("{} inversion(s), worst {:.3g}, lambda Lipschitz {:.6g}", trend.inversions,
                   trend.worst_inversion, op.lipschitz_lambda)});
  return result;
}

ExperimentResult run_eps_sandwich(const ExperimentConfig& config) {
  ExperimentResult result;
  result.id = config.id;
  const GridDomain domain = make_domain(config.domain);
  const ScalarField g = make_boundary(config.boundary, domain);
  const double p = config.p_sweep.back();
  const PhiFamily family = make_family(config.family, config.domain, p);
  const double kappa = derive_kappa();

  const SolveReport mid = solve_continued(config, domain, g, 0, 0.0, std::nullopt);
  CsvTable table("sandwich.csv", {"eps", "p", "gap", "gap_bound", "ordering_violation", "scale",
                                  "gap_ratio", "iterations_upper", "iterations_lower"});
  std::optional<ScalarField> warm_up, warm_lo;
  double worst_fraction = 0.0;
  bool ordering = true;
  bool ratios = true;
  double previous_gap = 0.0;
  for (std::size_t i = 0; i < config.eps_list.size(); ++i) {
    const double eps = config.eps_list[i];
    SolveReport up, lo;
    if (i == 0) {
      up = solve_continued(config, domain, g, +1, eps, std::nullopt);
      lo = solve_continued(config, domain, g, -1, eps, std::nullopt);
    } else {
      up = solve_or_throw({family, domain, g, +1, eps}, warm_up);
      lo = solve_or_throw({family, domain, g, -1, eps}, warm_lo);
    }
    // With zero data u is linear in eps; the rescaled field is a close start otherwise.
    if (i + 1 < config.eps_list.size()) {
      const double scale = config.eps_list[i + 1] / eps;
      warm_up = up.solution;
      warm_lo = lo.solution;
      for (std::size_t k : domain.interior_nodes()) {
        (*warm_up)[k] = mid.solution[k] + scale * (up.solution[k] - mid.solution[k]);
        (*warm_lo)[k] = mid.solution[k] + scale * (lo.solution[k] - mid.solution[k]);
      }
    }
    const ComparisonReport cmp =
        comparison_audit(lo.solution, mid.solution, up.solution, domain, eps, kappa);
    ordering = ordering && cmp.ordering_pass;
    worst_fraction = std::max(worst_fraction, cmp.gap / cmp.bound);
    double ratio = std::numeric_limits<double>::quiet_NaN();
    if (i > 0) {
      ratio = cmp.gap > 0.0 ? previous_gap / cmp.gap : kInf;
      ratios = ratios && ratio >= kGapRatioMin && ratio <= kGapRatioMax;
    }
    previous_gap = cmp.gap;
    table.row()
        .add(eps)
        .add(p)
        .add(cmp.gap)
        .add(cmp.bound)
        .add(cmp.ordering_violation)
        .add(cmp.scale)
        .add(ratio)
        .add(up.iterations)
        .add(lo.iterations)
        .done();
  }
  result.tables.push_back(std::move(table));
  result.verdicts.push_back({"10", ordering && ratios && worst_fraction <= 1.0, worst_fraction, 1.0,
                             fmt::format("max gap/bound; ordering {}, ratios {}, kappa {:.10g}",
                                         ordering ? "ok" : "violated", ratios ? "ok" : "out of range",
                                         kappa)});
  return result;
}

ExperimentResult run_subdomain_extremal(const ExperimentConfig& config) {
  ExperimentResult result;
  result.id = config.id;
  if (config.family.kind != FamilySpecKind::Piecewise) {
    throw ConfigError("subdomain_extremal needs a piecewise family");
  }
  const GridDomain domain = make_domain(config.domain);
  const ScalarField g = make_boundary(config.boundary, domain);
  const int samples = 2;

  CsvTable table("subdomain_sweep.csv", {"p", "max_grad_inside", "proxy_mean", "proxy_max",
                                         "energy_outside", "iterations", "residual"});
  std::vector<double> proxies;
  std::vector<double> outside;
  double final_grad = 0.0;
  std::optional<ScalarField> warm;
  for (double p : config.p_sweep) {
    const EnergyProblem problem{make_family(config.family, config.domain, p), domain, g, 0, 0.0};
    const SolveReport rep = solve_or_throw(problem, warm);
    warm = rep.solution;

    double grad_inside = 0.0;
    for (std::size_t c = 0; c < domain.cell_count(); ++c) {
      if (!domain.in_subdomain_cell(c)) continue;
      for (int q = 0; q < samples; ++q) grad_inside = std::max(grad_inside, rep.gradient_field[samples * c + q]);
    }
    // Transmission proxy (|grad u| - 1) sgn(du/dnu), averaged over interface nodes.
    double sum = 0.0, worst = 0.0;
    for (std::size_t k : domain.interface_nodes()) {
      const Vec2 grad = centered_gradient(rep.solution, domain, k);
      const double dn = dot(grad, domain.interface_normal(k));
      const double sgn = dn > 0.0 ? 1.0 : (dn < 0.0 ? -1.0 : 0.0);
      const double v = std::fabs((norm(grad) - 1.0) * sgn);
      sum += v;
      worst = std::max(worst, v);
    }
    const double mean = sum / static_cast<double>(domain.interface_nodes().size());
    const auto cells = cell_energies(problem, rep.solution);
    double e_out = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!domain.in_subdomain_cell(c)) e_out += cells[c];
    }
    proxies.push_back(mean);
    outside.push_back(e_out);
    final_grad = grad_inside;
    table.row()
        .add(p)
        .add(grad_inside)
        .add(mean)
        .add(worst)
        .add(e_out)
        .add(rep.iterations)
        .add(rep.residual_sup)
        .done();
  }
  result.tables.push_back(std::move(table));
  const bool proxy_trend = strictly_decreasing(proxies);
  const bool bounded = std::all_of(outside.begin(), outside.end(), [](double e) { return std::isfinite(e); });
  result.verdicts.push_back(
      {"11", proxy_trend && bounded && final_grad <= kSubdomainGradientBound, final_grad,
       kSubdomainGradientBound,
       fmt::format("proxy mean {}, outside energy {}", proxy_trend ? "decreasing" : "not decreasing",
                   bounded ? "finite" : "unbounded")});
  return result;
}

ExperimentResult run_inequality_fuzz(const ExperimentConfig& config) {
  ExperimentResult result;
  result.id = config.id;
  FuzzPlan plan;
  plan.dims = config.fuzz.dims;
  plan.exponents = config.fuzz.exponents;
  plan.samples = config.fuzz.samples;
  plan.seed = config.seed;
  plan.gamma = config.fuzz.gamma;
  const std::vector<FuzzRow> rows = run_fuzz(plan);
  const double kappa = derive_kappa();

  CsvTable table("fuzz.csv", {"family", "d", "p", "samples", "violations", "worst_margin"});
  long violations = 0;
  for (const FuzzRow& r : rows) {
    violations += r.violations;
    table.row().add(r.family).add(r.dim).add(r.p).add(r.samples).add(r.violations).add(r.worst_margin).done();
  }
  result.tables.push_back(std::move(table));
  CsvTable k("kappa.csv", {"kappa", "reference"});
  k.row().add(kappa).add(1.0 / 12.0).done();
  result.tables.push_back(std::move(k));
  const bool kappa_ok = kappa >= 1.0 / 12.0 - 1e-9;
  result.verdicts.push_back({"4", violations == 0 && kappa_ok, static_cast<double>(violations), 0.0,
                             fmt::format("violations; kappa = {:.12g}", kappa)});
  return result;
}

ExperimentResult run_poincare_jump(const ExperimentConfig& config) {
  ExperimentResult result;
  result.id = config.id;
  CsvTable table("poincare.csv", {"h", "nodes", "trials", "skipped", "sup_ratio", "jump_condition"});
  std::vector<double> sups;
  bool jump_ok = true;
  const double extent = config.domain.upper - config.domain.lower;
  for (double h : config.poincare.h_list) {
    const int nodes = nodes_for_spacing(extent, h);
    const GridDomain domain = make_domain(config.domain, nodes);
    const PhiFamily family = make_family(config.family, config.domain, config.p_sweep.front());
    const JumpConditionReport jump = jump_condition(family, domain, config.poincare.delta);
    const PoincareReport rep = poincare_ratio(family, domain, config.poincare.trials, config.seed);
    jump_ok = jump_ok && jump.pass;
    sups.push_back(rep.sup_ratio);
    table.row()
        .add(h)
        .add(nodes)
        .add(config.poincare.trials)
        .add(rep.skipped)
        .add(rep.sup_ratio)
        .add(jump.pass)
        .done();
  }
  result.tables.push_back(std::move(table));
  const double hi = *std::max_element(sups.begin(), sups.end());
  const double lo = *std::min_element(sups.begin(), sups.end());
  const bool finite = std::all_of(sups.begin(), sups.end(), [](double s) { return std::isfinite(s) && s > 0.0; });
  const double variation = finite ? (hi - lo) / hi : kInf;
  result.verdicts.push_back({"12", finite && jump_ok && variation < kPoincareVariation, variation,
                             kPoincareVariation,
                             fmt::format("relative spread of sup ratios; jump condition {}",
                                         jump_ok ? "holds" : "fails")});
  return result;
}

std::vector<PhiFamily> audit_families(bool include_custom) {
  std::vector<PhiFamily> out;
  for (double p : {2.0, 4.0, 8.0, 64.0}) out.push_back(PhiFamily::constant_power(p));
  out.push_back(variable_family(1.0));
  out.push_back(variable_family(16.0));
  out.push_back(disc_piecewise(3.0, 2.5));
  out.push_back(disc_piecewise(64.0, 4.0));
  if (include_custom) out.push_back(PhiFamily::sum_of_powers(2.0, 4.0));
  return out;
}

AuditPart audit_structure() {
  AuditPart part{CsvTable("structure.csv", {"family", "check", "applicable", "worst_margin", "pass"}), {}};
  const SamplingPlan plan = SamplingPlan::with_points(lattice_points(9));
  int failures = 0;
  for (const PhiFamily& f : audit_families(true)) {
    const StructureReport rep = verify_structure(f, plan);
    for (const CheckResult& c : rep.checks) {
      if (c.applicable && !c.pass) ++failures;
      part.table.row().add(f.name()).add(c.name).add(c.applicable).add(c.worst_margin).add(c.pass).done();
    }
  }
  part.verdict = {"1", failures == 0, static_cast<double>(failures), 0.0, "failing checks"};
  return part;
}

double brute_force_conjugate(const PhiFamily& family, const Point& x, double t) {
  auto objective = [&](double s) { return t * s - family.big_phi(x, s); };
  double hi = 1.0;
  while (objective(hi) > 0.0) hi *= 2.0;
  double lo = 0.0;
  const int n = 2000;
  double best = 0.0;
  for (int level = 0; level < 6; ++level) {
    const double step = (hi - lo) / n;
    int arg = 0;
    best = -kInf;
    for (int i = 0; i <= n; ++i) {
      const double v = objective(lo + i * step);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    const double center = lo + arg * step;
    lo = std::max(0.0, center - step);
    hi = center + step;
  }
  return std::max(best, 0.0);
}

AuditPart audit_conjugate() {
  AuditPart part{CsvTable("conjugate.csv", {"family", "samples", "ratio_min", "ratio_max", "lower_bound",
                                            "upper_bound", "bound_violations", "brute_force_rel_error"}),
                 {}};
  const Point x{0.5, 0.5};
  const auto ts = log_space(1e-2, 1e2, 64);
  int violations = 0;
  double worst_brute = 0.0;
  for (const PhiFamily& f : audit_families(true)) {
    const ConjugatePhi conj(f);
    const double lower = f.p_plus() / (f.p_plus() - 1.0);
    const double upper = f.p_minus() / (f.p_minus() - 1.0);
    double rmin = kInf, rmax = -kInf, brute = 0.0;
    int bad = 0;
    const bool power = f.kind() != FamilyKind::Custom;
    for (double t : ts) {
      const double value = conj.eval(x, t);
      const double r = t * conj.derivative(x, t) / value;
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      if (r < lower - kConjugateBoundSlack || r > upper + kConjugateBoundSlack) ++bad;
      if (power) {
        const double b = brute_force_conjugate(f, x, t);
        brute = std::max(brute, std::fabs(value - b) / b);
      }
    }
    violations += bad;
    worst_brute = std::max(worst_brute, brute);
    part.table.row()
        .add(f.name())
        .add(static_cast<long>(ts.size()))
        .add(rmin)
        .add(rmax)
        .add(lower)
        .add(upper)
        .add(bad)
        .add(power ? brute : std::numeric_limits<double>::quiet_NaN())
        .done();
  }
  part.verdict = {"2", violations == 0 && worst_brute <= kConjugateBruteTolerance, worst_brute,
                  kConjugateBruteTolerance,
                  fmt::format("worst brute-force relative error; {} bound violation(s)", violations)};
  return part;
}

AuditPart audit_luxemburg(std::uint64_t seed, int fields) {
  AuditPart part{CsvTable("luxemburg.csv", {"family", "case", "count", "worst", "violations"}), {}};
  double worst_closed = 0.0;
  {
    const GridDomain box(2, 17, 0.0, 2.0);
    for (double p : {2.0, 4.0, 8.0, 64.0}) {
      const PhiFamily f = PhiFamily::constant_power(p);
      double worst = 0.0;
      for (double c : {0.5, 3.0}) {
        const ScalarField u = ScalarField::sample(box, [c](const Point&) { return c; }, FieldRole::Test);
        const double expected = c * std::pow(box.measure(), 1.0 / p);
        worst = std::max(worst, std::fabs(luxemburg_norm(f, box, u) - expected) / expected);
      }
      worst_closed = std::max(worst_closed, worst);
      part.table.row().add(f.name()).add("constant_field").add(2).add(worst).add(worst > kLuxemburgTolerance ? 1 : 0).done();
    }
  }
  long violations = 0;
  const GridDomain dom(2, 17, 0.0, 1.0);
  for (const PhiFamily& f : audit_families(false)) {
    long bad = 0;
    double worst = -kInf;
    for (int t = 0; t < fields; ++t) {
      ScalarField u = random_sine_field(dom, seed, static_cast<std::uint64_t>(t));
      Stream rng(seed, 1000000u + static_cast<std::uint64_t>(t));
      const double amp = std::pow(10.0, rng.uniform(-2.0, 2.0));
      for (double& v : u.values) v *= amp;
      const double m = modular(f, dom, u);
      const double n = luxemburg_norm(f, dom, u);
      if (n == 0.0) continue;
      const double a = std::pow(n, f.p_minus()), b = std::pow(n, f.p_plus());
      const double lo = std::min(a, b), hi = std::max(a, b);
      // Margin relative to the modular; bisection width 1e-10 propagates as p+ 1e-10.
      const double margin = std::min(m - lo, hi - m) / m;
      const double slack = 2.0 * f.p_plus() * 1e-10;
      if (margin < -slack) ++bad;
      worst = std::max(worst, -margin);
    }
    violations += bad;
    part.table.row().add(f.name()).add("modular_sandwich").add(fields).add(worst).add(bad).done();
  }
  part.verdict = {"3", violations == 0 && worst_closed <= kLuxemburgTolerance, worst_closed,
                  kLuxemburgTolerance,
                  fmt::format("worst closed-form relative error; {} sandwich violation(s)", violations)};
  return part;
}

AuditPart audit_residual(std::uint64_t seed, int nodes) {
  AuditPart part{CsvTable("residual_fd.csv", {"family", "nodes", "worst_rel_error"}), {}};
  GridDomain dom(2, 17, 0.0, 1.0);
  dom.set_subdomain(kAuditDisc);
  const int m = dom.cells_per_axis();
  const ScalarField g = ScalarField::sample(dom, [](const Point& x) { return x[0]; });
  const ScalarField wiggle = random_sine_field(dom, seed, 0);
  ScalarField u = g;
  for (std::size_t k = 0; k < u.size(); ++k) u[k] += 0.05 * wiggle[k];

  double worst_all = 0.0;
  for (const PhiFamily& f : audit_families(true)) {
    const EnergyProblem problem{f, dom, g, 0, 0.0};
    const ScalarField r = euler_residual(problem, u);
    Stream rng(seed, 7);
    double worst = 0.0;
    for (int n = 0; n < nodes; ++n) {
      const auto& interior = dom.interior_nodes();
      const std::size_t k = interior[static_cast<std::size_t>(rng.integer(0, static_cast<int>(interior.size()) - 1))];
      const int i = dom.node_i(k), j = dom.node_j(k);
      const std::size_t touching[4] = {
          static_cast<std::size_t>((i - 1) + (j - 1) * m), static_cast<std::size_t>(i + (j - 1) * m),
          static_cast<std::size_t>((i - 1) + j * m), static_cast<std::size_t>(i + j * m)};
      // Only the cells touching node k change; summing them avoids cancellation.
      auto local = [&](double shift) {
        ScalarField v = u;
        v[k] += shift;
        const auto cells = cell_energies(problem, v);
        double s = 0.0;
        for (std::size_t c : touching) s += cells[c];
        return s;
      };
      const double d = 1e-4 * dom.h();
      const double fd = (-local(2 * d) + 8 * local(d) - 8 * local(-d) + local(-2 * d)) / (12 * d);
      const double exact = r[k] * dom.cell_volume();
      worst = std::max(worst, std::fabs(fd - exact) / std::max(std::fabs(exact), std::fabs(fd)));
    }
    worst_all = std::max(worst_all, worst);
    part.table.row().add(f.name()).add(nodes).add(worst).done();
  }
  part.verdict = {"5", worst_all <= kResidualTolerance, worst_all, kResidualTolerance,
                  "worst relative error over families and nodes"};
  return part;
}

ExperimentResult run_structure_audit(const ExperimentConfig& config) {
  ExperimentResult result;
  result.id = config.id;
  for (AuditPart part : {audit_structure(), audit_conjugate(), audit_luxemburg(config.seed),
                         audit_residual(config.seed)}) {
    result.tables.push_back(std::move(part.table));
    result.verdicts.push_back(std::move(part.verdict));
  }
  return result;
}

}  // namespace philab
