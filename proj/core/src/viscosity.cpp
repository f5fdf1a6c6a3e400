#include "philab/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "philab/errors.hpp"

namespace philab {

LimitOperator LimitOperator::zero() {
  LimitOperator op;
  op.lambda = [](const Point&, double) { return Vec2{0.0, 0.0}; };
  op.lipschitz_lambda = 0.0;
  return op;
}

LimitOperator LimitOperator::from_family(const PhiFamily& family, const GridDomain& domain) {
  if (!family.has_lambda_drift()) throw DomainError("family '" + family.name() + "' has no drift");
  LimitOperator op;
  op.lambda = [family](const Point& x, double s) {
    return family.lambda_drift(x, s).value_or(Vec2{0.0, 0.0});
  };
  double lip = 0.0;
  if (family.exponent_field() && family.kind() != FamilyKind::Piecewise) {
    const ExponentField& p = *family.exponent_field();
    for (std::size_t k = 0; k < domain.node_count(); ++k) {
      const Point x = domain.node_point(k);
      lip = std::max(lip, norm(p.gradient(x)) / p.value(x));
    }
  } else {
    // Difference quotient at a = 1 + 1e-6 over the nodes and a log grid of s.
    const double a = 1.0 + 1e-6;
    for (std::size_t k = 0; k < domain.node_count(); ++k) {
      const Point x = domain.node_point(k);
      for (double s : log_space(1e-3, 1e3, 13)) {
        const Vec2 t1 = op.theta(x, a * s);
        const Vec2 t0 = op.theta(x, s);
        lip = std::max(lip, std::hypot(t1[0] - t0[0], t1[1] - t0[1]) / (a - 1.0));
      }
    }
  }
  op.lipschitz_lambda = lip;
  return op;
}

Vec2 LimitOperator::theta(const Point& x, double s) const {
  if (s <= 0.0) return Vec2{0.0, 0.0};
  const Vec2 l = lambda(x, s);
  return Vec2{l[0] / s, l[1] / s};
}

LambdaAssumptionReport check_lambda_assumptions(const LimitOperator& op, const GridDomain& domain) {
  LambdaAssumptionReport rep;
  const auto s_values = log_space(1e-4, 1e4, 17);
  const double a_values[] = {1.001, 1.1, 1.37, 1.5, 1.9, 1.999};
  for (std::size_t k = 0; k < domain.node_count(); ++k) {
    const Point x = domain.node_point(k);
    for (double s : s_values) {
      const Vec2 t0 = op.theta(x, s);
      for (double a : a_values) {
        const Vec2 t1 = op.theta(x, a * s);
        rep.worst_lipschitz_ratio =
            std::max(rep.worst_lipschitz_ratio, std::hypot(t1[0] - t0[0], t1[1] - t0[1]) / (a - 1.0));
      }
    }
    const double tiny = 1e-12;
    const Vec2 l = op.lambda(x, tiny);
    rep.small_s_value = std::max(rep.small_s_value, tiny * tiny * norm(l));
  }
  rep.lipschitz_pass = rep.worst_lipschitz_ratio <= op.lipschitz_lambda * (1.0 + 1e-9) + 1e-15;
  rep.small_s_pass = rep.small_s_value <= 1e-20;
  return rep;
}

namespace {

struct Offset {
  int di;
  int dj;
};

// Primitive lattice directions with max(|di|, |dj|) <= radius, sorted for a fixed tie order.
std::vector<Offset> stencil_offsets(int dim, int radius) {
  std::vector<Offset> out;
  if (dim == 1) return {{-1, 0}, {1, 0}};
  for (int dj = -radius; dj <= radius; ++dj)
    for (int di = -radius; di <= radius; ++di) {
      if (di == 0 && dj == 0) continue;
      if (std::gcd(di, dj) != 1) continue;
      out.push_back({di, dj});
    }
  return out;
}

const std::vector<Offset>& cached_offsets(int dim, int radius) {
  static const std::vector<Offset> one = stencil_offsets(1, 1);
  static const std::vector<Offset> r1 = stencil_offsets(2, 1);
  static const std::vector<Offset> r2 = stencil_offsets(2, 2);
  static const std::vector<Offset> r3 = stencil_offsets(2, 3);
  if (dim == 1) return one;
  switch (radius) {
    case 1: return r1;
    case 2: return r2;
    case 3: return r3;
    default: throw DomainError("stencil radius must be 1, 2 or 3");
  }
}

void require_interior(const GridDomain& domain, std::size_t node) {
  if (node >= domain.node_count() || domain.is_boundary(node))
    throw DomainError("stencil evaluation needs an interior node");
}

}  // namespace

StencilSlopes stencil_slopes(const ScalarField& u, const GridDomain& domain, std::size_t node,
                             int radius) {
  require_interior(domain, node);
  const int i = domain.node_i(node);
  const int j = domain.node_j(node);
  const double h = domain.h();
  const double center = u[node];
  StencilSlopes out;
  out.up = -std::numeric_limits<double>::infinity();
  out.down = -std::numeric_limits<double>::infinity();
  const int n = domain.n();
  const int jmax = domain.dim() == 1 ? 0 : n - 1;
  for (const Offset& o : cached_offsets(domain.dim(), radius)) {
    const int a = i + o.di;
    const int b = j + o.dj;
    // Directions leaving the box are dropped; the rest keep the operator monotone.
    if (a < 0 || a >= n || b < 0 || b > jmax) continue;
    const std::size_t q = domain.node_index(a, b);
    const double dist = h * std::hypot(double(o.di), double(o.dj));
    const double rise = (u[q] - center) / dist;
    if (rise > out.up) {
      out.up = rise;
      out.up_distance = dist;
    }
    if (-rise > out.down) {
      out.down = -rise;
      out.down_distance = dist;
    }
  }
  return out;
}

double infinity_laplacian(const ScalarField& u, const GridDomain& domain, std::size_t node,
                          int radius) {
  const StencilSlopes s = stencil_slopes(u, domain, node, radius);
  return 2.0 * (s.up - s.down) / (s.up_distance + s.down_distance);
}

double monotone_slope_operator(const ScalarField& u, const GridDomain& domain, std::size_t node,
                               int radius) {
  const StencilSlopes s = stencil_slopes(u, domain, node, radius);
  return (s.up - s.down) / domain.h();
}

Vec2 centered_gradient(const ScalarField& u, const GridDomain& domain, std::size_t node) {
  require_interior(domain, node);
  const int i = domain.node_i(node);
  const int j = domain.node_j(node);
  const double inv = 0.5 / domain.h();
  Vec2 g{(u[domain.node_index(i + 1, j)] - u[domain.node_index(i - 1, j)]) * inv, 0.0};
  if (domain.dim() == 2)
    g[1] = (u[domain.node_index(i, j + 1)] - u[domain.node_index(i, j - 1)]) * inv;
  return g;
}

namespace {

// Length (in units of h) of the stencil direction along angle theta, linearly
// interpolated in angle between the two available directions that bracket it.
// Exact along stencil directions and continuous in theta, so the frozen drift
// coefficients cannot flip between rounds when the gradient sits on a bisector.
double interpolated_length(const GridDomain& domain, std::size_t node, int radius, double theta) {
  const int i = domain.node_i(node);
  const int j = domain.node_j(node);
  const int n = domain.n();
  constexpr double kTwoPi = 6.283185307179586;
  // Angles measured counterclockwise from theta, in [0, 2 pi): the smallest is
  // the next direction above theta, the largest the last one below it.
  double above = kTwoPi, above_len = 1.0;
  double below = 0.0, below_len = 1.0;
  for (const Offset& o : cached_offsets(2, radius)) {
    const int a = i + o.di;
    const int b = j + o.dj;
    if (a < 0 || a >= n || b < 0 || b >= n) continue;
    const double len = std::hypot(double(o.di), double(o.dj));
    double rel = std::atan2(double(o.dj), double(o.di)) - theta;
    rel -= kTwoPi * std::floor(rel / kTwoPi);
    if (rel == 0.0) return len;
    if (rel < above) {
      above = rel;
      above_len = len;
    }
    if (rel > below) {
      below = rel;
      below_len = len;
    }
  }
  const double gap_below = kTwoPi - below;
  const double span = above + gap_below;
  if (!(span > 0.0)) return 1.0;
  return below_len + (gap_below / span) * (above_len - below_len);
}

double aligned_distance_factor(const GridDomain& domain, std::size_t node, int radius,
                               const Vec2& g) {
  if (domain.dim() == 1) return 1.0;
  const double theta = std::atan2(g[1], g[0]);
  constexpr double kPi = 3.141592653589793;
  return 0.5 * (interpolated_length(domain, node, radius, theta) +
                interpolated_length(domain, node, radius, theta + kPi));
}

// Per-node drift coefficients: b = Theta(x, |grad u|) at the centered gradient
// (0 below the clamp) and the aligned distance factor.
struct DriftCoefficients {
  std::vector<Vec2> b;
  std::vector<double> factor;
};

DriftCoefficients drift_coefficients(const LimitOperator& op, const GridDomain& domain,
                                     const ScalarField& u, int radius) {
  DriftCoefficients out;
  out.b.assign(domain.node_count(), Vec2{0.0, 0.0});
  out.factor.assign(domain.node_count(), 1.0);
  for (std::size_t k : domain.interior_nodes()) {
    const Vec2 g = centered_gradient(u, domain, k);
    const double s = norm(g);
    if (s < kDriftClamp) continue;
    out.b[k] = op.theta(domain.node_point(k), s);
    out.factor[k] = aligned_distance_factor(domain, k, radius, g);
  }
  return out;
}

// Upwinded <b, grad u>; weight receives sum |b_i| / h, the diagonal it removes.
double upwind_drift(const Vec2& b, const GridDomain& domain, const ScalarField& u,
                    std::size_t node, double* weight) {
  const int i = domain.node_i(node);
  const int j = domain.node_j(node);
  const double inv_h = 1.0 / domain.h();
  double out = 0.0;
  *weight = 0.0;
  for (int c = 0; c < domain.dim(); ++c) {
    if (b[c] == 0.0) continue;
    const int step = b[c] > 0.0 ? 1 : -1;
    const std::size_t q = c == 0 ? domain.node_index(i + step, j) : domain.node_index(i, j + step);
    out += std::fabs(b[c]) * (u[q] - u[node]) * inv_h;
    *weight += std::fabs(b[c]) * inv_h;
  }
  return out;
}

// (up - down) / (h factor) + upwinded drift, the operator whose zero the
// iteration finds.
double scheme_value(const DriftCoefficients& dc, const GridDomain& domain, const ScalarField& u,
                    std::size_t node, int radius) {
  const StencilSlopes s = stencil_slopes(u, domain, node, radius);
  double weight = 0.0;
  const double d = upwind_drift(dc.b[node], domain, u, node, &weight);
  return (s.up - s.down) / (domain.h() * dc.factor[node]) + d;
}

}  // namespace

std::vector<double> limit_residual(const LimitOperator& op, const GridDomain& domain,
                                   const ScalarField& u, int radius) {
  require_compatible(domain, u);
  const DriftCoefficients dc = drift_coefficients(op, domain, u, radius);
  std::vector<double> r(domain.node_count(), 0.0);
  for (std::size_t k : domain.interior_nodes()) r[k] = scheme_value(dc, domain, u, k, radius);
  return r;
}

SolveReport solve_limit(const LimitOperator& op, const GridDomain& domain, const ScalarField& g,
                        const LimitOptions& opts) {
  require_compatible(domain, g);
  double g_sup = 0.0;
  for (double v : g.values) g_sup = std::max(g_sup, std::fabs(v));
  const double tol = opts.tol.value_or(1e-10 * g_sup);
  const double h = domain.h();
  const double tau = 0.25 * h * h;
  const int radius = opts.stencil_radius;

  ScalarField u = g;
  u.role = FieldRole::Solution;
  ScalarField next = u;
  SolveReport report;
  double update = 0.0;
  long it = 0;
  // Outer rounds freeze the drift coefficients; each inner Jacobi loop then
  // iterates a monotone map and settles. A round whose first sweep already
  // meets the tolerance is a fixed point of the full scheme.
  while (it < opts.max_iters && !report.converged) {
    const DriftCoefficients dc = drift_coefficients(op, domain, u, radius);
    for (long inner = 0; it < opts.max_iters; ++inner) {
      update = 0.0;
      for (std::size_t k : domain.interior_nodes()) {
        const StencilSlopes s = stencil_slopes(u, domain, k, radius);
        double weight = 0.0;
        const double d = upwind_drift(dc.b[k], domain, u, k, &weight);
        // Scaling by the distance factor is applied to the drift so the
        // slope part stays (up - down) / h, stable at tau = h^2 / 4.
        const double v = (s.up - s.down) / h + dc.factor[k] * d;
        const double tau_k = tau / (1.0 + 2.0 * tau * dc.factor[k] * weight);
        next[k] = u[k] + tau_k * v;
        update = std::max(update, std::fabs(tau_k * v));
      }
      std::swap(u.values, next.values);
      ++it;
      if (update <= tol) {
        if (inner == 0) report.converged = true;
        break;
      }
    }
  }
  if (!report.converged) report.message = "iteration cap reached";
  const auto r = limit_residual(op, domain, u, radius);
  for (double v : r) report.residual_abs = std::max(report.residual_abs, std::fabs(v));
  report.residual_sup = update;
  report.iterations = it;
  report.solution = std::move(u);
  return report;
}

// ---------------------------------------------------------------------------
// zeta

void ZetaParams::validate() const {
  if (!(alpha > 0.0)) throw DomainError("zeta needs alpha > 0");
  if (!(A > 1.0)) throw DomainError("zeta needs A > 1");
}

namespace {
void require_range(const ZetaParams& z, double s) {
  if (z.alpha * s > 700.0) throw OverflowError("zeta argument alpha*s exceeds 700; rescale the field");
}
}  // namespace

double ZetaParams::zeta_minus_identity(double s) const {
  require_range(*this, s);
  return std::log1p((A - 1.0) * -std::expm1(-alpha * s)) / alpha;
}

double ZetaParams::zeta(double s) const { return s + zeta_minus_identity(s); }

double ZetaParams::zeta_prime_minus_one(double s) const {
  require_range(*this, s);
  const double e = std::exp(-alpha * s);
  return (A - 1.0) * e / (A - (A - 1.0) * e);
}

double ZetaParams::zeta_prime(double s) const { return 1.0 + zeta_prime_minus_one(s); }

double ZetaParams::zeta_second(double s) const {
  return -alpha * zeta_prime(s) * zeta_prime_minus_one(s);
}

double ZetaParams::margin(double epsilon, double lambda, double v_sup) const {
  return epsilon * epsilon * epsilon * (alpha * epsilon - lambda) * zeta_prime_minus_one(v_sup);
}

ZetaResult zeta_transform(const ScalarField& v, const ZetaParams& params) {
  params.validate();
  ZetaResult out;
  out.field = v;
  out.min_shift = std::numeric_limits<double>::infinity();
  out.min_slope_excess = std::numeric_limits<double>::infinity();
  bool any_positive = false;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double s = v[k];
    if (!(s >= 0.0)) throw DomainError("zeta transform needs a nonnegative field; shift it first");
    const double shift = params.zeta_minus_identity(s);
    out.field[k] = s + shift;
    if (s > 0.0) {
      any_positive = true;
      const double excess = params.zeta_prime_minus_one(s);
      out.max_shift = std::max(out.max_shift, shift);
      out.min_shift = std::min(out.min_shift, shift);
      out.max_slope_excess = std::max(out.max_slope_excess, excess);
      out.min_slope_excess = std::min(out.min_slope_excess, excess);
    }
  }
  if (!any_positive) {
    out.min_shift = 0.0;
    out.min_slope_excess = 0.0;
    return out;
  }
  out.certificates_pass = out.min_shift > 0.0 && out.max_shift < (params.A - 1.0) / params.alpha &&
                          out.min_slope_excess > 0.0 && out.max_slope_excess < params.A - 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// comparison

double uniqueness_gap_bound(const GridDomain& domain, double epsilon, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  return 4.0 * (1.0 + domain.measure()) * domain.diameter() * epsilon / kappa;
}

ComparisonReport comparison_audit(const ScalarField& u_lower, const ScalarField& u_mid,
                                  const ScalarField& u_upper, const GridDomain& domain,
                                  double epsilon, double kappa) {
  require_compatible(domain, u_lower);
  require_compatible(domain, u_mid);
  require_compatible(domain, u_upper);
  for (std::size_t k : domain.boundary_nodes())
    if (u_lower[k] != u_mid[k] || u_mid[k] != u_upper[k])
      throw DomainError("comparison fields differ on the boundary");
  ComparisonReport rep;
  double top = 1.0;
  for (std::size_t k = 0; k < domain.node_count(); ++k)
    top = std::max({top, std::fabs(u_lower[k]), std::fabs(u_mid[k]), std::fabs(u_upper[k])});
  rep.scale = top;
  for (std::size_t k = 0; k < domain.node_count(); ++k) {
    rep.ordering_violation =
        std::max({rep.ordering_violation, u_lower[k] - u_mid[k], u_mid[k] - u_upper[k]});
    rep.gap = std::max(rep.gap, u_upper[k] - u_lower[k]);
  }
  rep.ordering_pass = rep.ordering_violation <= 1e-10 * rep.scale;
  rep.bound = uniqueness_gap_bound(domain, epsilon, kappa);
  rep.gap_pass = rep.gap <= rep.bound;
  return rep;
}

}  // namespace philab
