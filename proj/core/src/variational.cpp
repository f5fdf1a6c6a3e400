#include "philab/variational.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "philab/errors.hpp"

namespace philab {

void EnergyProblem::validate() const {
  require_compatible(domain, g);
  if (source_sign < -1 || source_sign > 1) throw DomainError("source_sign must be -1, 0 or 1");
  if (source_sign != 0 && !(epsilon > 0.0))
    throw DomainError("epsilon must be positive when a source term is present");
  if (epsilon < 0.0) throw DomainError("epsilon must be nonnegative");
  if (family.kind() == FamilyKind::Piecewise && !domain.subdomain())
    throw DomainError("piecewise family requires a subdomain mask on the grid");
  if (family.p_minus() < 2.0)
    throw DomainError("the variational solver requires p_minus >= 2");
}

namespace {

// Each 2D cell is split along its (1,0)-(0,1) diagonal into two triangles with
// weight 1/2; the gradient on a triangle uses the two cell edges at its right
// angle. This is the linear finite element on the standard triangulation: p = 2
// gives the 5-point Laplacian and the triangles are nonobtuse, so the discrete
// maximum principle holds. 1D cells carry one sample.
struct QuadEdges {
  std::size_t ax, bx, ay, by;
};

int quad_count(const GridDomain& dom) { return dom.dim() == 1 ? 1 : 2; }

QuadEdges quad_edges(const GridDomain& dom, std::size_t c, int q) {
  const auto k = dom.cell_corners(c);
  if (dom.dim() == 1) return {k[0], k[1], k[0], k[0]};
  if (q == 0) return {k[0], k[1], k[0], k[2]};  // triangle at corner (0,0)
  return {k[2], k[3], k[1], k[3]};               // triangle at corner (1,1)
}

Vec2 quad_gradient(const GridDomain& dom, const QuadEdges& e, const std::vector<double>& u,
                   double inv_h) {
  Vec2 g{(u[e.bx] - u[e.ax]) * inv_h, 0.0};
  if (dom.dim() == 2) g[1] = (u[e.by] - u[e.ay]) * inv_h;
  return g;
}

// Per-problem constants: cell centers, triangle stencils and source densities.
struct Workspace {
  const EnergyProblem& problem;
  int quads;
  double weight;  // 1 / quads
  std::vector<Point> centers;
  std::vector<QuadEdges> edges;  // cell-major, quads per cell
  std::vector<double> source;    // sign * a(x_c, eps)

  explicit Workspace(const EnergyProblem& p)
      : problem(p), quads(quad_count(p.domain)), weight(1.0 / quad_count(p.domain)) {
    const auto& dom = p.domain;
    centers.resize(dom.cell_count());
    source.assign(dom.cell_count(), 0.0);
    edges.reserve(dom.cell_count() * quads);
    for (std::size_t c = 0; c < dom.cell_count(); ++c) {
      centers[c] = dom.cell_center(c);
      for (int q = 0; q < quads; ++q) edges.push_back(quad_edges(dom, c, q));
      if (p.source_sign != 0)
        source[c] = p.source_sign * p.family.source_density(centers[c], p.epsilon);
    }
  }

  std::size_t cell_of(std::size_t e) const { return e / static_cast<std::size_t>(quads); }

  std::vector<Vec2> gradients(const ScalarField& u) const {
    const double inv_h = 1.0 / problem.domain.h();
    std::vector<Vec2> g(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
      g[e] = quad_gradient(problem.domain, edges[e], u.values, inv_h);
    return g;
  }

  // Energy of each cell without the h^d factor; entries may be +inf.
  std::vector<double> cell_terms(const ScalarField& u) const {
    const auto& dom = problem.domain;
    const PhiModel& model = problem.family.model();
    const auto grad = gradients(u);
    const auto avg = cell_averages(u, dom);
    std::vector<double> terms(dom.cell_count());
    for (std::size_t c = 0; c < dom.cell_count(); ++c) {
      double f = 0.0;
      for (int q = 0; q < quads; ++q) f += model.energy_density(centers[c], norm(grad[c * quads + q]));
      terms[c] = weight * f - source[c] * avg[c];
    }
    return terms;
  }

  // +inf on overflow; worst receives the offending cell.
  double energy(const ScalarField& u, std::size_t* worst = nullptr) const {
    const auto terms = cell_terms(u);
    for (std::size_t c = 0; c < terms.size(); ++c) {
      if (!std::isfinite(terms[c])) {
        if (worst) *worst = c;
        return std::numeric_limits<double>::infinity();
      }
    }
    return pairwise_sum(terms) * problem.domain.cell_volume();
  }

  struct CellState {
    std::vector<Vec2> grad;  // per gradient sample
    std::vector<double> psi;
  };

  CellState cells(const ScalarField& u) const {
    CellState st;
    st.grad = gradients(u);
    st.psi.resize(st.grad.size());
    const PhiModel& model = problem.family.model();
    for (std::size_t e = 0; e < st.grad.size(); ++e) {
      st.psi[e] = model.flux_coefficient(centers[cell_of(e)], norm(st.grad[e]));
      if (!std::isfinite(st.psi[e])) {
        std::ostringstream os;
        os.precision(17);
        os << "flux overflow in cell " << cell_of(e) << " with |grad u|=" << norm(st.grad[e]);
        throw OverflowError(os.str());
      }
    }
    return st;
  }

  // Energy gradient divided by h^d; boundary entries 0. When magnitude is
  // given it receives, per node, the sum of absolute values of the terms.
  std::vector<double> residual(const CellState& st, std::vector<double>* magnitude = nullptr) const {
    const auto& dom = problem.domain;
    const double inv_h = 1.0 / dom.h();
    std::vector<double> r(dom.node_count(), 0.0);
    std::vector<double> mag;
    if (magnitude) mag.assign(dom.node_count(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const QuadEdges& q = edges[e];
      const double fx = weight * st.psi[e] * st.grad[e][0] * inv_h;
      r[q.bx] += fx;
      r[q.ax] -= fx;
      if (magnitude) {
        mag[q.bx] += std::fabs(fx);
        mag[q.ax] += std::fabs(fx);
      }
      if (dom.dim() == 2) {
        const double fy = weight * st.psi[e] * st.grad[e][1] * inv_h;
        r[q.by] += fy;
        r[q.ay] -= fy;
        if (magnitude) {
          mag[q.by] += std::fabs(fy);
          mag[q.ay] += std::fabs(fy);
        }
      }
    }
    const double share = 1.0 / dom.corners_per_cell();
    for (std::size_t c = 0; c < dom.cell_count(); ++c) {
      if (source[c] == 0.0) continue;
      const auto k = dom.cell_corners(c);
      for (int q = 0; q < dom.corners_per_cell(); ++q) {
        r[k[q]] -= source[c] * share;
        if (magnitude) mag[k[q]] += std::fabs(source[c]) * share;
      }
    }
    for (std::size_t k : dom.boundary_nodes()) r[k] = 0.0;
    if (magnitude) *magnitude = std::move(mag);
    return r;
  }

  // max_k |r_k| / (sum of |terms| at k); 0 where every term vanishes.
  static double relative_residual(const std::vector<double>& r, const std::vector<double>& mag,
                                  const GridDomain& dom) {
    double worst = 0.0;
    for (std::size_t k : dom.interior_nodes())
      if (mag[k] > 0.0) worst = std::max(worst, std::fabs(r[k]) / mag[k]);
    return worst;
  }

  // E(u + alpha d) - E(u), summed from per-cell differences that stay
  // accurate when the cell energies differ by many orders of magnitude.
  double energy_change(const CellState& st, const std::vector<double>& d, double alpha) const {
    const auto& dom = problem.domain;
    const PhiModel& model = problem.family.model();
    const double step_h = alpha / dom.h();
    std::vector<double> terms(dom.cell_count());
    for (std::size_t c = 0; c < dom.cell_count(); ++c) {
      const auto k = dom.cell_corners(c);
      double davg = 0.5 * alpha * (d[k[0]] + d[k[1]]);
      if (dom.dim() == 2) davg = 0.25 * alpha * ((d[k[0]] + d[k[1]]) + (d[k[2]] + d[k[3]]));
      double f = 0.0;
      for (int q = 0; q < quads; ++q) {
        const std::size_t e = c * quads + q;
        const Vec2 dg = quad_gradient(dom, edges[e], d, step_h);
        const Vec2& g = st.grad[e];
        const Vec2 gn{g[0] + dg[0], g[1] + dg[1]};
        const double s = norm(g);
        const double t = norm(gn);
        const double sum = s + t;
        const double diff = sum > 0.0 ? (2.0 * dot(g, dg) + dot(dg, dg)) / sum : 0.0;
        f += model.energy_density_change(centers[c], s, t, diff);
      }
      terms[c] = weight * f - source[c] * davg;
      if (!std::isfinite(terms[c])) return std::numeric_limits<double>::infinity();
    }
    return pairwise_sum(terms) * dom.cell_volume();
  }
};

void require_boundary(const EnergyProblem& problem, const ScalarField& u) {
  require_compatible(problem.domain, u);
  for (std::size_t k : problem.domain.boundary_nodes())
    if (u[k] != problem.g[k]) throw DomainError("field does not match the Dirichlet data on the boundary");
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

constexpr double kMinWeight = std::numeric_limits<double>::min();

// Solves P d = -r on interior nodes for the preconditioner of the current state.
class DirectionSolver {
 public:
  DirectionSolver(const EnergyProblem& problem, const SolverOptions& opts)
      : problem_(problem), opts_(opts) {
    const auto& dom = problem.domain;
    index_.assign(dom.node_count(), -1);
    int next = 0;
    for (std::size_t k : dom.interior_nodes()) index_[k] = next++;
    unknowns_ = next;
  }

  std::vector<double> direction(const Workspace& ws, const Workspace::CellState& st,
                                const std::vector<double>& r) {
    if (opts_.preconditioner == Preconditioner::Diagonal) return diagonal(ws, st, r);
    return weighted_laplacian(ws, st, r);
  }

 private:
  std::vector<double> diagonal(const Workspace& ws, const Workspace::CellState& st,
                               const std::vector<double>& r) const {
    const auto& dom = problem_.domain;
    const PhiModel& model = problem_.family.model();
    const double inv_h2 = 1.0 / (dom.h() * dom.h());
    std::vector<double> curv(st.grad.size());
    double top = 0.0;
    for (std::size_t e = 0; e < st.grad.size(); ++e) {
      const double s = norm(st.grad[e]);
      curv[e] = std::max(model.curvature(ws.centers[ws.cell_of(e)], s), st.psi[e]);
      top = std::max(top, curv[e]);
    }
    const double floor = top > 0.0 ? std::max(opts_.curvature_floor * top, kMinWeight) : 1.0;
    std::vector<double> diag(dom.node_count(), 0.0);
    for (std::size_t e = 0; e < st.grad.size(); ++e) {
      const double w = ws.weight * std::max(curv[e], floor) * inv_h2;
      const QuadEdges& q = ws.edges[e];
      diag[q.ax] += w;
      diag[q.bx] += w;
      if (dom.dim() == 2) {
        diag[q.ay] += w;
        diag[q.by] += w;
      }
    }
    std::vector<double> d(dom.node_count(), 0.0);
    for (std::size_t k : dom.interior_nodes()) d[k] = -r[k] / diag[k];
    return d;
  }

  std::vector<double> weighted_laplacian(const Workspace& ws, const Workspace::CellState& st,
                                         const std::vector<double>& r) {
    const auto& dom = problem_.domain;
    const double inv_h2 = 1.0 / (dom.h() * dom.h());
    double top = 0.0;
    for (double p : st.psi) top = std::max(top, p);
    // Pivots lose the small weights to cancellation when weights span hundreds
    // of decades along a chain; a larger floor only changes the preconditioner,
    // and the diagonal one is the last resort.
    bool factored = false;
    for (double rel : {opts_.curvature_floor, 1e-150, 1e-50, 1e-16, 1e-12, 1e-8}) {
      if (rel < opts_.curvature_floor) continue;
      const double floor = top > 0.0 ? std::max(rel * top, kMinWeight) : 1.0;
      factor(ws, st, floor, inv_h2);
      if (solver_.info() == Eigen::Success) {
        factored = true;
        break;
      }
    }
    if (!factored) return diagonal(ws, st, r);
    Eigen::VectorXd rhs(unknowns_);
    for (std::size_t k : dom.interior_nodes()) rhs[index_[k]] = -r[k];
    const Eigen::VectorXd sol = solver_.solve(rhs);
    std::vector<double> d(dom.node_count(), 0.0);
    for (std::size_t k : dom.interior_nodes()) d[k] = sol[index_[k]];
    return d;
  }

  void factor(const Workspace& ws, const Workspace::CellState& st, double floor, double inv_h2) {
    const auto& dom = problem_.domain;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(st.grad.size() * 8);
    auto edge = [&](std::size_t a, std::size_t b, double w) {
      const int ia = index_[a];
      const int ib = index_[b];
      if (ia >= 0) trip.emplace_back(ia, ia, w);
      if (ib >= 0) trip.emplace_back(ib, ib, w);
      if (ia >= 0 && ib >= 0) {
        trip.emplace_back(ia, ib, -w);
        trip.emplace_back(ib, ia, -w);
      }
    };
    // Adds v (e_b - e_a)(e_d - e_c)^T restricted to the unknowns.
    auto cross = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d, double v) {
      const int rows[2] = {index_[a], index_[b]};
      const int cols[2] = {index_[c], index_[d]};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          if (rows[i] >= 0 && cols[j] >= 0) trip.emplace_back(rows[i], cols[j], (i == j ? v : -v));
    };
    const bool newton = opts_.preconditioner == Preconditioner::Newton;
    const PhiModel& model = problem_.family.model();
    for (std::size_t e = 0; e < st.grad.size(); ++e) {
      const double psi = std::max(st.psi[e], floor);
      const QuadEdges& q = ws.edges[e];
      const double s = norm(st.grad[e]);
      if (!newton) {
        const double w = ws.weight * psi * inv_h2;
        edge(q.ax, q.bx, w);
        if (dom.dim() == 2) edge(q.ay, q.by, w);
        continue;
      }
      // Per-sample Hessian psi I + (phi' - psi) n n^T with n the gradient direction.
      // The coupling entries are emitted even when zero: the symbolic analysis is reused.
      double extra = 0.0, nx = 0.0, ny = 0.0;
      if (s > 0.0) {
        double dphi = model.curvature(ws.centers[ws.cell_of(e)], s);
        if (!std::isfinite(dphi)) dphi = psi;
        extra = std::max(dphi, floor) - psi;
        nx = st.grad[e][0] / s;
        ny = dom.dim() == 2 ? st.grad[e][1] / s : 0.0;
      }
      const double c = ws.weight * inv_h2;
      cross(q.ax, q.bx, q.ax, q.bx, c * (psi + extra * nx * nx));
      if (dom.dim() == 2) {
        cross(q.ay, q.by, q.ay, q.by, c * (psi + extra * ny * ny));
        cross(q.ax, q.bx, q.ay, q.by, c * extra * nx * ny);
        cross(q.ay, q.by, q.ax, q.bx, c * extra * nx * ny);
      }
    }
    Eigen::SparseMatrix<double> P(unknowns_, unknowns_);
    P.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed_) {
      solver_.analyzePattern(P);
      analyzed_ = true;
    }
    solver_.factorize(P);
  }

  const EnergyProblem& problem_;
  const SolverOptions& opts_;
  std::vector<int> index_;
  int unknowns_ = 0;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

ScalarField step(const ScalarField& u, const std::vector<double>& d, double alpha,
                 const GridDomain& dom) {
  ScalarField out = u;
  for (std::size_t k : dom.interior_nodes()) out[k] = u[k] + alpha * d[k];
  return out;
}

}  // namespace

std::vector<double> cell_energies(const EnergyProblem& problem, const ScalarField& u) {
  problem.validate();
  require_boundary(problem, u);
  Workspace ws(problem);
  auto terms = ws.cell_terms(u);
  for (double& t : terms) t *= problem.domain.cell_volume();
  return terms;
}

double energy(const EnergyProblem& problem, const ScalarField& u) {
  problem.validate();
  require_boundary(problem, u);
  Workspace ws(problem);
  std::size_t worst = 0;
  const double e = ws.energy(u, &worst);
  if (!std::isfinite(e)) {
    const Point x = problem.domain.cell_center(worst);
    std::ostringstream os;
    os.precision(17);
    os << "energy overflow; worst cell " << worst << " at (" << x[0] << ", " << x[1] << ")";
    throw OverflowError(os.str());
  }
  return e;
}

ScalarField euler_residual(const EnergyProblem& problem, const ScalarField& u) {
  problem.validate();
  require_boundary(problem, u);
  Workspace ws(problem);
  ScalarField out;
  out.role = FieldRole::Test;
  out.values = ws.residual(ws.cells(u));
  return out;
}

double relative_residual(const EnergyProblem& problem, const ScalarField& u) {
  problem.validate();
  require_boundary(problem, u);
  Workspace ws(problem);
  std::vector<double> mag;
  const auto r = ws.residual(ws.cells(u), &mag);
  return Workspace::relative_residual(r, mag, problem.domain);
}

SolveReport minimize(const EnergyProblem& problem, const std::optional<ScalarField>& warm_start,
                     const SolverOptions& opts) {
  problem.validate();
  const auto& dom = problem.domain;
  ScalarField u = problem.g;
  u.role = FieldRole::Solution;
  if (warm_start) {
    require_compatible(dom, *warm_start);
    u = *warm_start;
    u.role = FieldRole::Solution;
    for (std::size_t k : dom.boundary_nodes()) u[k] = problem.g[k];
  }

  Workspace ws(problem);
  DirectionSolver directions(problem, opts);
  SolveReport report;

  double e = ws.energy(u);
  if (!std::isfinite(e)) throw OverflowError("initial energy overflows; choose a smaller start");
  double last_decrease = std::numeric_limits<double>::infinity();
  report.energy_trace.push_back(e);

  std::vector<double> mag;
  auto st = ws.cells(u);
  auto r = ws.residual(st, &mag);
  double rel = Workspace::relative_residual(r, mag, dom);

  long it = 0;
  for (; it < opts.max_iters; ++it) {
    if (rel <= opts.residual_tol && (it == 0 || last_decrease < opts.energy_tol)) {
      report.converged = true;
      break;
    }
    std::vector<double> d = directions.direction(ws, st, r);
    double slope = 0.0;
    for (std::size_t k : dom.interior_nodes()) slope += r[k] * d[k];
    if (!(slope < 0.0)) {
      // Fall back to steepest descent when the preconditioned step is not a descent direction.
      for (std::size_t k : dom.interior_nodes()) d[k] = -r[k];
      slope = 0.0;
      for (std::size_t k : dom.interior_nodes()) slope -= r[k] * r[k];
    }
    const double slope_energy = slope * dom.cell_volume();

    auto armijo = [&](double alpha, double change) {
      return change <= opts.armijo_slope * alpha * slope_energy;
    };
    double alpha = 1.0;
    double change = ws.energy_change(st, d, alpha);
    bool accepted = armijo(alpha, change);
    if (accepted) {
      // Expand while the energy keeps dropping; lagged weights can make steps too short.
      for (int grow = 0; grow < 60; ++grow) {
        const double bigger = ws.energy_change(st, d, 2.0 * alpha);
        if (!(bigger < change) || !armijo(2.0 * alpha, bigger)) break;
        alpha *= 2.0;
        change = bigger;
      }
    } else {
      for (int back = 0; back < 200 && !accepted; ++back) {
        alpha *= opts.backtrack;
        change = ws.energy_change(st, d, alpha);
        accepted = armijo(alpha, change);
      }
    }
    if (!accepted) {
      ++report.line_search_failures;
      report.message = "line search stalled";
      break;
    }
    if (change > 0.0) throw std::logic_error("energy increased on an accepted step");
    u = step(u, d, alpha, dom);
    const double e_new = ws.energy(u);
    last_decrease = -change / std::max(std::fabs(e_new), std::numeric_limits<double>::min());
    e = e_new;
    report.energy_trace.push_back(e);
    st = ws.cells(u);
    r = ws.residual(st, &mag);
    rel = Workspace::relative_residual(r, mag, dom);
  }
  if (!report.converged && it >= opts.max_iters) report.message = "iteration cap reached";

  report.solution = std::move(u);
  report.final_energy = e;
  report.residual_abs = sup_abs(r);
  report.residual_sup = rel;
  report.iterations = it;
  report.gradient_field.resize(st.grad.size());
  for (std::size_t e = 0; e < st.grad.size(); ++e) report.gradient_field[e] = norm(st.grad[e]);
  report.lm_norms = gradient_lm_norms(report.gradient_field, dom, opts.m_list);
  return report;
}

double lipschitz_of_boundary(const ScalarField& g, const GridDomain& domain) {
  require_compatible(domain, g);
  const auto& b = domain.boundary_nodes();
  double best = 0.0;
  for (std::size_t a = 0; a < b.size(); ++a) {
    const Point xa = domain.node_point(b[a]);
    for (std::size_t c = a + 1; c < b.size(); ++c) {
      const Point xc = domain.node_point(b[c]);
      const double dist = std::hypot(xa[0] - xc[0], xa[1] - xc[1]);
      best = std::max(best, std::fabs(g[b[a]] - g[b[c]]) / dist);
    }
  }
  return best;
}

std::vector<double> gradient_lm_norms(const std::vector<double>& gradient_field,
                                      const GridDomain& domain, const std::vector<double>& m_list) {
  const std::size_t cells = domain.cell_count();
  if (gradient_field.empty() || gradient_field.size() % cells != 0)
    throw DomainError("gradient field size is not a multiple of the grid cell count");
  const double sample_volume =
      domain.cell_volume() * static_cast<double>(cells) / static_cast<double>(gradient_field.size());
  std::vector<double> out;
  double top = 0.0;
  for (double v : gradient_field) top = std::max(top, v);
  for (double m : m_list) {
    if (!(m >= 1.0)) throw DomainError("L^m norm needs m >= 1");
    if (top == 0.0) {
      out.push_back(0.0);
      continue;
    }
    // Factor out the maximum so that large m does not overflow.
    std::vector<double> terms(gradient_field.size());
    for (std::size_t c = 0; c < terms.size(); ++c) terms[c] = std::pow(gradient_field[c] / top, m);
    out.push_back(top * std::pow(pairwise_sum(terms) * sample_volume, 1.0 / m));
  }
  return out;
}

std::vector<double> gradient_lm_norms(const SolveReport& report, const GridDomain& domain,
                                      const std::vector<double>& m_list) {
  return gradient_lm_norms(report.gradient_field, domain, m_list);
}

double explicit_gradient_bound(double mu, double eta, double measure) {
  return 12.0 * mu * (1.0 + std::pow(eta, mu)) * (1.0 + measure) * (1.0 + measure);
}

GradientBoundCheck check_gradient_bounds(const EnergyProblem& problem, const SolveReport& report,
                                         const std::vector<double>& m_list) {
  GradientBoundCheck out;
  const auto& dom = problem.domain;
  const double pm = problem.family.p_minus();
  const double pp = problem.family.p_plus();
  const double mu = pp / pm;
  const double eta = lipschitz_of_boundary(problem.g, dom);
  out.bound = explicit_gradient_bound(mu, eta, dom.measure());
  out.applicable = problem.family.unit_normalized() && problem.source_sign == 0;
  if (out.applicable) {
    std::vector<double> ms;
    for (double m : m_list)
      if (m <= pm) ms.push_back(m);
    for (double v : gradient_lm_norms(report, dom, ms)) out.worst_norm = std::max(out.worst_norm, v);
    out.pass = out.worst_norm <= out.bound;

    const auto& gf = report.gradient_field;
    std::vector<double> terms(gf.size());
    for (std::size_t e = 0; e < terms.size(); ++e) terms[e] = std::pow(gf[e], pm);
    out.power_norm_lhs = pairwise_sum(terms) * dom.measure() / static_cast<double>(gf.size());
    out.power_norm_rhs = dom.measure() + report.final_energy * pp;
    out.power_norm_pass = out.power_norm_lhs <= out.power_norm_rhs * (1.0 + 1e-12);
  }
  return out;
}

}  // namespace philab
