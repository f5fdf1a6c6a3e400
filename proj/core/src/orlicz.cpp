#include "philab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "philab/errors.hpp"
#include "philab/rng.hpp"

namespace philab {

namespace {

[[noreturn]] void modular_overflow(const GridDomain& domain, std::size_t cell, double magnitude) {
  const Point x = domain.cell_center(cell);
  std::ostringstream os;
  os.precision(17);
  os << "modular overflow; worst cell " << cell << " at (" << x[0] << ", " << x[1]
     << ") with |u|=" << magnitude;
  throw OverflowError(os.str());
}

// Sum of Phi(x_c, m_c / lambda) h^d; +inf when any term overflows.
double scaled_modular(const PhiFamily& family, const GridDomain& domain,
                      std::span<const double> mags, double lambda, std::size_t* worst) {
  const PhiModel& model = family.model();
  std::vector<double> terms(mags.size());
  double worst_mag = -1.0;
  bool finite = true;
  for (std::size_t c = 0; c < mags.size(); ++c) {
    const double v = model.big_phi(domain.cell_center(c), mags[c] / lambda);
    if (!std::isfinite(v)) {
      finite = false;
      if (mags[c] > worst_mag) {
        worst_mag = mags[c];
        if (worst) *worst = c;
      }
    }
    terms[c] = v;
  }
  if (!finite) return std::numeric_limits<double>::infinity();
  return pairwise_sum(terms) * domain.cell_volume();
}

std::vector<double> magnitudes(const GridDomain& domain, const ScalarField& field) {
  std::vector<double> m = cell_averages(field, domain);
  for (double& v : m) v = std::fabs(v);
  return m;
}

}  // namespace

double modular_cells(const PhiFamily& family, const GridDomain& domain,
                     std::span<const double> cell_magnitudes) {
  if (cell_magnitudes.size() != domain.cell_count())
    throw DomainError("cell data size does not match the grid cell count");
  std::size_t worst = 0;
  const double m = scaled_modular(family, domain, cell_magnitudes, 1.0, &worst);
  if (!std::isfinite(m)) modular_overflow(domain, worst, cell_magnitudes[worst]);
  return m;
}

double modular(const PhiFamily& family, const GridDomain& domain, const ScalarField& field) {
  require_compatible(domain, field);
  const auto m = magnitudes(domain, field);
  return modular_cells(family, domain, m);
}

double luxemburg_norm_cells(const PhiFamily& family, const GridDomain& domain,
                            std::span<const double> cell_magnitudes) {
  const double m = modular_cells(family, domain, cell_magnitudes);
  if (m == 0.0) return 0.0;
  const double pm = family.p_minus();
  const double pp = family.p_plus();
  double lo = std::min(std::pow(m, 1.0 / pm), std::pow(m, 1.0 / pp)) * (1.0 - 1e-9);
  double hi = std::max(std::pow(m, 1.0 / pm), std::pow(m, 1.0 / pp)) * (1.0 + 1e-9);
  auto rho = [&](double lambda) {
    return scaled_modular(family, domain, cell_magnitudes, lambda, nullptr);
  };
  // The sandwich brackets the norm; widen only to absorb rounding.
  for (int guard = 0; rho(lo) < 1.0 && guard < 64; ++guard) lo *= 0.5;
  for (int guard = 0; rho(hi) > 1.0 && guard < 64; ++guard) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rho(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double luxemburg_norm(const PhiFamily& family, const GridDomain& domain, const ScalarField& field) {
  require_compatible(domain, field);
  const auto m = magnitudes(domain, field);
  return luxemburg_norm_cells(family, domain, m);
}

double embedding_constant(double measure, double beta, double p_plus_phi, double p_plus_psi) {
  const double bp = std::pow(beta, -p_plus_phi);
  const double bq = std::pow(beta, -p_plus_phi - p_plus_psi);
  return (1.0 + 2.0 * measure) / beta * std::pow(2.0, 1.0 / p_plus_phi) *
         (1.0 + 2.0 * bp * measure + 2.0 * bq);
}

EmbeddingReport embedding_check(const PhiFamily& phi, const PhiFamily& psi,
                                const GridDomain& domain, const std::vector<ScalarField>& fields,
                                std::optional<double> beta) {
  if (phi.p_plus() > psi.p_minus())
    throw DomainError("embedding needs p_plus of Phi <= p_minus of Psi");
  EmbeddingReport report;
  if (beta) {
    report.beta = *beta;
  } else {
    auto family_beta = [](const PhiFamily& f) {
      return normalization_beta(std::min(f.c_minus(), 1.0), std::max(f.c_plus(), 1.0),
                                f.p_minus());
    };
    report.beta = std::min(family_beta(phi), family_beta(psi));
  }
  report.bound = embedding_constant(domain.measure(), report.beta, phi.p_plus(), psi.p_plus());
  for (const ScalarField& u : fields) {
    EmbeddingRow row;
    row.norm_phi = luxemburg_norm(phi, domain, u);
    row.norm_psi = luxemburg_norm(psi, domain, u);
    row.ratio = row.norm_phi == 0.0 ? 0.0 : row.norm_phi / row.norm_psi;
    report.worst_ratio = std::max(report.worst_ratio, row.ratio);
    report.rows.push_back(row);
  }
  report.pass = report.worst_ratio <= report.bound;
  return report;
}

double sobolev_conjugate(double p, int dim) {
  if (p >= dim) return std::numeric_limits<double>::infinity();
  return dim * p / (dim - p);
}

JumpConditionReport jump_condition(const PhiFamily& family, const GridDomain& domain, double delta,
                                   int s_samples) {
  if (!(delta > 0.0)) throw DomainError("jump condition radius must be positive");
  JumpConditionReport report;
  report.delta = delta;
  report.dim = domain.dim();
  const auto s_values = log_space(1e-3, 1e3, s_samples);
  const double pitch = 0.5 * delta;
  const double extent = domain.upper() - domain.lower();
  const int steps = static_cast<int>(std::ceil(extent / pitch - 1e-12));
  const int nj = domain.dim() == 1 ? 1 : steps + 1;

  std::vector<Point> samples;
  for (std::size_t k = 0; k < domain.node_count(); ++k) samples.push_back(domain.node_point(k));
  for (std::size_t c = 0; c < domain.cell_count(); ++c) samples.push_back(domain.cell_center(c));

  for (int bj = 0; bj < nj; ++bj) {
    for (int bi = 0; bi <= steps; ++bi) {
      BallVerdict ball;
      ball.center = {std::min(domain.lower() + bi * pitch, domain.upper()),
                     domain.dim() == 1 ? 0.0 : std::min(domain.lower() + bj * pitch, domain.upper())};
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      double nearest = lo;
      Point nearest_point = ball.center;
      auto visit = [&](const Point& x) {
        for (double s : s_values) {
          const double r = std::exp(std::log(s) + family.log_phi(x, s) - family.log_big_phi(x, s));
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
      };
      for (const Point& x : samples) {
        const double d = std::hypot(x[0] - ball.center[0], x[1] - ball.center[1]);
        if (d <= delta) visit(x);
        if (d < nearest) {
          nearest = d;
          nearest_point = x;
        }
      }
      if (!(lo <= hi)) visit(nearest_point);
      ball.p_minus = lo;
      ball.p_plus = hi;
      ball.pass = lo >= domain.dim() || hi <= sobolev_conjugate(lo, domain.dim());
      report.pass = report.pass && ball.pass;
      report.balls.push_back(ball);
    }
  }
  return report;
}

ScalarField random_sine_field(const GridDomain& domain, std::uint64_t seed, std::uint64_t trial) {
  Stream rng(seed, trial);
  struct Mode {
    double amplitude;
    int m1;
    int m2;
  };
  std::vector<Mode> modes(8);
  for (Mode& m : modes) {
    m.amplitude = rng.uniform(-1.0, 1.0);
    m.m1 = rng.integer(1, 4);
    m.m2 = rng.integer(1, 4);
  }
  const double extent = domain.upper() - domain.lower();
  ScalarField u = ScalarField::zeros(domain, FieldRole::Test);
  for (std::size_t k = 0; k < domain.node_count(); ++k) {
    if (domain.is_boundary(k)) continue;
    const Point x = domain.node_point(k);
    const double a = (x[0] - domain.lower()) / extent;
    const double b = (x[1] - domain.lower()) / extent;
    double v = 0.0;
    for (const Mode& m : modes) {
      double term = m.amplitude * std::sin(m.m1 * std::numbers::pi * a);
      if (domain.dim() == 2) term *= std::sin(m.m2 * std::numbers::pi * b);
      v += term;
    }
    u[k] = v;
  }
  return u;
}

PoincareReport poincare_ratio(const PhiFamily& family, const GridDomain& domain, int trials,
                              std::uint64_t seed) {
  PoincareReport report;
  for (int t = 0; t < trials; ++t) {
    const ScalarField u = random_sine_field(domain, seed, static_cast<std::uint64_t>(t));
    const double nu = luxemburg_norm(family, domain, u);
    if (nu == 0.0) {
      ++report.skipped;
      continue;
    }
    const auto grad = discrete_gradient(u, domain);
    std::vector<double> mags(grad.size());
    for (std::size_t c = 0; c < grad.size(); ++c) mags[c] = norm(grad[c]);
    const double ng = luxemburg_norm_cells(family, domain, mags);
    PoincareRow row{t, nu, ng, nu / ng};
    report.sup_ratio = std::max(report.sup_ratio, row.ratio);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace philab
