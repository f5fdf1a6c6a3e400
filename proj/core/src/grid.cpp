#include "philab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "philab/errors.hpp"

namespace philab {

Subdomain Subdomain::disc(Point center, double radius) {
  if (!(radius > 0.0)) throw DomainError("subdomain disc radius must be positive");
  Subdomain s;
  s.shape = Shape::Disc;
  s.center = center;
  s.radius = radius;
  return s;
}

Subdomain Subdomain::rect(Point lower, Point upper) {
  if (!(lower[0] < upper[0] && lower[1] < upper[1]))
    throw DomainError("subdomain rectangle must have positive extent");
  Subdomain s;
  s.shape = Shape::Rect;
  s.lower = lower;
  s.upper = upper;
  return s;
}

bool Subdomain::contains(const Point& x) const {
  if (shape == Shape::Disc) {
    const double dx = x[0] - center[0];
    const double dy = x[1] - center[1];
    return dx * dx + dy * dy <= radius * radius;
  }
  return x[0] >= lower[0] && x[0] <= upper[0] && x[1] >= lower[1] && x[1] <= upper[1];
}

Vec2 Subdomain::outward_normal(const Point& x) const {
  if (shape == Shape::Disc) {
    Vec2 v{x[0] - center[0], x[1] - center[1]};
    const double r = norm(v);
    if (r == 0.0) return Vec2{1.0, 0.0};
    return Vec2{v[0] / r, v[1] / r};
  }
  const double d[4] = {x[0] - lower[0], upper[0] - x[0], x[1] - lower[1], upper[1] - x[1]};
  const Vec2 normals[4] = {{-1.0, 0.0}, {1.0, 0.0}, {0.0, -1.0}, {0.0, 1.0}};
  int best = 0;
  for (int f = 1; f < 4; ++f)
    if (std::fabs(d[f]) < std::fabs(d[best])) best = f;
  return normals[best];
}

std::string Subdomain::describe() const {
  std::ostringstream os;
  if (shape == Shape::Disc)
    os << "disc(" << center[0] << "," << center[1] << "," << radius << ")";
  else
    os << "rect(" << lower[0] << "," << lower[1] << "," << upper[0] << "," << upper[1] << ")";
  return os.str();
}

GridDomain::GridDomain(int dim, int nodes_per_axis, double lower, double upper)
    : dim_(dim), n_(nodes_per_axis), lower_(lower), upper_(upper) {
  if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
  if (nodes_per_axis < 3) throw DomainError("grid needs at least 3 nodes per axis");
  if (!(upper > lower)) throw DomainError("grid box must have positive extent");
  h_ = (upper - lower) / (n_ - 1);
  const std::size_t n = static_cast<std::size_t>(n_);
  node_count_ = dim == 1 ? n : n * n;
  cell_count_ = dim == 1 ? n - 1 : (n - 1) * (n - 1);
  boundary_.assign(node_count_, 0);
  for (std::size_t k = 0; k < node_count_; ++k) {
    const int i = node_i(k);
    const int j = node_j(k);
    bool b = i == 0 || i == n_ - 1;
    if (dim == 2) b = b || j == 0 || j == n_ - 1;
    boundary_[k] = b ? 1 : 0;
    (b ? boundary_nodes_ : interior_nodes_).push_back(k);
  }
}

Point GridDomain::node_point(std::size_t k) const {
  const double x = lower_ + h_ * node_i(k);
  const double y = dim_ == 1 ? 0.0 : lower_ + h_ * node_j(k);
  return Point{x, y};
}

Point GridDomain::cell_center(std::size_t c) const {
  const std::size_t m = static_cast<std::size_t>(n_ - 1);
  const double i = static_cast<double>(c % m);
  const double j = static_cast<double>(c / m);
  return Point{lower_ + h_ * (i + 0.5), dim_ == 1 ? 0.0 : lower_ + h_ * (j + 0.5)};
}

std::array<std::size_t, 4> GridDomain::cell_corners(std::size_t c) const {
  const std::size_t m = static_cast<std::size_t>(n_ - 1);
  const std::size_t n = static_cast<std::size_t>(n_);
  if (dim_ == 1) return {c, c + 1, 0, 0};
  const std::size_t i = c % m;
  const std::size_t j = c / m;
  const std::size_t k = i + j * n;
  return {k, k + 1, k + n, k + n + 1};
}

double GridDomain::diameter() const {
  return (upper_ - lower_) * (dim_ == 1 ? 1.0 : std::sqrt(2.0));
}

void GridDomain::set_subdomain(const Subdomain& sub, bool require_strictly_inside) {
  if (dim_ != 2) throw DomainError("subdomains are supported in 2D only");
  std::vector<char> nodes(node_count_, 0);
  for (std::size_t k = 0; k < node_count_; ++k) {
    if (!sub.contains(node_point(k))) continue;
    if (is_boundary(k) && require_strictly_inside)
      throw DomainError("subdomain " + sub.describe() + " touches the domain boundary");
    nodes[k] = 1;
  }
  if (std::count(nodes.begin(), nodes.end(), 1) == 0)
    throw DomainError("subdomain " + sub.describe() + " contains no grid nodes");
  std::vector<char> cells(cell_count_, 0);
  for (std::size_t c = 0; c < cell_count_; ++c) cells[c] = sub.contains(cell_center(c)) ? 1 : 0;

  std::optional<Subdomain> previous = subdomain_;
  subdomain_ = sub;
  sub_nodes_ = std::move(nodes);
  sub_cells_ = std::move(cells);
  if (!subdomain_mask_convex()) {
    subdomain_ = previous;
    sub_nodes_.clear();
    sub_cells_.clear();
    throw DomainError("subdomain " + sub.describe() + " mask is not convex");
  }

  interface_nodes_.clear();
  for (std::size_t k : interior_nodes_) {
    if (!sub_nodes_[k]) continue;
    const int i = node_i(k);
    const int j = node_j(k);
    const bool edge = !sub_nodes_[node_index(i - 1, j)] || !sub_nodes_[node_index(i + 1, j)] ||
                      !sub_nodes_[node_index(i, j - 1)] || !sub_nodes_[node_index(i, j + 1)];
    if (edge) interface_nodes_.push_back(k);
  }
}

Vec2 GridDomain::interface_normal(std::size_t k) const {
  if (!subdomain_) throw DomainError("no subdomain attached");
  return subdomain_->outward_normal(node_point(k));
}

bool GridDomain::connected() const {
  std::vector<char> seen(node_count_, 0);
  std::deque<std::size_t> queue;
  for (std::size_t k : boundary_nodes_) {
    seen[k] = 1;
    queue.push_back(k);
  }
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const int i = node_i(k);
    const int j = node_j(k);
    const int di[4] = {-1, 1, 0, 0};
    const int dj[4] = {0, 0, -1, 1};
    for (int e = 0; e < (dim_ == 1 ? 2 : 4); ++e) {
      const int a = i + di[e];
      const int b = j + dj[e];
      if (a < 0 || a >= n_ || b < 0 || b >= (dim_ == 1 ? 1 : n_)) continue;
      const std::size_t q = node_index(a, b);
      if (!seen[q]) {
        seen[q] = 1;
        queue.push_back(q);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

bool GridDomain::subdomain_mask_convex() const {
  if (sub_nodes_.empty()) return true;
  using P = std::array<long long, 2>;
  std::vector<P> pts;
  for (std::size_t k = 0; k < node_count_; ++k)
    if (sub_nodes_[k]) pts.push_back({node_i(k), node_j(k)});
  std::sort(pts.begin(), pts.end());
  auto cross = [](const P& o, const P& a, const P& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  // Monotone chain, counter-clockwise, collinear points dropped.
  std::vector<P> hull(2 * pts.size());
  std::size_t m = 0;
  for (const P& p : pts) {
    while (m >= 2 && cross(hull[m - 2], hull[m - 1], p) <= 0) --m;
    hull[m++] = p;
  }
  for (std::size_t t = pts.size() - 1, lower = m + 1; t-- > 0;) {
    const P& p = pts[t];
    while (m >= lower && cross(hull[m - 2], hull[m - 1], p) <= 0) --m;
    hull[m++] = p;
  }
  hull.resize(m > 1 ? m - 1 : m);

  long long lo_i = n_, hi_i = -1, lo_j = n_, hi_j = -1;
  for (const P& p : pts) {
    lo_i = std::min(lo_i, p[0]);
    hi_i = std::max(hi_i, p[0]);
    lo_j = std::min(lo_j, p[1]);
    hi_j = std::max(hi_j, p[1]);
  }
  for (long long j = lo_j; j <= hi_j; ++j) {
    for (long long i = lo_i; i <= hi_i; ++i) {
      const P q{i, j};
      bool inside = true;
      if (hull.size() >= 3) {
        for (std::size_t e = 0; e < hull.size() && inside; ++e)
          inside = cross(hull[e], hull[(e + 1) % hull.size()], q) >= 0;
      } else if (hull.size() == 2) {
        inside = cross(hull[0], hull[1], q) == 0;
      }
      if (inside && !sub_nodes_[node_index(static_cast<int>(i), static_cast<int>(j))])
        return false;
    }
  }
  return true;
}

ScalarField ScalarField::sample(const GridDomain& domain,
                                const std::function<double(const Point&)>& f, FieldRole role) {
  ScalarField out;
  out.role = role;
  out.values.resize(domain.node_count());
  for (std::size_t k = 0; k < domain.node_count(); ++k) out.values[k] = f(domain.node_point(k));
  return out;
}

ScalarField ScalarField::zeros(const GridDomain& domain, FieldRole role) {
  ScalarField out;
  out.role = role;
  out.values.assign(domain.node_count(), 0.0);
  return out;
}

void require_compatible(const GridDomain& domain, const ScalarField& field) {
  if (field.size() != domain.node_count())
    throw DomainError("field size does not match the grid node count");
  for (double v : field.values)
    if (!std::isfinite(v)) throw DomainError("field contains non-finite values");
}

std::vector<Vec2> discrete_gradient(const ScalarField& field, const GridDomain& domain) {
  if (field.size() != domain.node_count())
    throw DomainError("field size does not match the grid node count");
  std::vector<Vec2> g(domain.cell_count());
  const double inv_h = 1.0 / domain.h();
  for (std::size_t c = 0; c < domain.cell_count(); ++c) {
    const auto k = domain.cell_corners(c);
    if (domain.dim() == 1) {
      g[c] = {(field[k[1]] - field[k[0]]) * inv_h, 0.0};
    } else {
      g[c] = {(field[k[1]] - field[k[0]]) * inv_h, (field[k[2]] - field[k[0]]) * inv_h};
    }
  }
  return g;
}

std::vector<double> cell_averages(const ScalarField& field, const GridDomain& domain) {
  if (field.size() != domain.node_count())
    throw DomainError("field size does not match the grid node count");
  std::vector<double> out(domain.cell_count());
  for (std::size_t c = 0; c < domain.cell_count(); ++c) {
    const auto k = domain.cell_corners(c);
    out[c] = domain.dim() == 1 ? 0.5 * (field[k[0]] + field[k[1]])
                               : 0.25 * ((field[k[0]] + field[k[1]]) + (field[k[2]] + field[k[3]]));
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 32;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace philab
