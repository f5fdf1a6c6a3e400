#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "philab/types.hpp"

namespace philab {

// Convex region inside the box, either a disc or an axis-aligned rectangle.
struct Subdomain {
  enum class Shape { Disc, Rect };
  Shape shape = Shape::Disc;
  Point center{0.5, 0.5};
  double radius = 0.3;
  Point lower{0.0, 0.0};
  Point upper{0.0, 0.0};

  static Subdomain disc(Point center, double radius);
  static Subdomain rect(Point lower, Point upper);

  bool contains(const Point& x) const;
  // Outward unit normal of the region boundary nearest to x.
  Vec2 outward_normal(const Point& x) const;
  std::string describe() const;
};

// Uniform lattice on the box [lower, upper]^dim with n nodes per axis.
// Nodes are indexed k = i + j n; cells k = i + j (n - 1) with corner (i, j).
class GridDomain {
 public:
  GridDomain(int dim, int nodes_per_axis, double lower = 0.0, double upper = 1.0);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double h() const { return h_; }
  std::size_t node_count() const { return node_count_; }
  std::size_t cell_count() const { return cell_count_; }
  int cells_per_axis() const { return n_ - 1; }

  std::size_t node_index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(n_);
  }
  int node_i(std::size_t k) const { return static_cast<int>(k % static_cast<std::size_t>(n_)); }
  int node_j(std::size_t k) const { return static_cast<int>(k / static_cast<std::size_t>(n_)); }
  Point node_point(std::size_t k) const;
  Point cell_center(std::size_t c) const;
  // Corner node indices of cell c; 2 entries in 1D, 4 in 2D (order: (0,0),(1,0),(0,1),(1,1)).
  std::array<std::size_t, 4> cell_corners(std::size_t c) const;
  int corners_per_cell() const { return dim_ == 1 ? 2 : 4; }

  bool is_boundary(std::size_t k) const { return boundary_[k] != 0; }
  const std::vector<std::size_t>& boundary_nodes() const { return boundary_nodes_; }
  const std::vector<std::size_t>& interior_nodes() const { return interior_nodes_; }

  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
  double measure() const { return static_cast<double>(cell_count_) * cell_volume(); }
  double diameter() const;

  // Attaches the subdomain and validates convexity and containment (throws DomainError).
  void set_subdomain(const Subdomain& sub, bool require_strictly_inside = true);
  const std::optional<Subdomain>& subdomain() const { return subdomain_; }
  bool in_subdomain_node(std::size_t k) const { return !sub_nodes_.empty() && sub_nodes_[k] != 0; }
  bool in_subdomain_cell(std::size_t c) const { return !sub_cells_.empty() && sub_cells_[c] != 0; }
  // Nodes of the subdomain mask with a 4-neighbour outside it, excluding the box boundary.
  const std::vector<std::size_t>& interface_nodes() const { return interface_nodes_; }
  Vec2 interface_normal(std::size_t k) const;

  // Every interior node is connected to the boundary through interior lattice edges.
  bool connected() const;
  // The subdomain mask has no lattice points missing from its discrete convex hull.
  bool subdomain_mask_convex() const;

 private:
  int dim_;
  int n_;
  double lower_;
  double upper_;
  double h_;
  std::size_t node_count_;
  std::size_t cell_count_;
  std::vector<char> boundary_;
  std::vector<std::size_t> boundary_nodes_;
  std::vector<std::size_t> interior_nodes_;
  std::optional<Subdomain> subdomain_;
  std::vector<char> sub_nodes_;
  std::vector<char> sub_cells_;
  std::vector<std::size_t> interface_nodes_;
};

enum class FieldRole { Solution, BoundaryData, Test };

struct ScalarField {
  FieldRole role = FieldRole::Solution;
  std::vector<double> values;

  static ScalarField sample(const GridDomain& domain, const std::function<double(const Point&)>& f,
                            FieldRole role = FieldRole::BoundaryData);
  static ScalarField zeros(const GridDomain& domain, FieldRole role = FieldRole::Solution);
  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }
  std::size_t size() const { return values.size(); }
};

// Throws DomainError when sizes differ or values are not finite.
void require_compatible(const GridDomain& domain, const ScalarField& field);

// Forward-difference gradient per cell (d components, second slot 0 in 1D).
std::vector<Vec2> discrete_gradient(const ScalarField& field, const GridDomain& domain);
// Average of the cell's corner values.
std::vector<double> cell_averages(const ScalarField& field, const GridDomain& domain);

// Pairwise summation with a fixed split topology.
double pairwise_sum(std::span<const double> values);

}  // namespace philab
