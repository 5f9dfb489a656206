#pragma once

// Structured P1 triangulation of [-1,1]^2 with an optional unit-disk mask,
// nodal fields on it, gradient recovery and ball-restricted sup queries.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace plap {

using Vec2 = Eigen::Vector2d;

/// Node index pair: i counts along x, j along y.
struct NodeIJ {
  int i = 0;
  int j = 0;
};

/// Vertices of a triangle, counterclockwise.
using Triangle = std::array<std::size_t, 3>;

/// Immutable mesh. Every square cell is split along its (i,j)-(i+1,j+1)
/// diagonal. Nodes are stored row-major: index = j*(n+1) + i.
///
/// Under the disk mask a node is active when |x| <= 1 + h/2, a triangle is kept
/// when its three vertices are active, and a node is interior when its full
/// six-triangle patch is kept. Dirichlet (boundary) nodes are the active
/// nodes that are not interior.
class Grid {
 public:
  int n() const { return n_; }
  double h() const { return h_; }
  bool disk() const { return disk_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(i);
  }
  std::size_t index(NodeIJ ij) const { return index(ij.i, ij.j); }
  NodeIJ ij(std::size_t node) const {
    const auto stride = static_cast<std::size_t>(n_ + 1);
    return {static_cast<int>(node % stride), static_cast<int>(node / stride)};
  }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i <= n_ && j <= n_; }

  const Vec2& node(std::size_t k) const { return nodes_[k]; }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Triangle& triangle(std::size_t t) const { return triangles_[t]; }

  /// Gradients of the three P1 basis functions on triangle t.
  const std::array<Vec2, 3>& shape_gradients(std::size_t t) const { return shape_grads_[t]; }
  double area(std::size_t t) const { return areas_[t]; }
  /// Signed area from coordinates, positive for counterclockwise triangles.
  double signed_area(std::size_t t) const;

  bool active(std::size_t k) const { return active_[k] != 0; }
  bool boundary(std::size_t k) const { return boundary_[k] != 0; }
  bool interior(std::size_t k) const { return active_[k] != 0 && boundary_[k] == 0; }

  /// Lumped mass: one third of the area of every kept triangle touching k.
  double lumped_mass(std::size_t k) const { return lumped_mass_[k]; }
  /// Number of kept triangles touching k.
  int valence(std::size_t k) const { return valence_[k]; }

  double total_area() const;

  /// Node whose coordinates equal x (to 1e-9 h), if it exists and is active.
  std::optional<std::size_t> find_node(const Vec2& x) const;
  /// As find_node, but throws LookupError.
  std::size_t node_at(const Vec2& x) const;
  /// Active node at (i,j); throws LookupError when out of range or masked.
  std::size_t node_at(NodeIJ ij) const;

  /// Triangle containing x and the barycentric weights of its vertices.
  /// Empty when x is outside every kept triangle.
  struct Location {
    std::size_t triangle;
    std::array<double, 3> weights;
  };
  std::optional<Location> locate(const Vec2& x) const;

 private:
  friend std::shared_ptr<const Grid> build_grid(int n, bool use_disk_mask);
  Grid() = default;

  int n_ = 0;
  double h_ = 0.0;
  bool disk_ = false;
  std::vector<Vec2> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<std::array<Vec2, 3>> shape_grads_;
  std::vector<double> areas_;
  std::vector<std::uint8_t> active_;
  std::vector<std::uint8_t> boundary_;
  std::vector<double> lumped_mass_;
  std::vector<int> valence_;
  // Kept-triangle index for each cell half, -1 when masked out.
  std::vector<std::int64_t> cell_triangle_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// n must be even and >= 4 so that the origin is a node.
GridPtr build_grid(int n, bool use_disk_mask);

/// One real per node. Values at masked-out nodes are kept at zero.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(GridPtr g, double fill = 0.0);
  GridFunction(GridPtr g, std::vector<double> v);

  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }
  std::size_t size() const { return values.size(); }
};

/// One 2-vector per node.
struct VectorField {
  GridPtr grid;
  std::vector<Vec2> values;

  const Vec2& operator[](std::size_t k) const { return values[k]; }
  std::size_t size() const { return values.size(); }
};

/// Samples f at every active node.
GridFunction sample(GridPtr grid, const std::function<double(const Vec2&)>& f);

/// Sup norm over active nodes.
double sup_norm(const GridFunction& u);
/// Sup norm of a - b over active nodes (same grid required).
double sup_distance(const GridFunction& a, const GridFunction& b);

/// P1 element gradient on triangle t.
Vec2 element_gradient(const GridFunction& u, std::size_t t);

/// Area-weighted average of P1 element gradients at every node.
VectorField recover_gradient(const GridFunction& u);

/// P1 interpolant of u at x. Throws OutOfDomainError outside kept triangles.
double interpolate(const GridFunction& u, const Vec2& x);

enum class SupMode { raw, centered, linear_corrected };

/// Smallest admissible ball radius: one ring of nodes around the center.
double resolution_floor(const Grid& grid);

/// Sup over active nodes in the closed ball B_r(x0) of |u|, |u - u(x0)| or
/// |u - u(x0) - g.(x - x0)| depending on mode. Throws ResolutionError when
/// r is below resolution_floor.
double sup_ball(const GridFunction& u, std::size_t x0, double r, SupMode mode,
                const Vec2& g = Vec2::Zero());
double sup_ball(const GridFunction& u, const Vec2& x0, double r, SupMode mode,
                const Vec2& g = Vec2::Zero());

}  // namespace plap
