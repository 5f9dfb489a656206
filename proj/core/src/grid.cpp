#include "plap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plap/errors.hpp"

namespace plap {

namespace {

// Relative slack for ball membership and node lookup. Node coordinates are
// (2i - n)/n, so exact radii like 0.25 land on nodes up to rounding.
constexpr double kBallSlack = 1e-12;

bool inside_disk(const Vec2& x, double h) { return x.norm() <= 1.0 + 0.5 * h + 1e-12; }

}  // namespace

GridPtr build_grid(int n, bool use_disk_mask) {
  if (n < 4 || n % 2 != 0) {
    throw ConfigError("grid: n must be even and >= 4, got " + std::to_string(n));
  }
  std::shared_ptr<Grid> g(new Grid());
  g->n_ = n;
  g->h_ = 2.0 / n;
  g->disk_ = use_disk_mask;

  const std::size_t stride = static_cast<std::size_t>(n + 1);
  const std::size_t count = stride * stride;
  g->nodes_.resize(count);
  g->active_.assign(count, 1);
  g->boundary_.assign(count, 0);
  g->lumped_mass_.assign(count, 0.0);
  g->valence_.assign(count, 0);

  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const std::size_t k = g->index(i, j);
      // Symmetric placement so that x(i) == -x(n-i) exactly.
      const double x = (2 * i - n) / static_cast<double>(n);
      const double y = (2 * j - n) / static_cast<double>(n);
      g->nodes_[k] = Vec2(x, y);
      if (use_disk_mask && !inside_disk(g->nodes_[k], g->h_)) g->active_[k] = 0;
    }
  }

  g->cell_triangle_.assign(2 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  const double area = 0.5 * g->h_ * g->h_;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t v00 = g->index(i, j);
      const std::size_t v10 = g->index(i + 1, j);
      const std::size_t v11 = g->index(i + 1, j + 1);
      const std::size_t v01 = g->index(i, j + 1);
      const std::array<Triangle, 2> halves{Triangle{v00, v10, v11}, Triangle{v00, v11, v01}};
      for (int half = 0; half < 2; ++half) {
        const Triangle& tri = halves[half];
        if (!g->active_[tri[0]] || !g->active_[tri[1]] || !g->active_[tri[2]]) continue;
        const std::size_t cell = 2 * (static_cast<std::size_t>(j) * n + i) + half;
        g->cell_triangle_[cell] = static_cast<std::int64_t>(g->triangles_.size());
        g->triangles_.push_back(tri);
        g->areas_.push_back(area);

        const Vec2& a = g->nodes_[tri[0]];
        const Vec2& b = g->nodes_[tri[1]];
        const Vec2& c = g->nodes_[tri[2]];
        const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        // grad of barycentric coordinate k is the rotated opposite edge / det.
        auto rot = [](const Vec2& e) { return Vec2(-e.y(), e.x()); };
        g->shape_grads_.push_back({rot(c - b) / det, rot(a - c) / det, rot(b - a) / det});
        for (std::size_t v : tri) {
          g->lumped_mass_[v] += area / 3.0;
          g->valence_[v] += 1;
        }
      }
    }
  }

  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const std::size_t k = g->index(i, j);
      if (!g->active_[k]) continue;
      const bool edge = i == 0 || j == 0 || i == n || j == n;
      g->boundary_[k] = (edge || g->valence_[k] < 6) ? 1 : 0;
    }
  }
  return g;
}

double Grid::signed_area(std::size_t t) const {
  const Vec2& a = nodes_[triangles_[t][0]];
  const Vec2& b = nodes_[triangles_[t][1]];
  const Vec2& c = nodes_[triangles_[t][2]];
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

double Grid::total_area() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

std::optional<std::size_t> Grid::find_node(const Vec2& x) const {
  const double si = (x.x() + 1.0) / h_;
  const double sj = (x.y() + 1.0) / h_;
  const long i = std::lround(si);
  const long j = std::lround(sj);
  if (i < 0 || j < 0 || i > n_ || j > n_) return std::nullopt;
  const std::size_t k = index(static_cast<int>(i), static_cast<int>(j));
  if ((nodes_[k] - x).norm() > 1e-9 * h_) return std::nullopt;
  if (!active_[k]) return std::nullopt;
  return k;
}

std::size_t Grid::node_at(const Vec2& x) const {
  auto k = find_node(x);
  if (!k) {
    throw LookupError("grid: point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                      ") is not an active grid node");
  }
  return *k;
}

std::size_t Grid::node_at(NodeIJ ij) const {
  if (!in_range(ij.i, ij.j)) {
    throw LookupError("grid: node index (" + std::to_string(ij.i) + ", " + std::to_string(ij.j) +
                      ") out of range for n = " + std::to_string(n_));
  }
  const std::size_t k = index(ij);
  if (!active_[k]) {
    throw LookupError("grid: node (" + std::to_string(ij.i) + ", " + std::to_string(ij.j) +
                      ") is masked out");
  }
  return k;
}

std::optional<Grid::Location> Grid::locate(const Vec2& x) const {
  const double tol = 1e-12;
  if (x.x() < -1.0 - tol || x.x() > 1.0 + tol || x.y() < -1.0 - tol || x.y() > 1.0 + tol) {
    return std::nullopt;
  }
  // Snap to grid lines so that nodes interpolate exactly.
  auto snap = [](double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-10 ? r : v;
  };
  const double s = snap((x.x() + 1.0) / h_);
  const double t = snap((x.y() + 1.0) / h_);
  const int i0 = std::clamp(static_cast<int>(std::floor(s)), 0, n_ - 1);
  const int j0 = std::clamp(static_cast<int>(std::floor(t)), 0, n_ - 1);
  // Points on grid lines also belong to the cells below and to the left,
  // which matters where the disk mask removed the cell above.
  for (int di = 0; di >= -1; --di) {
    for (int dj = 0; dj >= -1; --dj) {
      const int i = i0 + di, j = j0 + dj;
      if (i < 0 || j < 0) continue;
      const double a = s - i;
      const double b = t - j;
      if (a < -tol || a > 1.0 + tol || b < -tol || b > 1.0 + tol) continue;
      const std::size_t cell = 2 * (static_cast<std::size_t>(j) * n_ + i);
      // (i,j), (i+1,j), (i+1,j+1)
      if (a >= b - tol && cell_triangle_[cell] >= 0) {
        return Location{static_cast<std::size_t>(cell_triangle_[cell]), {1.0 - a, a - b, b}};
      }
      // (i,j), (i+1,j+1), (i,j+1)
      if (b >= a - tol && cell_triangle_[cell + 1] >= 0) {
        return Location{static_cast<std::size_t>(cell_triangle_[cell + 1]), {1.0 - b, a, b - a}};
      }
    }
  }
  return std::nullopt;
}

GridFunction::GridFunction(GridPtr g, double fill) : grid(std::move(g)) {
  values.assign(grid->node_count(), 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (grid->active(k)) values[k] = fill;
  }
}

GridFunction::GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->node_count()) {
    throw ConfigError("grid function: expected " + std::to_string(grid->node_count()) +
                      " values, got " + std::to_string(values.size()));
  }
  for (double x : values) {
    if (!std::isfinite(x)) throw NumericalBreakdown("grid function: non-finite value");
  }
}

GridFunction sample(GridPtr grid, const std::function<double(const Vec2&)>& f) {
  GridFunction u(grid);
  for (std::size_t k = 0; k < grid->node_count(); ++k) {
    if (grid->active(k)) u.values[k] = f(grid->node(k));
  }
  return u;
}

double sup_norm(const GridFunction& u) {
  double m = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.grid->active(k)) m = std::max(m, std::abs(u.values[k]));
  }
  return m;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  if (a.grid->n() != b.grid->n() || a.grid->disk() != b.grid->disk()) {
    throw ConfigError("sup_distance: fields live on different grids");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.grid->active(k)) m = std::max(m, std::abs(a.values[k] - b.values[k]));
  }
  return m;
}

Vec2 element_gradient(const GridFunction& u, std::size_t t) {
  const auto& tri = u.grid->triangle(t);
  const auto& dphi = u.grid->shape_gradients(t);
  return u.values[tri[0]] * dphi[0] + u.values[tri[1]] * dphi[1] + u.values[tri[2]] * dphi[2];
}

VectorField recover_gradient(const GridFunction& u) {
  const Grid& g = *u.grid;
  VectorField out{u.grid, std::vector<Vec2>(g.node_count(), Vec2::Zero())};
  std::vector<double> weight(g.node_count(), 0.0);
  for (std::size_t t = 0; t < g.triangle_count(); ++t) {
    const Vec2 grad = element_gradient(u, t);
    const double a = g.area(t);
    for (std::size_t v : g.triangle(t)) {
      out.values[v] += a * grad;
      weight[v] += a;
    }
  }
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (weight[k] > 0.0) out.values[k] /= weight[k];
  }
  return out;
}

double interpolate(const GridFunction& u, const Vec2& x) {
  const auto loc = u.grid->locate(x);
  if (!loc) {
    throw OutOfDomainError("interpolate: point (" + std::to_string(x.x()) + ", " +
                           std::to_string(x.y()) + ") lies outside the meshed domain");
  }
  const auto& tri = u.grid->triangle(loc->triangle);
  return loc->weights[0] * u.values[tri[0]] + loc->weights[1] * u.values[tri[1]] +
         loc->weights[2] * u.values[tri[2]];
}

double resolution_floor(const Grid& grid) { return grid.h(); }

double sup_ball(const GridFunction& u, std::size_t x0, double r, SupMode mode, const Vec2& g) {
  const Grid& grid = *u.grid;
  if (!grid.active(x0)) throw LookupError("sup_ball: base node is masked out");
  const double floor = resolution_floor(grid);
  if (!(r >= floor * (1.0 - kBallSlack))) {
    throw ResolutionError("sup_ball: radius " + std::to_string(r) + " below resolution floor " +
                          std::to_string(floor));
  }
  const Vec2 c = grid.node(x0);
  const double u0 = u.values[x0];
  const NodeIJ center = grid.ij(x0);
  const int reach = static_cast<int>(std::floor(r / grid.h() + 1e-9));
  const double r2 = r * r * (1.0 + kBallSlack);
  double m = 0.0;
  for (int j = std::max(0, center.j - reach); j <= std::min(grid.n(), center.j + reach); ++j) {
    for (int i = std::max(0, center.i - reach); i <= std::min(grid.n(), center.i + reach); ++i) {
      const std::size_t k = grid.index(i, j);
      if (!grid.active(k)) continue;
      const Vec2 d = grid.node(k) - c;
      if (d.squaredNorm() > r2) continue;
      double v = 0.0;
      switch (mode) {
        case SupMode::raw: v = u.values[k]; break;
        case SupMode::centered: v = u.values[k] - u0; break;
        case SupMode::linear_corrected: v = u.values[k] - u0 - g.dot(d); break;
      }
      m = std::max(m, std::abs(v));
    }
  }
  return m;
}

double sup_ball(const GridFunction& u, const Vec2& x0, double r, SupMode mode, const Vec2& g) {
  return sup_ball(u, u.grid->node_at(x0), r, mode, g);
}

}  // namespace plap
