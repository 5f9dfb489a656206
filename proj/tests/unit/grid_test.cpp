#include <doctest.h>

#include <cmath>
#include <random>

#include "plap/errors.hpp"
#include "plap/grid.hpp"

using namespace plap;

namespace {

// Plain re-implementation of area-weighted recovery on the cell layout; all
// triangles have equal area, so it reduces to a per-node mean.
std::vector<Vec2> brute_recovery(const Grid& g, const std::vector<double>& u) {
  std::vector<Vec2> sum(g.node_count(), Vec2::Zero());
  std::vector<int> count(g.node_count(), 0);
  const double h = g.h();
  for (int j = 0; j < g.n(); ++j) {
    for (int i = 0; i < g.n(); ++i) {
      const std::size_t a = g.index(i, j), b = g.index(i + 1, j), c = g.index(i + 1, j + 1), d = g.index(i, j + 1);
      if (g.active(a) && g.active(b) && g.active(c)) {
        const Vec2 lower((u[b] - u[a]) / h, (u[c] - u[b]) / h);
        for (std::size_t v : {a, b, c}) sum[v] += lower, ++count[v];
      }
      if (g.active(a) && g.active(c) && g.active(d)) {
        const Vec2 upper((u[c] - u[d]) / h, (u[d] - u[a]) / h);
        for (std::size_t v : {a, c, d}) sum[v] += upper, ++count[v];
      }
    }
  }
  for (std::size_t k = 0; k < sum.size(); ++k) {
    if (count[k] > 0) sum[k] /= count[k];
  }
  return sum;
}

double recovery_error(int n) {
  auto g = build_grid(n, false);
  const GridFunction u = sample(g, [](const Vec2& x) { return std::sin(x.x()) * std::cos(x.y()); });
  const VectorField grad = recover_gradient(u);
  double err = 0.0;
  for (std::size_t k = 0; k < g->node_count(); ++k) {
    const Vec2& x = g->node(k);
    const Vec2 exact(std::cos(x.x()) * std::cos(x.y()), -std::sin(x.x()) * std::sin(x.y()));
    err = std::max(err, (grad[k] - exact).norm());
  }
  return err;
}

}  // namespace

TEST_CASE("grid sizes") {
  auto g4 = build_grid(4, false);
  CHECK(g4->node_count() == 25);
  CHECK(g4->triangle_count() == 32);
  CHECK(g4->h() == 0.5);
  auto g64 = build_grid(64, false);
  CHECK(g64->node_count() == 4225);
  CHECK(g64->triangle_count() == 8192);
  CHECK_THROWS_AS(build_grid(5, false), ConfigError);
  CHECK_THROWS_AS(build_grid(2, false), ConfigError);
  CHECK_THROWS_AS(build_grid(0, true), ConfigError);
}

TEST_CASE("disk mask") {
  auto g = build_grid(4, true);
  CHECK(g->active(g->index(2, 2)));
  for (auto [i, j] : {std::pair{0, 0}, {0, 4}, {4, 0}, {4, 4}}) CHECK_FALSE(g->active(g->index(i, j)));
  CHECK(g->node(g->index(2, 2)).norm() == 0.0);

  auto d = build_grid(32, true);
  for (std::size_t k = 0; k < d->node_count(); ++k) {
    if (!d->active(k)) continue;
    CHECK(d->node(k).norm() <= 1.0 + 0.5 * d->h() + 1e-12);
    // Interior nodes carry their whole patch, so all six mesh neighbours are
    // active.
    const NodeIJ c = d->ij(k);
    bool masked_neighbour = false;
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}}) {
      if (!d->in_range(c.i + di, c.j + dj) || !d->active(d->index(c.i + di, c.j + dj))) masked_neighbour = true;
    }
    if (d->interior(k)) {
      CHECK(d->valence(k) == 6);
      CHECK_FALSE(masked_neighbour);
    }
  }
  CHECK(d->total_area() < 4.0);
  CHECK(d->total_area() > 3.0);
}

TEST_CASE("triangle areas and flags") {
  for (bool disk : {false, true}) {
    auto g = build_grid(16, disk);
    const double h = g->h();
    double sum = 0.0;
    for (std::size_t t = 0; t < g->triangle_count(); ++t) {
      CHECK(g->signed_area(t) == doctest::Approx(h * h / 2).epsilon(1e-12));
      CHECK(g->area(t) == doctest::Approx(h * h / 2).epsilon(1e-12));
      sum += g->area(t);
    }
    CHECK(std::abs(sum - g->total_area()) < 1e-12);
    if (!disk) CHECK(std::abs(sum - 4.0) < 1e-10);
    double mass = 0.0;
    for (std::size_t k = 0; k < g->node_count(); ++k) mass += g->lumped_mass(k);
    CHECK(std::abs(mass - sum) < 1e-12);
  }
  auto g = build_grid(8, false);
  for (std::size_t k = 0; k < g->node_count(); ++k) {
    const NodeIJ c = g->ij(k);
    const bool edge = c.i == 0 || c.j == 0 || c.i == 8 || c.j == 8;
    CHECK(g->boundary(k) == edge);
    if (!edge) CHECK(g->valence(k) >= 3);
  }
}

TEST_CASE("node lookup") {
  auto g = build_grid(8, false);
  CHECK(g->node_at(Vec2(0.0, 0.0)) == g->index(4, 4));
  CHECK(g->node_at(Vec2(-1.0, 0.5)) == g->index(0, 6));
  CHECK_FALSE(g->find_node(Vec2(0.1, 0.0)).has_value());
  CHECK_THROWS_AS(g->node_at(Vec2(0.1, 0.0)), LookupError);
  CHECK_THROWS_AS(g->node_at(NodeIJ{9, 0}), LookupError);
  auto d = build_grid(8, true);
  CHECK_THROWS_AS(d->node_at(NodeIJ{0, 0}), LookupError);
}

TEST_CASE("grid function validation") {
  auto g = build_grid(4, false);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(3, 0.0)), ConfigError);
  std::vector<double> bad(g->node_count(), 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(GridFunction(g, bad), NumericalBreakdown);
}

TEST_CASE("gradient recovery exact on affine fields") {
  for (bool disk : {false, true}) {
    auto g = build_grid(16, disk);
    const VectorField gx = recover_gradient(sample(g, [](const Vec2& x) { return x.x(); }));
    const VectorField ga = recover_gradient(sample(g, [](const Vec2& x) { return 3 * x.y() - 2 * x.x() + 0.5; }));
    for (std::size_t k = 0; k < g->node_count(); ++k) {
      if (!g->active(k)) continue;
      CHECK((gx[k] - Vec2(1, 0)).norm() < 1e-12);
      CHECK((ga[k] - Vec2(-2, 3)).norm() < 1e-12);
    }
  }
}

TEST_CASE("gradient recovery matches brute-force averaging") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (bool disk : {false, true}) {
    auto g = build_grid(12, disk);
    GridFunction u(g);
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (g->active(k)) u.values[k] = uni(rng);
    }
    const auto ref = brute_recovery(*g, u.values);
    const VectorField grad = recover_gradient(u);
    for (std::size_t k = 0; k < g->node_count(); ++k) {
      if (g->active(k)) CHECK((grad[k] - ref[k]).norm() < 1e-12);
    }
  }
  // x^2 at the origin: the averaging stencil is odd-symmetric there.
  auto g = build_grid(16, false);
  const VectorField sq = recover_gradient(sample(g, [](const Vec2& x) { return x.x() * x.x(); }));
  const auto ref = brute_recovery(*g, sample(g, [](const Vec2& x) { return x.x() * x.x(); }).values);
  const std::size_t o = g->index(8, 8);
  CHECK(std::abs(sq[o].x()) < 1e-14);
  CHECK(std::abs(sq[o].y()) < 1e-14);
  CHECK((sq[o] - ref[o]).norm() < 1e-14);
}

TEST_CASE("gradient recovery is first order on smooth fields") {
  const double e32 = recovery_error(32), e64 = recovery_error(64), e128 = recovery_error(128);
  CAPTURE(e32);
  CAPTURE(e64);
  CAPTURE(e128);
  CHECK(e32 / e64 >= 1.8);
  CHECK(e32 / e64 <= 2.2);
  CHECK(e64 / e128 >= 1.8);
  CHECK(e64 / e128 <= 2.2);
}

TEST_CASE("interpolation") {
  auto g = build_grid(8, true);
  const GridFunction u = sample(g, [](const Vec2& x) { return 1 + 2 * x.x() - x.y(); });
  for (const Vec2& x : {Vec2(0.13, -0.41), Vec2(0.0, 0.0), Vec2(-0.7, 0.2), Vec2(0.25, 0.5)}) {
    CHECK(interpolate(u, x) == doctest::Approx(1 + 2 * x.x() - x.y()).epsilon(1e-13));
  }
  for (std::size_t k = 0; k < g->node_count(); ++k) {
    if (g->active(k)) CHECK(interpolate(u, g->node(k)) == u.values[k]);
  }
  CHECK_THROWS_AS(interpolate(u, Vec2(0.95, 0.95)), OutOfDomainError);
  CHECK_THROWS_AS(interpolate(u, Vec2(1.5, 0.0)), OutOfDomainError);
}

TEST_CASE("sup over balls") {
  auto g = build_grid(64, false);
  const std::size_t o = g->index(32, 32);
  const GridFunction c = sample(g, [](const Vec2&) { return 2.5; });
  CHECK(sup_ball(c, o, 0.25, SupMode::centered) == 0.0);
  CHECK(sup_ball(c, o, 0.25, SupMode::raw) == 2.5);

  const Vec2 slope(0.7, -1.3);
  const GridFunction a = sample(g, [&](const Vec2& x) { return 0.2 + slope.dot(x); });
  const std::size_t x1 = g->index(40, 20);
  CHECK(sup_ball(a, x1, 0.3, SupMode::linear_corrected, slope) < 1e-12);
  CHECK(sup_ball(a, g->node(x1), 0.3, SupMode::linear_corrected, slope) < 1e-12);

  const GridFunction r15 = sample(g, [](const Vec2& x) { return std::pow(x.norm(), 1.5); });
  // Brute force over the ball.
  double brute = 0.0;
  for (std::size_t k = 0; k < g->node_count(); ++k) {
    if (g->node(k).norm() <= 0.25 + 1e-12) brute = std::max(brute, std::pow(g->node(k).norm(), 1.5));
  }
  const double s = sup_ball(r15, o, 0.25, SupMode::centered);
  CHECK(s == doctest::Approx(brute).epsilon(1e-14));
  CHECK(std::abs(s - 0.125) <= g->h());

  double prev = 0.0;
  for (double r = resolution_floor(*g); r <= 1.0; r += 0.01) {
    const double v = sup_ball(r15, x1, r, SupMode::centered);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(sup_ball(r15, o, 0.5 * g->h(), SupMode::raw), ResolutionError);
  CHECK_THROWS_AS(sup_ball(r15, Vec2(0.01, 0.0), 0.25, SupMode::raw), LookupError);
}
