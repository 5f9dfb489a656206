#pragma once

// Linear P1 Poisson reference built without the solver: the cell layout is
// walked here, stiffness entries come from the cotangent formula and the
// interior system is factored directly.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "plap/grid.hpp"

namespace plap::oracle {

struct P1System {
  Eigen::SparseMatrix<double> stiffness;  ///< all nodes
  std::vector<double> mass;               ///< lumped, all nodes
};

inline std::vector<std::array<std::size_t, 3>> cell_triangles(const Grid& g) {
  std::vector<std::array<std::size_t, 3>> out;
  for (int j = 0; j < g.n(); ++j) {
    for (int i = 0; i < g.n(); ++i) {
      const std::size_t a = g.index(i, j), b = g.index(i + 1, j), c = g.index(i + 1, j + 1), d = g.index(i, j + 1);
      for (const auto& t : {std::array<std::size_t, 3>{a, b, c}, std::array<std::size_t, 3>{a, c, d}}) {
        if (g.active(t[0]) && g.active(t[1]) && g.active(t[2])) out.push_back(t);
      }
    }
  }
  return out;
}

inline P1System assemble_laplacian(const Grid& g) {
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> mass(g.node_count(), 0.0);
  for (const auto& t : cell_triangles(g)) {
    for (int k = 0; k < 3; ++k) {
      // Edge (a, b) opposite vertex c contributes cot(angle at c) / 2.
      const std::size_t a = t[(k + 1) % 3], b = t[(k + 2) % 3], c = t[k];
      const Vec2 ea = g.node(a) - g.node(c), eb = g.node(b) - g.node(c);
      const double cross = ea.x() * eb.y() - ea.y() * eb.x();
      const double w = 0.5 * ea.dot(eb) / std::abs(cross);
      trip.emplace_back(a, b, -w);
      trip.emplace_back(b, a, -w);
      trip.emplace_back(a, a, w);
      trip.emplace_back(b, b, w);
    }
    const Vec2 e1 = g.node(t[1]) - g.node(t[0]), e2 = g.node(t[2]) - g.node(t[0]);
    const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    for (std::size_t v : t) mass[v] += area / 3.0;
  }
  P1System sys;
  sys.stiffness.resize(static_cast<Eigen::Index>(g.node_count()), static_cast<Eigen::Index>(g.node_count()));
  sys.stiffness.setFromTriplets(trip.begin(), trip.end());
  sys.mass = std::move(mass);
  return sys;
}

/// Interior nodes have their full six-triangle patch.
inline std::vector<bool> interior_nodes(const Grid& g) {
  std::vector<int> count(g.node_count(), 0);
  for (const auto& t : cell_triangles(g)) {
    for (std::size_t v : t) ++count[v];
  }
  std::vector<bool> out(g.node_count(), false);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const NodeIJ c = g.ij(k);
    const bool on_edge = c.i == 0 || c.j == 0 || c.i == g.n() || c.j == g.n();
    out[k] = g.active(k) && !on_edge && count[k] == 6;
  }
  return out;
}

/// Solves K u = M f at interior nodes with u = g elsewhere.
inline std::vector<double> poisson_direct(const Grid& g, const std::vector<double>& f, const std::vector<double>& bc) {
  const P1System sys = assemble_laplacian(g);
  const std::vector<bool> inner = interior_nodes(g);
  std::vector<Eigen::Index> dof(g.node_count(), -1);
  Eigen::Index m = 0;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (inner[k]) dof[k] = m++;
  }
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (inner[k]) rhs[dof[k]] += sys.mass[k] * f[k];
  }
  for (int col = 0; col < sys.stiffness.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.stiffness, col); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row()), c = static_cast<std::size_t>(it.col());
      if (!inner[r]) continue;
      if (inner[c]) {
        trip.emplace_back(dof[r], dof[c], it.value());
      } else if (g.active(c)) {
        rhs[dof[r]] -= it.value() * bc[c];
      }
    }
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("oracle factorization failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  std::vector<double> u(g.node_count(), 0.0);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (inner[k]) {
      u[k] = x[dof[k]];
    } else if (g.active(k)) {
      u[k] = bc[k];
    }
  }
  return u;
}

}  // namespace plap::oracle
