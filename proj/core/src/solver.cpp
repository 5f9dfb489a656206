#include "plap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "plap/errors.hpp"

namespace plap {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Interior nodes are the unknowns; dof[k] == -1 for everything else.
struct DofMap {
  std::vector<std::int64_t> dof;
  std::vector<std::size_t> node;

  explicit DofMap(const Grid& g) : dof(g.node_count(), -1) {
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      if (g.interior(k)) {
        dof[k] = static_cast<std::int64_t>(node.size());
        node.push_back(k);
      }
    }
  }
  std::size_t size() const { return node.size(); }
};

bool same_grid(const Grid& a, const Grid& b) { return a.n() == b.n() && a.disk() == b.disk(); }

double integrand(double s, double p, double eps) {
  return (std::pow(s, 0.5 * p) - std::pow(eps, p)) / p;
}

// E(u + alpha d) - E(u), accurate when the step is tiny relative to E.
// Per triangle: s^q (exp(q log1p(delta/s)) - 1) with s = |g|^2 + eps^2.
double energy_change(const GridFunction& u, const GridFunction& d, double alpha, const ProblemSpec& spec,
                     double eps) {
  const Grid& g = *u.grid;
  const double p = spec.p;
  const double q = 0.5 * p;
  double de = 0.0;
  for (std::size_t t = 0; t < g.triangle_count(); ++t) {
    const Vec2 gu = element_gradient(u, t);
    const Vec2 gd = element_gradient(d, t);
    const double s = gu.squaredNorm() + eps * eps;
    const double delta = alpha * (2.0 * gu.dot(gd) + alpha * gd.squaredNorm());
    double term = 0.0;
    if (s > 0.0) {
      term = std::pow(s, q) * std::expm1(q * std::log1p(delta / s));
    } else {
      term = std::pow(std::max(delta, 0.0), q);
    }
    de += g.area(t) * term / p;
  }
  double load = 0.0;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (g.active(k)) load += g.lumped_mass(k) * spec.f.values[k] * d.values[k];
  }
  return de - alpha * load;
}

Vec residual_vector(const GridFunction& u, const ProblemSpec& spec, double eps, const DofMap& dofs) {
  const Grid& g = *u.grid;
  Vec r = Vec::Zero(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t t = 0; t < g.triangle_count(); ++t) {
    const Vec2 gu = element_gradient(u, t);
    const double s = gu.squaredNorm() + eps * eps;
    const double a = std::pow(s, 0.5 * (spec.p - 2.0));
    const auto& tri = g.triangle(t);
    const auto& dphi = g.shape_gradients(t);
    for (int v = 0; v < 3; ++v) {
      const auto i = dofs.dof[tri[v]];
      if (i >= 0) r[i] += g.area(t) * a * gu.dot(dphi[v]);
    }
  }
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const std::size_t k = dofs.node[i];
    r[static_cast<Eigen::Index>(i)] -= g.lumped_mass(k) * spec.f.values[k];
  }
  return r;
}

// Hessian of E_eps restricted to interior dofs. Integrand Hessian:
//   s^{(p-2)/2} I + (p-2) s^{(p-4)/2} g g^T,  s = |g|^2 + eps^2.
SpMat hessian(const GridFunction& u, const ProblemSpec& spec, double eps, const DofMap& dofs) {
  const Grid& g = *u.grid;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * g.triangle_count());
  for (std::size_t t = 0; t < g.triangle_count(); ++t) {
    const Vec2 gu = element_gradient(u, t);
    const double s = gu.squaredNorm() + eps * eps;
    const double a = std::pow(s, 0.5 * (spec.p - 2.0));
    const double b = spec.p == 2.0 ? 0.0 : (spec.p - 2.0) * std::pow(s, 0.5 * (spec.p - 4.0));
    Eigen::Matrix2d H = a * Eigen::Matrix2d::Identity() + b * gu * gu.transpose();
    const auto& tri = g.triangle(t);
    const auto& dphi = g.shape_gradients(t);
    for (int va = 0; va < 3; ++va) {
      const auto i = dofs.dof[tri[va]];
      if (i < 0) continue;
      const Vec2 Hd = H * dphi[va];
      for (int vb = 0; vb < 3; ++vb) {
        const auto j = dofs.dof[tri[vb]];
        if (j < 0) continue;
        trip.emplace_back(static_cast<int>(i), static_cast<int>(j), g.area(t) * Hd.dot(dphi[vb]));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(dofs.size());
  SpMat K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

double sup_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

ProblemSpec make_problem(GridPtr grid, double p, const ScalarExpr& f, const ScalarExpr& g) {
  ProblemSpec spec;
  spec.p = p;
  spec.f = sample(grid, f);
  spec.dirichlet = sample(grid, g);
  validate(spec);
  return spec;
}

void validate(const ProblemSpec& spec) {
  if (!(spec.p >= 2.0) || !std::isfinite(spec.p)) {
    throw ConfigError("problem: p must be >= 2, got " + std::to_string(spec.p));
  }
  if (!spec.f.grid || !spec.dirichlet.grid) throw ConfigError("problem: source and boundary data required");
  if (!same_grid(*spec.f.grid, *spec.dirichlet.grid)) {
    throw ConfigError("problem: source and boundary data live on different grids");
  }
  for (double v : spec.f.values) {
    if (!std::isfinite(v)) throw ConfigError("problem: source is not finite");
  }
  for (double v : spec.dirichlet.values) {
    if (!std::isfinite(v)) throw ConfigError("problem: boundary data is not finite");
  }
}

void validate(const SolverConfig& c) {
  if (!(c.eps_min > 0.0) || !(c.eps_min <= c.eps0)) {
    throw ConfigError("solver: need 0 < eps_min <= eps0");
  }
  if (!(c.eps_factor > 0.0 && c.eps_factor < 1.0)) throw ConfigError("solver: eps_factor must lie in (0,1)");
  if (!(c.armijo_c > 0.0 && c.armijo_c < 1.0)) throw ConfigError("solver: armijo_c must lie in (0,1)");
  if (!(c.armijo_shrink > 0.0 && c.armijo_shrink < 1.0)) {
    throw ConfigError("solver: armijo_shrink must lie in (0,1)");
  }
  if (!(c.newton_tol > 0.0)) throw ConfigError("solver: newton_tol must be positive");
  if (c.max_newton < 1) throw ConfigError("solver: max_newton must be >= 1");
  if (!(c.cg_tol > 0.0 && c.cg_tol < 1.0)) throw ConfigError("solver: cg_tol must lie in (0,1)");
}

std::vector<double> continuation_schedule(const SolverConfig& c) {
  validate(c);
  std::vector<double> eps;
  for (double e = c.eps0; e > c.eps_min * (1.0 + 1e-9); e *= c.eps_factor) eps.push_back(e);
  eps.push_back(c.eps_min);
  return eps;
}

double energy(const GridFunction& u, const ProblemSpec& spec, double eps) {
  const Grid& g = *u.grid;
  double e = 0.0;
  for (std::size_t t = 0; t < g.triangle_count(); ++t) {
    const Vec2 gu = element_gradient(u, t);
    e += g.area(t) * integrand(gu.squaredNorm() + eps * eps, spec.p, eps);
  }
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (g.active(k)) e -= g.lumped_mass(k) * spec.f.values[k] * u.values[k];
  }
  return e;
}

GridFunction residual(const GridFunction& u, const ProblemSpec& spec, double eps) {
  const DofMap dofs(*u.grid);
  const Vec r = residual_vector(u, spec, eps, dofs);
  GridFunction out(u.grid);
  for (std::size_t i = 0; i < dofs.size(); ++i) out.values[dofs.node[i]] = r[static_cast<Eigen::Index>(i)];
  return out;
}

SolverResult solve(const ProblemSpec& spec, const SolverConfig& config) {
  validate(spec);
  const std::vector<double> schedule = continuation_schedule(config);
  const GridPtr grid = spec.f.grid;
  const Grid& g = *grid;
  const DofMap dofs(g);

  SolverResult result;
  result.newton_tol = config.newton_tol * (sup_norm(spec.f) + 1.0);

  GridFunction u(grid);
  if (config.initial) {
    if (!same_grid(*config.initial->grid, g)) throw ConfigError("solver: initial guess on a different grid");
    u.values = config.initial->values;
  }
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (!g.active(k)) u.values[k] = 0.0;
    else if (g.boundary(k)) u.values[k] = spec.dirichlet.values[k];
  }

  GridFunction step(grid);
  for (double eps : schedule) {
    StageReport stage;
    stage.eps = eps;
    double e = energy(u, spec, eps);
    if (!std::isfinite(e)) throw NumericalBreakdown("solve: non-finite energy at eps = " + std::to_string(eps));
    stage.energies.push_back(e);

    Vec r = residual_vector(u, spec, eps, dofs);
    stage.residual_sup = sup_abs(r);
    while (stage.residual_sup > result.newton_tol && stage.iterations < config.max_newton) {
      const SpMat K = hessian(u, spec, eps, dofs);
      Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
      cg.setTolerance(config.cg_tol);
      cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * K.rows()));
      cg.compute(K);
      Vec d = cg.solve(-r);
      double slope = r.dot(d);
      if (!d.allFinite() || !(slope < 0.0)) {
        d = -r;
        slope = -r.squaredNorm();
      }
      std::fill(step.values.begin(), step.values.end(), 0.0);
      for (std::size_t i = 0; i < dofs.size(); ++i) step.values[dofs.node[i]] = d[static_cast<Eigen::Index>(i)];

      double alpha = 1.0;
      double de = energy_change(u, step, alpha, spec, eps);
      while (!(de <= config.armijo_c * alpha * slope) && alpha > 1e-14) {
        alpha *= config.armijo_shrink;
        de = energy_change(u, step, alpha, spec, eps);
      }
      if (!std::isfinite(de)) throw NumericalBreakdown("solve: non-finite energy change in line search");
      if (!(de <= config.armijo_c * alpha * slope)) {
        result.message = "line search failed at eps = " + std::to_string(eps);
        break;
      }
      for (std::size_t i = 0; i < dofs.size(); ++i) u.values[dofs.node[i]] += alpha * d[static_cast<Eigen::Index>(i)];
      e += de;
      stage.energies.push_back(e);
      ++stage.iterations;
      r = residual_vector(u, spec, eps, dofs);
      stage.residual_sup = sup_abs(r);
      if (!std::isfinite(stage.residual_sup)) throw NumericalBreakdown("solve: non-finite residual");
    }
    stage.converged = stage.residual_sup <= result.newton_tol;
    result.newton_iters_total += stage.iterations;
    result.energy_history.insert(result.energy_history.end(), stage.energies.begin(), stage.energies.end());
    result.eps_final = eps;
    result.residual_sup = stage.residual_sup;
    result.stages.push_back(std::move(stage));
    if (!result.stages.back().converged) {
      if (result.message.empty()) {
        result.message = "max_newton = " + std::to_string(config.max_newton) + " exceeded at eps = " +
                         std::to_string(eps);
      }
      result.u = u;
      result.converged = false;
      return result;
    }
  }
  result.u = std::move(u);
  result.converged = true;
  return result;
}

}  // namespace plap
