#include "plap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plap/errors.hpp"
#include "plap/exponents.hpp"
#include "plap/oscillation.hpp"

namespace plap {

CorrectorRow corrector_instance(GridPtr grid, double p, const ScalarExpr& shape, double scale,
                                const ScalarExpr& trace, const SolverConfig& config) {
  const ScalarExpr f = [&shape, scale](const Vec2& x) { return scale * shape(x); };
  const ProblemSpec forced = make_problem(grid, p, f, trace);
  const SolverResult u = solve(forced, config);

  CorrectorRow row;
  row.scale = scale;
  row.f_sup = sup_norm(forced.f);
  row.u_sup = sup_norm(u.u);
  if (row.u_sup > 1.0) {
    throw ConfigError("corrector: |u| = " + std::to_string(row.u_sup) + " exceeds 1; rescale the source or trace");
  }

  ProblemSpec homogeneous{p, GridFunction(grid), u.u};
  SolverConfig warm = config;
  warm.initial = u.u;
  const SolverResult h = solve(homogeneous, warm);

  GridFunction xi(grid);
  for (std::size_t k = 0; k < xi.size(); ++k) xi.values[k] = h.u.values[k] - u.u.values[k];
  row.xi_sup = sup_norm(xi);
  const VectorField dxi = recover_gradient(xi);
  for (std::size_t k = 0; k < grid->node_count(); ++k) {
    if (grid->active(k) && grid->node(k).norm() <= 0.5 + 1e-12) row.grad_xi_sup = std::max(row.grad_xi_sup, dxi[k].norm());
  }
  row.residual_u = u.residual_sup;
  row.residual_h = h.residual_sup;
  row.newton_iters = u.newton_iters_total + h.newton_iters_total;
  row.converged = u.converged && h.converged;
  return row;
}

std::vector<CorrectorRow> corrector_sweep(GridPtr grid, double p, const ScalarExpr& shape,
                                          std::span<const double> scales, const ScalarExpr& trace,
                                          const SolverConfig& config) {
  std::vector<CorrectorRow> rows;
  for (double c : scales) rows.push_back(corrector_instance(grid, p, shape, c, trace, config));
  return rows;
}

bool corrector_monotone(std::span<const CorrectorRow> rows) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].xi_sup < rows[k - 1].xi_sup) || !(rows[k].grad_xi_sup < rows[k - 1].grad_xi_sup)) return false;
  }
  return true;
}

double radial_exact(double p, const Vec2& x) {
  return radial_constant(2, p) * (1.0 - std::pow(x.norm(), conjugate(p)));
}

ConvergenceRow radial_instance(int n, double p, const SolverConfig& config) {
  const GridPtr grid = build_grid(n, true);
  const ProblemSpec spec = make_problem(grid, p, parse_expression("const:1"), parse_expression("zero"));
  const SolverResult res = solve(spec, config);

  ConvergenceRow row;
  row.n = n;
  row.h = grid->h();
  for (std::size_t k = 0; k < grid->node_count(); ++k) {
    if (grid->active(k)) {
      row.linf_error = std::max(row.linf_error, std::abs(res.u.values[k] - radial_exact(p, grid->node(k))));
    }
  }
  const std::size_t origin = grid->index(n / 2, n / 2);
  row.levels = std::min(5, max_levels(*grid, 0.25, 0.5));
  if (row.levels >= 3) {
    const OscillationProfile prof = profile(res.u, origin, 0.25, row.levels, 0.5);
    row.origin_slope = fit_exponent(prof, OscKind::centered).slope;
    row.crack_constant = crack_bound_constant(prof, p);
    row.triangle_ok = triangle_inequality_holds(prof);
  }
  row.residual_sup = res.residual_sup;
  row.newton_iters = res.newton_iters_total;
  row.converged = res.converged;
  return row;
}

std::vector<ConvergenceRow> convergence_study(std::span<const int> ns, double p, const SolverConfig& config) {
  std::vector<ConvergenceRow> rows;
  for (int n : ns) {
    ConvergenceRow row = radial_instance(n, p, config);
    if (!rows.empty() && rows.back().linf_error > 0.0) row.ratio = row.linf_error / rows.back().linf_error;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace plap
