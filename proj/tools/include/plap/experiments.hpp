#pragma once

// Multi-solve experiments shared by the command line and the acceptance run.

#include <span>
#include <string>
#include <vector>

#include "plap/expressions.hpp"
#include "plap/grid.hpp"
#include "plap/solver.hpp"

namespace plap {

/// One instance of the corrector experiment: u solves -Δ_p u = c*shape with
/// trace g, h is the p-harmonic function with the trace of u, xi = h - u.
struct CorrectorRow {
  double scale = 0.0;
  double f_sup = 0.0;
  double u_sup = 0.0;
  double xi_sup = 0.0;
  double grad_xi_sup = 0.0;  ///< recovered gradient, nodes in B_{1/2}
  double residual_u = 0.0;
  double residual_h = 0.0;
  int newton_iters = 0;
  bool converged = false;
};

/// Throws ConfigError when |u| exceeds 1 (the normalization the experiment assumes).
CorrectorRow corrector_instance(GridPtr grid, double p, const ScalarExpr& shape, double scale,
                                const ScalarExpr& trace, const SolverConfig& config = {});

std::vector<CorrectorRow> corrector_sweep(GridPtr grid, double p, const ScalarExpr& shape,
                                          std::span<const double> scales, const ScalarExpr& trace,
                                          const SolverConfig& config = {});

/// True when xi_sup and grad_xi_sup both strictly decrease along the rows.
bool corrector_monotone(std::span<const CorrectorRow> rows);

/// Radial benchmark -Δ_p u = 1 on the unit disk, zero trace, against
/// c_p (1 - |x|^{p'}), with the oscillation data at the origin.
struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double linf_error = 0.0;
  double ratio = 0.0;  ///< error over the previous row's error, 0 on the first row
  int levels = 0;      ///< dyadic radii 0.25 * 2^-k used at the origin
  double origin_slope = 0.0;
  double crack_constant = 0.0;
  bool triangle_ok = false;
  double residual_sup = 0.0;
  int newton_iters = 0;
  bool converged = false;
};

/// Exact radial solution at x.
double radial_exact(double p, const Vec2& x);

ConvergenceRow radial_instance(int n, double p, const SolverConfig& config = {});

std::vector<ConvergenceRow> convergence_study(std::span<const int> ns, double p, const SolverConfig& config = {});

}  // namespace plap
