#pragma once

// Discrete p-Poisson solver: minimizes the regularized p-Dirichlet energy
//
//   E_eps(u) = sum_T |T| ((|grad u_T|^2 + eps^2)^{p/2} - eps^p) / p - sum_i m_i f_i u_i
//
// over P1 fields with prescribed values at Dirichlet nodes, by damped
// Newton iterations (Armijo backtracking on E_eps, conjugate-gradient inner
// solves) and geometric continuation eps0 -> eps_min.

#include <optional>
#include <string>
#include <vector>

#include "plap/expressions.hpp"
#include "plap/grid.hpp"

namespace plap {

struct ProblemSpec {
  double p = 2.0;
  GridFunction f;          ///< source, sampled at nodes
  GridFunction dirichlet;  ///< only values at boundary nodes are read
};

/// Samples source and boundary data on `grid`.
ProblemSpec make_problem(GridPtr grid, double p, const ScalarExpr& f, const ScalarExpr& g);

/// Throws ConfigError when p < 2, the fields live on different grids, or
/// the data is not finite.
void validate(const ProblemSpec& spec);

struct SolverConfig {
  double eps0 = 1e-1;
  double eps_min = 1e-8;
  double eps_factor = 0.1;
  double newton_tol = 1e-9;  ///< scaled by (|f|_inf + 1)
  int max_newton = 50;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double cg_tol = 1e-10;
  /// Starting interior values; zero interior when empty.
  std::optional<GridFunction> initial;
};

void validate(const SolverConfig& config);

/// Continuation schedule eps0, eps0*factor, ... ending exactly at eps_min.
std::vector<double> continuation_schedule(const SolverConfig& config);

struct StageReport {
  double eps = 0.0;
  int iterations = 0;
  double residual_sup = 0.0;
  std::vector<double> energies;  ///< energy after each accepted step, first entry is the start
  bool converged = false;
};

struct SolverResult {
  GridFunction u;
  double residual_sup = 0.0;
  std::vector<double> energy_history;  ///< concatenation of stage energies
  std::vector<StageReport> stages;
  int newton_iters_total = 0;
  double eps_final = 0.0;
  double newton_tol = 0.0;  ///< the scaled tolerance actually used
  bool converged = false;
  std::string message;
};

double energy(const GridFunction& u, const ProblemSpec& spec, double eps);

/// dE/du_i at interior nodes, zero at Dirichlet and masked nodes.
GridFunction residual(const GridFunction& u, const ProblemSpec& spec, double eps);

/// Non-convergence is reported through SolverResult::converged; non-finite
/// energies throw NumericalBreakdown.
SolverResult solve(const ProblemSpec& spec, const SolverConfig& config = {});

}  // namespace plap
