#pragma once

// Oscillation profiles around a base node, log-log growth fits, the
// measured constant in sup_{B_r}|u - u(x0)| <= C r^{p'} (1 + |grad u(x0)| r^{1/(1-p)}),
// and the closed form of the dyadic iteration bound.

#include <cstddef>
#include <span>
#include <vector>

#include "plap/grid.hpp"

namespace plap {

struct OscillationProfile {
  std::size_t x0 = 0;
  Vec2 grad0 = Vec2::Zero();
  std::vector<double> radii;         ///< decreasing
  std::vector<double> osc_centered;  ///< sup_{B_r} |u - u(x0)|
  std::vector<double> osc_linear;    ///< sup_{B_r} |u - u(x0) - grad0.(x - x0)|
};

enum class OscKind { centered, linear_corrected };

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> radii_used;
};

enum class PointKind { critical, nondegenerate };

/// Oscillation below this value is treated as zero and trimmed before fits.
inline constexpr double kOscillationFloor = 1e-13;

/// Largest level count with r_max * ratio^(levels-1) >= resolution_floor.
int max_levels(const Grid& grid, double r_max, double ratio);

/// Radii r_k = r_max ratio^k, k < levels. grad0 is the recovered gradient
/// at x0. Throws ResolutionError (naming max_levels) when the smallest
/// radius is below the resolution floor.
OscillationProfile profile(const GridFunction& u, std::size_t x0, double r_max, int levels, double ratio = 0.5);

/// Least squares of log(value) on log(r) over entries above kOscillationFloor.
/// Throws DegenerateInputError when fewer than three survive.
ExponentFit fit_power_law(std::span<const double> radii, std::span<const double> values);

ExponentFit fit_exponent(const OscillationProfile& profile, OscKind which);

/// r^{p'} (1 + |g| r^{1/(1-p)}).
double crack_bound_rhs(double r, double grad_norm, double p);

/// max_k osc_centered(r_k) / crack_bound_rhs(r_k, |grad0|, p).
double crack_bound_constant(const OscillationProfile& profile, double p);

/// Both directions of |osc_linear - osc_centered| <= |grad0| r at every radius.
bool triangle_inequality_holds(const OscillationProfile& profile, double slack = 1e-12);

/// lambda0^{k p'} + g lambda0^k (1 - q^k)/(1 - q), q = lambda0^{p'-1}.
/// lambda0 must lie in (0, 1/2), p > 2, g >= 0, k >= 0.
double iteration_bound(int k, double lambda0, double g, double p);

/// nondegenerate iff grad_norm > r^{1/(p-1)}.
PointKind classify_gradient(double grad_norm, double r, double p);
PointKind classify_point(const GridFunction& u, std::size_t x0, double r, double p);

const char* to_string(PointKind kind);

}  // namespace plap
