#pragma once

// Normalization and blow-up maps used by the regularity argument, applied to
// discrete fields by P1 resampling onto the same grid:
//
//   theta:  v(x) = u(theta x)/|u|,                 theta = (delta0 |u|^{p-1}/|f|)^{1/p}
//   lambda: v(x) = (u(x0 + l x) - u(x0))/(l^{p'} + |grad u(x0)| l)
//   mu:     w(x) = (u(x0 + mu x) - u(x0))/mu^{p'},  mu = |grad u(x0)|^{p-1}
//
// A transform that needs u outside the meshed domain throws OutOfDomainError.

#include <cstddef>
#include <functional>

#include "plap/grid.hpp"

namespace plap {

enum class ScalingKind { theta, lambda, mu };

const char* to_string(ScalingKind kind);

struct ScalingRecord {
  ScalingKind kind = ScalingKind::theta;
  double factor = 1.0;       ///< spatial scale theta, lambda0 or mu
  double value_scale = 1.0;  ///< amplitude divisor
  /// theta: delta0 (the sup of the rescaled source).
  /// lambda: the source damping factor lambda0^p/(lambda0^{p'} + |g| lambda0)^{p-1}, at most 1.
  /// mu: 1 (the source is only recentred).
  double claimed_rhs_bound = 0.0;
  Vec2 source_point = Vec2::Zero();
  double p = 0.0;
  double grad0_norm = 0.0;      ///< |grad u(x0)| (lambda, mu)
  double output_sup = 0.0;      ///< sup of the rescaled field (theta: of the rescaled source)
  double output_grad0 = 0.0;    ///< |grad v(0)| recovered on the rescaled field (lambda, mu)
  double delta0_max = 0.0;      ///< theta: largest delta0 with theta <= 1
  bool bound_holds = true;      ///< lambda: |v| <= 1 + h; theta: |f~| <= delta0
};

struct ThetaResult {
  GridFunction v;
  GridFunction f_tilde;
  ScalingRecord record;
};

struct RescaleResult {
  GridFunction v;
  ScalingRecord record;
};

/// Throws NumericalBreakdown unless p'(p-1) = p and p' - 1 = 1/(p-1) to 1e-12.
void check_exponent_identities(double p);

/// P1 resampling: out(x_k) = u(map(x_k)) at every active node.
GridFunction resample(const GridFunction& u, const std::function<Vec2(const Vec2&)>& map);

ThetaResult theta_normalize(const GridFunction& u, const GridFunction& f, double p, double delta0 = 1.0);
RescaleResult lambda_rescale(const GridFunction& u, std::size_t x0, double lambda0, double p);
RescaleResult mu_rescale(const GridFunction& u, std::size_t x0, double p);

}  // namespace plap
