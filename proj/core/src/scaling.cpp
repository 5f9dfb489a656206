#include "plap/scaling.hpp"

#include <cmath>
#include <string>

#include "plap/errors.hpp"
#include "plap/exponents.hpp"

namespace plap {

namespace {

constexpr double kIdentityTol = 1e-12;

std::size_t origin_node(const Grid& g) { return g.index(g.n() / 2, g.n() / 2); }

}  // namespace

const char* to_string(ScalingKind kind) {
  switch (kind) {
    case ScalingKind::theta: return "theta";
    case ScalingKind::lambda: return "lambda";
    case ScalingKind::mu: return "mu";
  }
  return "unknown";
}

void check_exponent_identities(double p) {
  const double pc = conjugate(p);
  if (std::abs(pc * (p - 1.0) - p) > kIdentityTol * p) {
    throw NumericalBreakdown("exponent identity p'(p-1) = p violated at p = " + std::to_string(p));
  }
  if (std::abs((pc - 1.0) - 1.0 / (p - 1.0)) > kIdentityTol) {
    throw NumericalBreakdown("exponent identity p' - 1 = 1/(p-1) violated at p = " + std::to_string(p));
  }
}

GridFunction resample(const GridFunction& u, const std::function<Vec2(const Vec2&)>& map) {
  const Grid& g = *u.grid;
  GridFunction out(u.grid);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (g.active(k)) out.values[k] = interpolate(u, map(g.node(k)));
  }
  return out;
}

ThetaResult theta_normalize(const GridFunction& u, const GridFunction& f, double p, double delta0) {
  if (!(p >= 2.0)) throw DomainError("theta_normalize: requires p >= 2");
  if (!(delta0 > 0.0)) throw ConfigError("theta_normalize: delta0 must be positive");
  check_exponent_identities(p);
  const double u_sup = sup_norm(u);
  const double f_sup = sup_norm(f);
  if (!(u_sup > 0.0) || !(f_sup > 0.0)) {
    throw DegenerateInputError("theta_normalize: |u| and |f| must both be nonzero");
  }
  const double delta0_max = f_sup / std::pow(u_sup, p - 1.0);
  const double theta = std::pow(delta0 * std::pow(u_sup, p - 1.0) / f_sup, 1.0 / p);
  if (theta > 1.0 + 1e-12) {
    throw OutOfDomainError("theta_normalize: theta = " + std::to_string(theta) +
                           " > 1 would sample outside the domain; admissible delta0 lies in (0, " +
                           std::to_string(delta0_max) + "]");
  }
  const double multiplier = std::pow(theta, p) / std::pow(u_sup, p - 1.0);

  ThetaResult out;
  auto shrink = [theta](const Vec2& x) -> Vec2 { return theta * x; };
  out.v = resample(u, shrink);
  for (double& v : out.v.values) v /= u_sup;
  out.f_tilde = resample(f, shrink);
  for (double& v : out.f_tilde.values) v *= multiplier;

  const double claimed = multiplier * f_sup;
  if (std::abs(claimed - delta0) > kIdentityTol * delta0) {
    throw NumericalBreakdown("theta_normalize: rescaled source bound " + std::to_string(claimed) +
                             " differs from delta0");
  }
  ScalingRecord& rec = out.record;
  rec.kind = ScalingKind::theta;
  rec.factor = theta;
  rec.value_scale = u_sup;
  rec.claimed_rhs_bound = delta0;
  rec.p = p;
  rec.output_sup = sup_norm(out.f_tilde);
  rec.delta0_max = delta0_max;
  rec.bound_holds = rec.output_sup <= delta0 * (1.0 + kIdentityTol);
  return out;
}

RescaleResult lambda_rescale(const GridFunction& u, std::size_t x0, double lambda0, double p) {
  if (!(lambda0 > 0.0 && lambda0 < 0.5)) {
    throw DomainError("lambda_rescale: lambda0 must lie in (0, 1/2), got " + std::to_string(lambda0));
  }
  if (!(p > 2.0)) throw DomainError("lambda_rescale: requires p > 2");
  check_exponent_identities(p);
  const Grid& g = *u.grid;
  if (!g.active(x0)) throw LookupError("lambda_rescale: base node is masked out");
  const double pc = conjugate(p);
  const Vec2 c = g.node(x0);
  const double g0 = recover_gradient(u)[x0].norm();
  const double denom = std::pow(lambda0, pc) + g0 * lambda0;
  if (!(denom > 0.0) || !std::isfinite(denom)) throw DegenerateInputError("lambda_rescale: degenerate denominator");

  RescaleResult out;
  out.v = resample(u, [&](const Vec2& x) -> Vec2 { return c + lambda0 * x; });
  const double u0 = u.values[x0];
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (g.active(k)) out.v.values[k] = (out.v.values[k] - u0) / denom;
  }
  const std::size_t o = origin_node(g);
  if (out.v.values[o] != 0.0) throw NumericalBreakdown("lambda_rescale: v(0) != 0");

  // Damping of the source; <= 1 because lambda0^{p'(p-1)} = lambda0^p.
  const double damping = std::pow(lambda0, p) / std::pow(denom, p - 1.0);
  if (damping > 1.0 + 1e-12) throw NumericalBreakdown("lambda_rescale: source damping exceeds 1");

  ScalingRecord& rec = out.record;
  rec.kind = ScalingKind::lambda;
  rec.factor = lambda0;
  rec.value_scale = denom;
  rec.claimed_rhs_bound = damping;
  rec.source_point = c;
  rec.p = p;
  rec.grad0_norm = g0;
  rec.output_sup = sup_norm(out.v);
  rec.output_grad0 = recover_gradient(out.v)[o].norm();
  rec.bound_holds = rec.output_sup <= 1.0 + g.h();
  return out;
}

RescaleResult mu_rescale(const GridFunction& u, std::size_t x0, double p) {
  if (!(p > 2.0)) throw DomainError("mu_rescale: requires p > 2");
  check_exponent_identities(p);
  const Grid& g = *u.grid;
  if (!g.active(x0)) throw LookupError("mu_rescale: base node is masked out");
  const double g0 = recover_gradient(u)[x0].norm();
  if (!(g0 > 0.0)) throw CriticalPointError("mu_rescale: grad u(x0) = 0, the blow-up is undefined");
  const double pc = conjugate(p);
  const double mu = std::pow(g0, p - 1.0);
  const double scale = std::pow(mu, pc);
  const Vec2 c = g.node(x0);

  RescaleResult out;
  out.v = resample(u, [&](const Vec2& x) -> Vec2 { return c + mu * x; });
  const double u0 = u.values[x0];
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (g.active(k)) out.v.values[k] = (out.v.values[k] - u0) / scale;
  }
  const std::size_t o = origin_node(g);
  if (out.v.values[o] != 0.0) throw NumericalBreakdown("mu_rescale: w(0) != 0");

  ScalingRecord& rec = out.record;
  rec.kind = ScalingKind::mu;
  rec.factor = mu;
  rec.value_scale = scale;
  rec.claimed_rhs_bound = 1.0;
  rec.source_point = c;
  rec.p = p;
  rec.grad0_norm = g0;
  rec.output_sup = sup_norm(out.v);
  rec.output_grad0 = recover_gradient(out.v)[o].norm();
  rec.bound_holds = std::abs(rec.output_grad0 - 1.0) <= 3.0 * g.h();
  return out;
}

}  // namespace plap
