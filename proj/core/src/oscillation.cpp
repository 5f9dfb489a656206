#include "plap/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plap/errors.hpp"
#include "plap/exponents.hpp"

namespace plap {

int max_levels(const Grid& grid, double r_max, double ratio) {
  const double floor = resolution_floor(grid);
  int levels = 0;
  double r = r_max;
  while (r >= floor * (1.0 - 1e-12)) {
    ++levels;
    r *= ratio;
  }
  return levels;
}

OscillationProfile profile(const GridFunction& u, std::size_t x0, double r_max, int levels, double ratio) {
  if (levels < 3) throw ConfigError("profile: levels must be >= 3, got " + std::to_string(levels));
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("profile: ratio must lie in (0,1)");
  if (!(r_max > 0.0)) throw ConfigError("profile: r_max must be positive");
  const Grid& grid = *u.grid;
  const double smallest = r_max * std::pow(ratio, levels - 1);
  if (smallest < resolution_floor(grid) * (1.0 - 1e-12)) {
    throw ResolutionError("profile: smallest radius " + std::to_string(smallest) + " is below the resolution floor " +
                          std::to_string(resolution_floor(grid)) + "; at most " +
                          std::to_string(max_levels(grid, r_max, ratio)) + " levels are usable");
  }
  if (!grid.active(x0)) throw LookupError("profile: base node is masked out");

  OscillationProfile out;
  out.x0 = x0;
  out.grad0 = recover_gradient(u)[x0];
  double r = r_max;
  for (int k = 0; k < levels; ++k) {
    out.radii.push_back(r);
    out.osc_centered.push_back(sup_ball(u, x0, r, SupMode::centered));
    out.osc_linear.push_back(sup_ball(u, x0, r, SupMode::linear_corrected, out.grad0));
    r *= ratio;
  }
  return out;
}

ExponentFit fit_power_law(std::span<const double> radii, std::span<const double> values) {
  if (radii.size() != values.size()) throw ConfigError("fit: radii and values differ in length");
  std::vector<double> lx, ly;
  ExponentFit fit;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (values[k] > kOscillationFloor && radii[k] > 0.0) {
      lx.push_back(std::log(radii[k]));
      ly.push_back(std::log(values[k]));
      fit.radii_used.push_back(radii[k]);
    }
  }
  if (lx.size() < 3) {
    throw DegenerateInputError("fit: only " + std::to_string(lx.size()) +
                               " radii with nonzero oscillation; the exponent is undefined");
  }
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
    syy += (ly[k] - my) * (ly[k] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateInputError("fit: all radii coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double e = ly[k] - (fit.intercept + fit.slope * lx[k]);
    sse += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return fit;
}

ExponentFit fit_exponent(const OscillationProfile& prof, OscKind which) {
  return fit_power_law(prof.radii, which == OscKind::centered ? prof.osc_centered : prof.osc_linear);
}

double crack_bound_rhs(double r, double grad_norm, double p) {
  const double pc = conjugate(p);
  return std::pow(r, pc) * (1.0 + grad_norm * std::pow(r, 1.0 / (1.0 - p)));
}

double crack_bound_constant(const OscillationProfile& prof, double p) {
  if (!(p > 2.0)) throw DomainError("crack_bound_constant: requires p > 2");
  const double g = prof.grad0.norm();
  double c = 0.0;
  for (std::size_t k = 0; k < prof.radii.size(); ++k) {
    c = std::max(c, prof.osc_centered[k] / crack_bound_rhs(prof.radii[k], g, p));
  }
  return c;
}

bool triangle_inequality_holds(const OscillationProfile& prof, double slack) {
  const double g = prof.grad0.norm();
  for (std::size_t k = 0; k < prof.radii.size(); ++k) {
    const double shift = g * prof.radii[k];
    const double tol = slack * (1.0 + prof.osc_centered[k] + prof.osc_linear[k] + shift);
    if (prof.osc_linear[k] > prof.osc_centered[k] + shift + tol) return false;
    if (prof.osc_centered[k] > prof.osc_linear[k] + shift + tol) return false;
  }
  return true;
}

double iteration_bound(int k, double lambda0, double g, double p) {
  if (!(lambda0 > 0.0 && lambda0 < 0.5)) {
    throw DomainError("iteration_bound: lambda0 must lie in (0, 1/2), got " + std::to_string(lambda0));
  }
  if (!(p > 2.0)) throw DomainError("iteration_bound: requires p > 2");
  if (k < 0) throw DomainError("iteration_bound: k must be >= 0");
  if (!(g >= 0.0)) throw DomainError("iteration_bound: g must be >= 0");
  const double pc = conjugate(p);
  const double q = std::pow(lambda0, pc - 1.0);
  const double lk = std::pow(lambda0, k);
  return std::pow(lambda0, k * pc) + g * lk * (1.0 - std::pow(q, k)) / (1.0 - q);
}

PointKind classify_gradient(double grad_norm, double r, double p) {
  return grad_norm > std::pow(r, 1.0 / (p - 1.0)) ? PointKind::nondegenerate : PointKind::critical;
}

PointKind classify_point(const GridFunction& u, std::size_t x0, double r, double p) {
  if (!(p > 2.0)) throw DomainError("classify_point: requires p > 2");
  if (r < resolution_floor(*u.grid) * (1.0 - 1e-12)) {
    throw ResolutionError("classify_point: radius below the resolution floor");
  }
  return classify_gradient(recover_gradient(u)[x0].norm(), r, p);
}

const char* to_string(PointKind kind) { return kind == PointKind::critical ? "critical" : "nondegenerate"; }

}  // namespace plap
