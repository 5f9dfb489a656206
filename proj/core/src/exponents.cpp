#include "plap/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plap/errors.hpp"

namespace plap {

namespace {

void require_at_least_two(double p, const char* what) {
  if (!(p >= 2.0) || !std::isfinite(p)) {
    throw DomainError(std::string(what) + ": requires p >= 2, got " + std::to_string(p));
  }
}

void require_above_two(double p, const char* what) {
  if (!(p > 2.0) || !std::isfinite(p)) {
    throw DomainError(std::string(what) + ": requires p > 2, got " + std::to_string(p));
  }
}

}  // namespace

double conjugate(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw DomainError("conjugate: requires p > 1, got " + std::to_string(p));
  }
  return p / (p - 1.0);
}

double alpha_star(double p) {
  require_at_least_two(p, "alpha_star");
  const double s = 1.0 / (p - 1.0);
  return (p / (p - 1.0) + std::sqrt(1.0 + 14.0 * s + s * s)) / 6.0;
}

double alpha_bk(double p) {
  require_at_least_two(p, "alpha_bk");
  const double s = 1.0 / (p - 1.0);
  return (-3.0 - s + std::sqrt(33.0 + 30.0 * s + s * s)) / (2.0 * p);
}

ChainReport exponent_chain(double p) {
  require_above_two(p, "exponent_chain");
  ChainReport r;
  r.alpha_star = alpha_star(p);
  r.alpha_bk = alpha_bk(p);
  r.alpha_crit = 1.0 / (p - 1.0);
  r.margin_upper = r.alpha_star - r.alpha_bk;
  r.margin_lower = r.alpha_bk - r.alpha_crit;
  r.pass = r.margin_upper > 0.0 && r.margin_lower > 0.0;
  return r;
}

double radial_constant(int dim, double p) {
  if (dim < 2) {
    throw DomainError("radial_constant: dimension must be >= 2, got " + std::to_string(dim));
  }
  require_above_two(p, "radial_constant");
  return std::pow(static_cast<double>(dim), -1.0 / (p - 1.0)) * (p - 1.0) / p;
}

double tau0(double p) {
  require_above_two(p, "tau0");
  const double gap = alpha_bk(p) - 1.0 / (p - 1.0);
  const double window = (p - 2.0) / (p - 1.0);
  return std::min(gap, window) * (1.0 - 1e-9);
}

ExponentSet make_exponent_set(double p) {
  require_at_least_two(p, "make_exponent_set");
  ExponentSet e;
  e.p = p;
  e.p_conj = conjugate(p);
  e.alpha_star = alpha_star(p);
  e.alpha_bk = alpha_bk(p);
  e.alpha_crit = 1.0 / (p - 1.0);
  if (p > 2.0) {
    e.tau0 = tau0(p);
    e.c_radial = radial_constant(2, p);
  }
  return e;
}

}  // namespace plap
