#include "plap/quasiregular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plap/errors.hpp"
#include "plap/exponents.hpp"

namespace plap {

namespace {

void require_derivatives(const ComplexField& field, const char* what) {
  if (!field.has_derivatives()) {
    throw ConfigError(std::string(what) + ": Wirtinger derivatives not populated");
  }
}

void require_p(double p, const char* what) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw DomainError(std::string(what) + ": requires p >= 2");
}

std::vector<std::uint8_t> derivative_mask(const Grid& g) {
  std::vector<std::uint8_t> valid(g.node_count(), 0);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (!g.interior(k)) continue;
    const NodeIJ c = g.ij(k);
    valid[k] = g.interior(g.index(c.i + 1, c.j)) && g.interior(g.index(c.i - 1, c.j)) &&
               g.interior(g.index(c.i, c.j + 1)) && g.interior(g.index(c.i, c.j - 1));
  }
  return valid;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ComplexField complex_gradient(const GridFunction& u) {
  const VectorField grad = recover_gradient(u);
  ComplexField field;
  field.grid = u.grid;
  field.phi.resize(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) field.phi[k] = 0.5 * Complex(grad[k].x(), -grad[k].y());
  return field;
}

ComplexField sample_complex(GridPtr grid, const std::function<Complex(const Vec2&)>& phi) {
  ComplexField field;
  field.grid = grid;
  field.phi.assign(grid->node_count(), Complex(0.0, 0.0));
  for (std::size_t k = 0; k < grid->node_count(); ++k) {
    if (grid->active(k)) field.phi[k] = phi(grid->node(k));
  }
  return field;
}

ComplexPartials partials(const ComplexField& field) {
  const Grid& g = *field.grid;
  const std::vector<std::uint8_t> valid = field.valid.empty() ? derivative_mask(g) : field.valid;
  ComplexPartials d{std::vector<Complex>(g.node_count()), std::vector<Complex>(g.node_count())};
  const double inv2h = 1.0 / (2.0 * g.h());
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (!valid[k]) continue;
    const NodeIJ c = g.ij(k);
    d.dx[k] = (field.phi[g.index(c.i + 1, c.j)] - field.phi[g.index(c.i - 1, c.j)]) * inv2h;
    d.dy[k] = (field.phi[g.index(c.i, c.j + 1)] - field.phi[g.index(c.i, c.j - 1)]) * inv2h;
  }
  return d;
}

ComplexField wirtinger(ComplexField field) {
  field.valid = derivative_mask(*field.grid);
  const ComplexPartials d = partials(field);
  const Complex i(0.0, 1.0);
  field.phi_z.assign(field.phi.size(), Complex(0.0, 0.0));
  field.phi_zbar.assign(field.phi.size(), Complex(0.0, 0.0));
  for (std::size_t k = 0; k < field.phi.size(); ++k) {
    if (!field.valid[k]) continue;
    field.phi_z[k] = 0.5 * (d.dx[k] - i * d.dy[k]);
    field.phi_zbar[k] = 0.5 * (d.dx[k] + i * d.dy[k]);
  }
  return field;
}

GridFunction kqr_defect(const ComplexField& field, double p) {
  require_derivatives(field, "kqr_defect");
  require_p(p, "kqr_defect");
  const double k_qr = 1.0 - 2.0 / p;
  GridFunction out(field.grid);
  for (std::size_t k = 0; k < field.phi.size(); ++k) {
    if (field.valid[k]) out.values[k] = std::abs(field.phi_zbar[k]) - k_qr * std::abs(field.phi_z[k]);
  }
  return out;
}

GradientMappingDefect gradient_mapping_defect(const ComplexField& field, const GridFunction& u) {
  require_derivatives(field, "gradient_mapping_defect");
  const Grid& g = *field.grid;
  const VectorField grad = recover_gradient(u);
  const double inv2h = 1.0 / (2.0 * g.h());
  GradientMappingDefect out;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (!field.valid[k]) continue;
    const NodeIJ c = g.ij(k);
    const double uxx = (grad[g.index(c.i + 1, c.j)].x() - grad[g.index(c.i - 1, c.j)].x()) * inv2h;
    const double uyy = (grad[g.index(c.i, c.j + 1)].y() - grad[g.index(c.i, c.j - 1)].y()) * inv2h;
    out.imag_sup = std::max(out.imag_sup, std::abs(field.phi_zbar[k].imag()));
    out.laplacian_sup = std::max(out.laplacian_sup, std::abs(field.phi_zbar[k] - 0.25 * (uxx + uyy)));
  }
  return out;
}

double jacobian(Complex phi_z, Complex phi_zbar) { return std::norm(phi_z) - std::norm(phi_zbar); }

double grad_norm_sq(Complex phi_z, Complex phi_zbar) {
  const double s = std::abs(phi_z) + std::abs(phi_zbar);
  return s * s;
}

GridFunction jacobian_check(const ComplexField& field, double p) {
  require_derivatives(field, "jacobian_check");
  require_p(p, "jacobian_check");
  GridFunction out(field.grid);
  for (std::size_t k = 0; k < field.phi.size(); ++k) {
    if (!field.valid[k]) continue;
    out.values[k] =
        grad_norm_sq(field.phi_z[k], field.phi_zbar[k]) / (p - 1.0) - jacobian(field.phi_z[k], field.phi_zbar[k]);
  }
  return out;
}

std::vector<double> morrey_growth(const ComplexField& field, double p, std::span<const double> radii,
                                  std::size_t x0) {
  require_derivatives(field, "morrey_growth");
  require_p(p, "morrey_growth");
  const Grid& g = *field.grid;
  const Vec2 c = g.node(x0);
  const double floor = resolution_floor(g);
  for (double r : radii) {
    if (!(r >= floor * (1.0 - 1e-12)) || r > 0.5 * (1.0 + 1e-12)) {
      throw ResolutionError("morrey_growth: radius " + std::to_string(r) + " outside [" + std::to_string(floor) +
                            ", 1/2]");
    }
  }
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (g.active(k) && (g.node(k) - c).norm() <= 0.5 + 1e-12 && !field.valid[k]) {
      throw OutOfDomainError("morrey_growth: B_1/2 around the base node leaves the valid derivative region");
    }
  }

  std::vector<double> density(g.node_count(), 0.0);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (field.valid[k]) density[k] = grad_norm_sq(field.phi_z[k], field.phi_zbar[k]);
  }
  auto ball_integral = [&](double r, bool& empty) {
    double s = 0.0;
    empty = true;
    const double r2 = r * r * (1.0 + 1e-12);
    for (std::size_t t = 0; t < g.triangle_count(); ++t) {
      const auto& tri = g.triangle(t);
      if (!field.valid[tri[0]] || !field.valid[tri[1]] || !field.valid[tri[2]]) continue;
      const Vec2 centroid = (g.node(tri[0]) + g.node(tri[1]) + g.node(tri[2])) / 3.0;
      if ((centroid - c).squaredNorm() > r2) continue;
      empty = false;
      s += g.area(t) * (density[tri[0]] + density[tri[1]] + density[tri[2]]) / 3.0;
    }
    return s;
  };

  bool empty = false;
  const double reference = ball_integral(0.5, empty);
  const double alpha = alpha_bk(p);
  std::vector<double> ratios;
  for (double r : radii) {
    const double num = ball_integral(r, empty);
    if (empty) throw ResolutionError("morrey_growth: no valid triangle inside B_r for r = " + std::to_string(r));
    const double den = (p - 1.0) * std::pow(2.0 * r, 2.0 * alpha) * reference;
    ratios.push_back(den > 0.0 ? num / den : 0.0);
  }
  return ratios;
}

DefectStats positive_part_stats(const GridFunction& defect, const ComplexField& field, double grad_threshold) {
  std::vector<double> pos;
  for (std::size_t k = 0; k < defect.size(); ++k) {
    if (!field.is_valid(k)) continue;
    if (2.0 * std::abs(field.phi[k]) < grad_threshold) continue;
    pos.push_back(std::max(0.0, defect.values[k]));
  }
  std::sort(pos.begin(), pos.end());
  DefectStats s;
  s.count = pos.size();
  if (!pos.empty()) {
    s.sup_positive = pos.back();
    s.q50 = quantile(pos, 0.5);
    s.q90 = quantile(pos, 0.9);
    s.q99 = quantile(pos, 0.99);
  }
  return s;
}

}  // namespace plap
