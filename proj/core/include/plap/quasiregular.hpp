#pragma once

// Complex-gradient diagnostics for planar fields.
//
// phi = u_z = (u_x - i u_y)/2 is built from the recovered gradient. Its
// Wirtinger derivatives use central differences:
//   phi_z    = (D_x - i D_y) phi / 2,
//   phi_zbar = (D_x + i D_y) phi / 2.
// A node is valid for derivatives when it and its four axial neighbours are
// interior nodes, so that every value entering the composed stencil comes
// from a full six-triangle recovery patch.
//
// Conventions: J = |phi_z|^2 - |phi_zbar|^2 and |grad phi| is the operator
// norm of the real Jacobian, |grad phi| = |phi_z| + |phi_zbar|. With these,
// |phi_zbar| <= (1 - 2/p)|phi_z| is equivalent to J >= |grad phi|^2/(p-1).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "plap/grid.hpp"

namespace plap {

using Complex = std::complex<double>;

struct ComplexField {
  GridPtr grid;
  std::vector<Complex> phi;
  std::vector<Complex> phi_z;     ///< empty until wirtinger()
  std::vector<Complex> phi_zbar;  ///< empty until wirtinger()
  std::vector<std::uint8_t> valid;

  bool has_derivatives() const { return !phi_z.empty(); }
  bool is_valid(std::size_t k) const { return !valid.empty() && valid[k] != 0; }
};

/// (u_x - i u_y)/2 from recover_gradient.
ComplexField complex_gradient(const GridFunction& u);

/// Samples an analytic complex field at active nodes.
ComplexField sample_complex(GridPtr grid, const std::function<Complex(const Vec2&)>& phi);

/// Returns a copy with phi_z, phi_zbar and the valid mask populated.
ComplexField wirtinger(ComplexField field);

/// Central differences D_x phi, D_y phi at valid nodes.
struct ComplexPartials {
  std::vector<Complex> dx;
  std::vector<Complex> dy;
};
ComplexPartials partials(const ComplexField& field);

/// |phi_zbar| - (1 - 2/p)|phi_z| at valid nodes, 0 elsewhere. p >= 2.
GridFunction kqr_defect(const ComplexField& field, double p);

struct GradientMappingDefect {
  double imag_sup = 0.0;       ///< sup |Im phi_zbar|
  double laplacian_sup = 0.0;  ///< sup |phi_zbar - lap u / 4|
};

/// lap u = D_x(u_x) + D_y(u_y) with the same recovery and difference stencils.
GradientMappingDefect gradient_mapping_defect(const ComplexField& field, const GridFunction& u);

double jacobian(Complex phi_z, Complex phi_zbar);
double grad_norm_sq(Complex phi_z, Complex phi_zbar);

/// |grad phi|^2/(p-1) - J at valid nodes, 0 elsewhere. p >= 2.
GridFunction jacobian_check(const ComplexField& field, double p);

/// int_{B_r}|grad phi|^2 / ((p-1)(2r)^{2 alpha_bk(p)} int_{B_{1/2}}|grad phi|^2)
/// for each r, with balls centred at node x0. Integrals sum area times the
/// vertex mean of |grad phi|^2 over triangles with valid vertices whose
/// centroid lies in the ball. B_{1/2}(x0) must be covered by valid nodes.
std::vector<double> morrey_growth(const ComplexField& field, double p, std::span<const double> radii,
                                  std::size_t x0);

/// Positive-part statistics of a per-node defect over valid nodes with
/// |grad u| = 2|phi| >= grad_threshold.
struct DefectStats {
  std::size_t count = 0;
  double sup_positive = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
};
DefectStats positive_part_stats(const GridFunction& defect, const ComplexField& field, double grad_threshold);

}  // namespace plap
