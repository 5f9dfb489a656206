#pragma once

// Closed-form exponents and constants attached to a power p of the
// planar p-Laplacian, and the strict ordering between them.

namespace plap {

/// Everything that depends on p alone.
struct ExponentSet {
  double p = 0.0;
  double p_conj = 0.0;      ///< p' = p/(p-1)
  double alpha_star = 0.0;  ///< sharp C^{1,a} exponent of planar p-harmonic functions
  double alpha_bk = 0.0;    ///< Morrey-growth exponent of the complex gradient
  double alpha_crit = 0.0;  ///< 1/(p-1) = p' - 1
  double tau0 = 0.0;        ///< corrector regularity margin, 0 at p == 2
  double c_radial = 0.0;    ///< radial extremal constant in the plane, 0 at p == 2
};

struct ChainReport {
  double alpha_star = 0.0;
  double alpha_bk = 0.0;
  double alpha_crit = 0.0;
  double margin_upper = 0.0;  ///< alpha_star - alpha_bk
  double margin_lower = 0.0;  ///< alpha_bk - alpha_crit
  bool pass = false;
};

/// p/(p-1). Throws DomainError for p <= 1.
double conjugate(double p);

/// Iwaniec-Manfredi exponent. Defined for p >= 2 (p == 2 gives 1).
double alpha_star(double p);

/// Baernstein-Kovalev exponent. Defined for p >= 2 (p == 2 gives 1).
double alpha_bk(double p);

/// alpha_star > alpha_bk > 1/(p-1), checked with explicit margins. p > 2.
ChainReport exponent_chain(double p);

/// c_p with -Δ_p (c_p (1 - |x|^{p'})) = 1 on the unit ball of R^d.
double radial_constant(int dim, double p);

/// min(alpha_bk - 1/(p-1), (p-2)/(p-1)) shrunk by a relative 1e-9, for p > 2.
double tau0(double p);

/// Fills every field. Accepts p >= 2; tau0 and c_radial are 0 at p == 2.
ExponentSet make_exponent_set(double p);

}  // namespace plap
