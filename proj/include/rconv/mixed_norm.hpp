#pragma once

#include "rconv/subspace.hpp"

namespace rconv {

// Mixed frequency norm over the dual foliation of H:
//
//   Lambda_{r,p}(F) = ( sum over bases xi' w_out * inner(xi')^p )^{1/p},
//   inner(xi')     = ( sum over the fiber of xi' w_in * |Fhat|^r )^{1/r},
//
// with fiber weight  w_in  = (1/L)^{n-k} * jacobian_rho and base weight
// w_out = (1/L)^k / jacobian_rho.  r or p may be infinity().  With this
// weight split Lambda_{2,2} equals the l^2 norm of the coefficients for every
// subspace kind (the jacobian cancels), while Lambda_{2,inf} matches the
// parametrized fiber integrals used in the sharp-constant computations.
double lambda_norm(const Spectrum& F, const Subspace& H, double r, double p);
double lambda_norm(const GridFunction& F, const Subspace& H, double r, double p);

// Per-base inner norms (the function xi' -> inner(xi')), for diagnostics and
// for locating the extremal fiber.
RVec lambda_inner_profile(const Spectrum& F, const Subspace& H, double r);

// Spatial mixed norm || ||F(x', .)||_{L^q(x'')} ||_{L^p(x')} for coordinate
// subspaces, with lattice weights h^{...}.
double mixed_spatial_norm(const GridFunction& F, const Subspace& H, double p,
                          double q);

// --- analytic path -------------------------------------------------------
// Fiber quadrature for closed-form spectra that cannot be materialized on a
// full lattice.  The fiber of a base frequency xi is parametrized as in the
// lattice case: coordinate kind zeta = (xi, w) with w on an (n-k)-dimensional
// quadrature lattice; diagonal kind zeta = (eta_1, .., eta_{m-1},
// xi - sum eta) with the eta blocks on a (m-1)d-dimensional lattice.  Weights
// carry the same jacobian convention as lambda_norm.
struct FiberQuad {
  double spacing = 0.25; // quadrature step per fiber axis
  double radius = 32.0;  // half-width of the fiber window
};

// sum over the fiber of |spectrum|^2 with weight spacing^{n-k} * jacobian_rho
double fiber_l2_analytic(const std::function<Complex(const RVec&)>& spectrum,
                         const Subspace& H, const RVec& xi, const FiberQuad& q);

// Lambda_{2,inf} via fiber quadrature, sup over a scan of base frequencies.
// If radial is true the spectrum is invariant under joint rotations and the
// base scan runs over radii along the first base axis only.
struct BaseScan {
  double step = 0.25;
  double radius = 8.0;
  bool radial = false;
};
double lambda_2inf_analytic(const std::function<Complex(const RVec&)>& spectrum,
                            const Subspace& H, const FiberQuad& q,
                            const BaseScan& scan);

// Location of the maximizing base frequency from the same scan.
RVec lambda_2inf_argmax(const std::function<Complex(const RVec&)>& spectrum,
                        const Subspace& H, const FiberQuad& q,
                        const BaseScan& scan);

} // namespace rconv
