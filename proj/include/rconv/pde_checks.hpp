#pragma once

#include "rconv/conv_ops.hpp"

namespace rconv {

// Sharp constant of the codimension-(n-k) Sobolev trace inequality
//   ||u|_H||_{L^2(H)} <= C ||u||_{H^s},
//   C = sqrt(|S^{n-k-1}| * int_0^inf (1+r^2)^{-s} r^{n-k-1} dr).
// The integral is evaluated by tanh-sinh quadrature split at r = 1 so the
// endpoint behaviour near s = (n-k)/2 is resolved to full precision.
// Throws for s <= (n-k)/2, where the integral diverges.
double trace_constant(double s, int n, int k);

// Independent lattice realization of trace_constant^2: the Bessel-weight
// fiber sum sup over base frequencies,
//   sup_{xi'} (1/L)^m sum_{w in (Z/L)^m} (1 + |xi'|^2 + |w|^2)^{-s},
// with m = codim.  The sum is extended far beyond any grid Nyquist radius and
// completed with the analytic tail integral, so the result matches the closed
// form to about rel_tol.  The sup sits at xi' = 0 (the summand is radially
// decreasing), which is what is computed.
double trace_multiplier_sup(double s, int codim, double L,
                            double rel_tol = 1e-7);

// Trace inequality on the lattice: lhs = ||u|_H||_2, rhs = C * ||u||_{H^s}.
// Coordinate H only; throws in the divergent regime s <= (n-k)/2.
// params records the constant, the fiber-sum witness, and their relative gap.
VerificationReport verify_trace(const GridFunction& u, const Subspace& H,
                                double s);

// Heat-semigroup restriction  ||(F * heat_t)|_H||_2 <= (4 pi t)^{-(n-k)/4} ||F||_2.
// The reported rhs uses the (4 pi t)^{-(n-k)/4} constant.  The discrete sharp
// constant -- the square root of the TT* multiplier maximum, cross-checked by
// power iteration -- equals (8 pi t)^{-(n-k)/4} and is recorded in params as
// "sharp_constant" / "measured_constant"; it is strictly smaller, so the
// inequality above is valid but not optimal.
VerificationReport verify_heat_restriction(const GridFunction& F,
                                           const Subspace& H, double t);

// One s-value of the wave-restriction refinement dichotomy.  coarse/fine are
// the squared weighted mixed norms at fiber truncation radii R and 2R;
// growth = fine/coarse - 1.
struct WaveThresholdPoint {
  double s = 0;
  double coarse = 0;
  double fine = 0;
  double growth = 0;
  std::string classification; // "stable" | "divergent" | "indeterminate"
};

struct WaveThresholdReport {
  int n = 3;
  int k = 2;
  double t = 1;
  double threshold = 0; // 1 - (n-k)/2
  std::vector<WaveThresholdPoint> points;
  nlohmann::json to_json() const;
};

// Classifies, per s in s_list, whether the squared mixed norm
// Lambda^H_{2,inf}(weight_s * wave propagator)^2 stabilizes under doubling of
// the fiber truncation radius (finite limit, s below 1 - (n-k)/2) or keeps
// growing (divergent, s above).  Growth > 25% per doubling is "divergent",
// < 2% is "stable"; values in between, and any s within 0.1 of the threshold,
// are "indeterminate".  n = 3 (closed-form propagator), coordinate H.
WaveThresholdReport wave_restriction_threshold(int n, int k, double t,
                                               const std::vector<double>& s_list);

// Membership in the admissible exponent triangle for products of 3-d wave
// solutions, vertices (1/2,1/2), (1/2,1/3), (3/5,2/5) in the (1/p,1/q) plane.
bool wave_product_region(double inv_p, double inv_q);

// Product bounds for u = wave(f, t), v = wave(g, t) on R^3:
//   ||u v||_{H^{1/2}} <= C ||f||_2 ||g||_2,   ||u v||_{L^3} <= C' ||u v||_{H^{1/2}},
// and for 5/3 < p <= 2 the improving bound ||u v||_{L^{p'}} <= C_p ||f||_p ||g||_p.
// The empirical constants are required to be refinement-stable: they are
// recomputed with spectra truncated to the half-resolution grid and the
// largest relative deviation (lhs of the report) must stay below 2% (rhs).
// All constants end up in params.  Requires N >= 32.
VerificationReport verify_wave_product(const GridFunction& f,
                                       const GridFunction& g, double t,
                                       double p);

} // namespace rconv
