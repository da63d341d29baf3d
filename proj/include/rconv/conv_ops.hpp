#pragma once

#include "rconv/kernels.hpp"
#include "rconv/mixed_norm.hpp"
#include "rconv/report.hpp"

namespace rconv {

// Convolution on the periodic lattice, h^n-weighted:
//   (F*G)(x) = h^n sum_y F(y) G(x-y),
// computed as the spectral product.
GridFunction conv(const GridFunction& F, const GridFunction& G);
GridFunction conv(const GridFunction& F, const KernelHandle& G);

// Restriction of the convolution to H, computed on the fiber route:
//   dft(result)[xi'] = (1/L)^{n-k} sum over the fiber of F^ G^.
// Equals restrict_to(conv(F, G), H); see the two-path test.
GridFunction conv_restrict(const GridFunction& F, const GridFunction& G,
                           const Subspace& H);
GridFunction conv_restrict(const GridFunction& F, const KernelHandle& G,
                           const Subspace& H);

// The operator T F = (F*G)|_H and its adjoint, acting on spectra (G^ given as
// lattice samples).  T* h has spectrum conj(G^(zeta)) h^(base(zeta)).
Spectrum t_apply(const Spectrum& F, const Spectrum& Ghat, const Subspace& H);
Spectrum t_star_apply(const Spectrum& h, const Spectrum& Ghat, const Subspace& H);

// TT* multiplier on the base lattice: per-fiber weight
// (1/L)^{n-k} * jacobian_rho times sum of |G^|^2, so that its lattice max
// equals lambda_norm(G, H, 2, inf)^2 under the module's weight convention.
// The discrete L^2(H) -> L^2(R^n) operator norm of T* is
// sqrt(max / jacobian_rho).
RVec tt_star_multiplier(const KernelHandle& G, const Subspace& H,
                        const GridSpec& spec);

// Power iteration on TT* through t_apply/t_star_apply; returns the converged
// operator-norm estimate sqrt(rho(TT*)).
double operator_norm_power(const Spectrum& Ghat, const Subspace& H, int iters,
                           std::uint64_t seed);

// Near-extremal input for (p,q,r) = (2,inf,2): F^ = conj(G^) on the
// maximizing fiber, zero elsewhere.
Spectrum near_extremal_input(const Spectrum& Ghat, const Subspace& H);

// m-linear convolution: B(f_1..f_m)(x) = ((f_1 x ... x f_m) * K)|_diag(x).
// The fiber route never materializes the md-dimensional tensor.  band <= 0
// sums over all mode tuples (requires N^{(m-1)d} within budget); band > 0
// restricts every factor to |signed index| <= band.
GridFunction multilinear_apply(const KernelHandle& K,
                               const std::vector<GridFunction>& fs, int band = 0);

// Oracle route: direct sum over a deposited measure with closed-form factors,
//   B(f_1..f_m)(x) = sum_q w_q prod_j f_j(x - p_q^j),
// evaluated exactly at off-lattice points (no interpolation error).
GridFunction multilinear_apply_measure(
    const QuadratureMeasure& mu,
    const std::vector<std::function<Complex(const RVec&)>>& fs,
    const GridSpec& spec);

// --- inequality verifiers -------------------------------------------------

// ||(F*G)|_H||_{L^r(H)} <= Lambda_{2,p}(F) * Lambda_{2,q}(G) for
// p,q,r >= 2, 1/p + 1/q + 1/r = 1.  For diagonal H the pass criterion uses
// the jacobian-normalized ratio ratio * jacobian_rho^{1/r} (convention
// recorded in the report).
VerificationReport verify_young_restricted(const GridFunction& F,
                                           const GridFunction& G,
                                           const Subspace& H, double p,
                                           double q, double r);

// Frequency-restriction corollaries: the transform of a pointwise product
// (or of a single function) restricted to a coordinate frequency subspace,
// against mixed spatial norms.  These are comparability statements; the
// reported ratio is the empirical constant and `pass` here only checks
// finiteness; stability across refinement is asserted by the caller.
VerificationReport verify_restriction_product(const GridFunction& F,
                                              const GridFunction& G,
                                              const Subspace& H, double p,
                                              double q, double r);
VerificationReport verify_restriction_linear(const GridFunction& F,
                                             const Subspace& H, double p);

// Sobolev-smoothing / Lp-improving form for the m-linear operator.
//   l2 form:   ||B(f_1..f_m)||_{H^gamma} vs prod ||f_j||_2
//   lp form:   ||B(f_1..f_m)||_{p'}      vs prod ||f_j||_p
// Comparability statement; ratio reported, in_range records whether p lies in
// the admissible range p > 2(l+gamma)/(l+2gamma).
VerificationReport lp_improving_bound(const KernelHandle& nu, double codim_l,
                                      double gamma,
                                      const std::vector<GridFunction>& fs,
                                      double p, bool l2_form, int band = 0);

// ||u v||_{H^{r+s-d/2}} vs ||u||_{H^r} ||v||_{H^s}: comparability statement.
VerificationReport product_sobolev_check(const GridFunction& u,
                                         const GridFunction& v, double r,
                                         double s);

// Competing bilinear bounds for B = B_K.
struct ProblemOneReport {
  double lhs = 0;      // ||B(f,g)||_r
  double rhs_one = 0;  // diag-spectrum bound (needs nonneg measure, r in [1,2])
  double rhs_two = 0;  // fiber-l2 bound (r in [2,inf])
  bool has_one = false;
  bool has_two = false;
};
ProblemOneReport compare_problem_one_bounds(const KernelHandle& K,
                                            const GridFunction& f,
                                            const GridFunction& g, double r);

} // namespace rconv
