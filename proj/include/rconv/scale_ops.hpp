#pragma once

#include "rconv/conv_ops.hpp"

namespace rconv {

// Dyadic Littlewood-Paley family built from a smooth cutoff chi with
// chi = 1 on [0,1], 0 on [2,inf):
//   psi(s)  = chi(s/2) - chi(s)   (annulus window, supp in (1,4))
//   psi0(s) = chi(s/2)            (ball window, supp in [0,4))
// so that psi0(s) + sum_{j=1..J} psi(2^{-j} s) = 1 exactly for s <= 2^{J+1}.
// The plateau of psi is the single point s = 2: a wider plateau is
// incompatible with an exact telescoping partition.
struct LPFamily {
  std::function<double(double)> psi0;
  std::function<double(double)> psi;
  int j_max = 8;
};

LPFamily make_lp_family(int j_max);
double smooth_cutoff(double s); // the chi above

// Band component: multiply by psi0(|xi|) (j = 0) or psi(2^{-j}|xi|) (j >= 1).
Spectrum lp_component(const Spectrum& F, const LPFamily& fam, int j);

// window value for band j at radius s (j = 0 -> psi0)
double lp_window(const LPFamily& fam, int j, double s);

// Least-squares decay fit of log2 band norms against j.
struct DecayFit {
  std::vector<int> j_values;
  std::vector<double> norms;
  double slope = 0;
  double intercept = 0;
  double r2 = 0;

  double gamma_hat() const { return -slope; }
  nlohmann::json to_json() const;
};
DecayFit fit_decay(const std::vector<int>& js, const std::vector<double>& norms);

// Power-law fit of log2 values against log2 xs (xs need not be integer
// powers); j_values records the rounded log2 of each x.
DecayFit fit_powerlaw(const std::vector<double>& xs,
                      const std::vector<double>& values);

// Lambda_{2,inf} of the band components of a closed-form kernel, by fiber
// quadrature (never materializes a lattice), and the fitted decay exponent.
// spacing is the fiber/base quadrature step.
DecayFit gamma_fit(const KernelHandle& nu, const Subspace& H, const LPFamily& fam,
                   const std::vector<int>& js, double spacing = 0.25);

// Same fit from a lattice spectrum (cross-check path for small grids).
DecayFit gamma_fit_lattice(const Spectrum& nu, const Subspace& H,
                           const LPFamily& fam, const std::vector<int>& js);

// Same fit with |grad K^|^2 in place of |K^|^2 along the fibers, gradient by
// central differences of the windowed spectrum (step = spacing/4).  Used to
// check the gradient-decay hypothesis of the maximal theorem.
DecayFit gamma_fit_gradient(const KernelHandle& nu, const Subspace& H,
                            const LPFamily& fam, const std::vector<int>& js,
                            double spacing = 0.25);

// G_t with G_t^(xi) = G^(t xi); a deposited measure is rescaled to points
// t p_q (mass preserved).  Requires a closed-form spectrum.
KernelHandle dilate_spectrum(const KernelHandle& G, double t);

// sup over a geometric t-grid of |B_t(f_1..f_m)|.
GridFunction maximal_apply(const KernelHandle& K,
                           const std::vector<GridFunction>& fs, double t_min,
                           double t_max, int per_octave, int band = 0);

// Certificate check of  sup_{[R,2R]} |F|^2 <= |F(R)|^2 +
// 2 (int |F|^2)^{1/2} (int |F'|^2)^{1/2}  on dense samples.
VerificationReport ftc_lemma_check(const std::vector<Complex>& samples, double R);

// Empirical per-band maximal-operator ratio
//   max over seeds of || sup_{t in [1,2]} |F^j * G_t|_H ||_2 / ||F^j||_2
// with F^j a sparse random field of `modes` lattice modes in the band-j shell.
double maximal_l2_decay_per_band(const KernelHandle& K, const Subspace& H,
                                 const LPFamily& fam, int j,
                                 const std::vector<std::uint64_t>& f_seeds,
                                 int modes = 256, int per_octave = 8);

// Admissible exponent thresholds from the fitted decay (codimension l):
// the maximal-operator range p > (2l + 2 gamma - 1)/(l + 2 gamma - 1) and the
// Lp-improving range p > 2(l + gamma)/(l + 2 gamma).
double maximal_admissible_p(double l, double gamma);
double lp_improving_admissible_p(double l, double gamma);

} // namespace rconv
