#pragma once

#include "rconv/report.hpp"
#include "rconv/scale_ops.hpp"

namespace rconv {

using RMat = Eigen::MatrixXd;

// Smooth real phase phi(u, v) on R^d x R^d with analytic derivatives.  When
// the diagonal increment  delta_z phi(u,v) = phi(u,v) - phi(u-z,v-z)  splits
// as  alpha(z) + beta(z,u) + gamma(z,v)  (no u-v cross terms), the split is
// recorded and enables fast autocorrelation evaluation.
struct Phase {
  std::string label;
  int d = 1;
  std::function<double(const RVec&, const RVec&)> eval;
  std::function<RVec(const RVec&, const RVec&)> grad;  // length 2d
  std::function<RMat(const RVec&, const RVec&)> hess;  // 2d x 2d

  bool separable_delta = false;
  std::function<double(const RVec&)> alpha;
  std::function<double(const RVec&, const RVec&)> beta;   // (z, u)
  std::function<double(const RVec&, const RVec&)> gamma_; // (z, v)
};

// Registry: "dot" (u.v), "squares" (|u|^2+|v|^2), "rank-deficient" (u1 v1,
// degenerate for d >= 2), "zero".
Phase make_phase(const std::string& label, int d);
std::vector<std::string> phase_names();

// Polynomial phase sum_t c_t u^{pu_t} v^{pv_t} from JSON
//   [{"coef": c, "pu": [e1..ed], "pv": [e1..ed]}, ...]
// with derivatives formed term by term.
Phase make_polynomial_phase(int d, const nlohmann::json& terms);

// Compactly supported amplitude on R^{2d}: a tensor product of one
// per-coordinate bump of half-width `support_radius`, normalized to unit
// mass over R^{2d}.  eval vanishes identically outside the coordinate box.
struct Amplitude {
  int d = 1;
  double support_radius = 1.0;
  std::function<double(const RVec&, const RVec&)> eval;
  std::function<double(double)> axis_profile; // 1d factor, unit-mass power
};

Amplitude make_bump_amplitude(int d, double radius = 1.0);

double delta_z_phi(const Phase& phi, const RVec& u, const RVec& v,
                   const RVec& z);

// Largest |grad phi| over the amplitude box (dense sampling).
double phase_gradient_bound(const Phase& phi, const Amplitude& psi);

// Smallest power-of-two N such that the lattice of period L resolves the
// oscillation: (L/N) * lambda * max|grad phi| < 1/2 on supp psi.
int required_modes(const Phase& phi, const Amplitude& psi, double lambda,
                   double L);

// Bilinear oscillatory average
//   M(f,g)(x) = h^{2d} sum_{u,v} f(x-u) g(x-v) e^{2 pi i lambda phi(u,v)}
//               psi(u,v),
// with u, v on the (periodic) lattice of f.  Throws when the resolution
// guard fails, naming the required N.
GridFunction m_lambda_apply(const Phase& phi, const Amplitude& psi,
                            double lambda, const GridFunction& f,
                            const GridFunction& g);

// Surface transform of the autocorrelation surface: lattice quadrature of
//   sum_{u,v,z} e^{-2 pi i (xi.z + lambda delta_z phi(u,v))}
//               psi(u,v) psi(u-z,v-z)
// at spacing `step` over the amplitude support.
Complex sigma_phi_hat(const Phase& phi, const Amplitude& psi, const RVec& xi,
                      double lambda, double step);

// sup over the resolved frequency lattice xi = m/L, |m| <= N/2, of
// |sigma^_phi(xi, lambda)| computed on the lattice of `spec` (z-correlation
// plus one FFT; equals the largest spectral fiber sum of the windowed
// oscillatory kernel, so it exactly dominates the discrete operator).
double sigma_sup_lattice(const Phase& phi, const Amplitude& psi, double lambda,
                         const GridSpec& spec);

// ||M(f,g)||_2 <= sqrt(sup_xi |sigma^|) ||f||_2 ||g||_2 on the lattice of f.
VerificationReport verify_oscillatory_bound(const Phase& phi,
                                            const Amplitude& psi,
                                            double lambda,
                                            const GridFunction& f,
                                            const GridFunction& g);

// lambda-decay scan.  For each lambda a fine internal lattice is chosen from
// the resolution guard; `upper` is sqrt(sup |sigma^|) (a certified operator
// bound) and `lower` the best empirical Rayleigh ratio over seeded random
// band-limited pairs, a chirp ansatz, and alternating power-iteration
// refinement.  Both curves are fitted in log2.
struct LambdaScanPoint {
  double lambda = 0;
  double lower = 0;
  double upper = 0;
};

struct LambdaScan {
  std::vector<LambdaScanPoint> points;
  DecayFit lower_fit;
  DecayFit upper_fit;
  bool degenerate = false; // Hessian determinant vanishes on supp psi

  nlohmann::json to_json() const;
};

LambdaScan lambda_decay_scan(const Phase& phi, const Amplitude& psi, int d,
                             const std::vector<double>& lambdas,
                             int seeds = 50);

} // namespace rconv
