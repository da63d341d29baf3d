#pragma once

#include <optional>

#include <json.hpp>

#include "rconv/grid.hpp"

namespace rconv {

// A discrete measure sum_q w_q delta_{p_q}, used both as a quadrature rule for
// surface measures and as an exact-transform oracle.
struct QuadratureMeasure {
  Eigen::MatrixXd points;  // Q x n
  Eigen::VectorXd weights; // Q

  int dim() const { return static_cast<int>(points.cols()); }
  double total_mass() const { return weights.sum(); }

  // exact Fourier transform of the measure at frequency xi
  Complex fourier(const RVec& xi) const;

  nlohmann::json to_json() const;
  static QuadratureMeasure from_json(const nlohmann::json& j);
};

// A convolution kernel, given by a closed-form spectrum and/or a discrete
// measure representation.  radial_base means the squared spectrum integrates
// to a function of |xi| only along the fiber foliation (true for kernels
// invariant under simultaneous block rotations).
struct KernelHandle {
  std::string id;
  int n = 1;
  std::function<Complex(const RVec&)> spectrum; // may be empty
  std::optional<QuadratureMeasure> measure;
  bool radial_base = false;
};

// heat kernel at time t on R^n: spectrum e^{-4 pi^2 t |xi|^2}
KernelHandle heat_kernel(double t, int n);

// Bessel potential of order s: spectrum (1 + |xi|^2)^{-s/2}
KernelHandle bessel_kernel(double s, int n);

// Riesz-type kernel: spectrum |xi|^{-a} with the origin mode zeroed
KernelHandle riesz_kernel(double a, int n);

// surface measure of the sphere of the given radius in R^n (2 <= n <= 6):
// spectrum  radius^{n-1} * 2 pi u^{-(n-2)/2} J_{(n-2)/2}(2 pi u),  u = radius|xi|
KernelHandle sphere_kernel(int n, double radius = 1.0);
double sphere_surface_area(int n, double radius = 1.0);

// closed-form sphere spectrum, exposed for oracles
double sphere_hat(int n, double radius, double xi_norm);

// quadrature rule for the sphere surface measure (Gauss-Legendre in the polar
// angles, uniform in the azimuth); integrates e^{-2 pi i x.xi} to machine
// precision for moderate |radius * xi|
QuadratureMeasure sphere_quadrature(int n, double radius, int order);

// tensor product of kernels: spectrum K1(xi_1) * K2(xi_2) on R^{n1 + n2}
KernelHandle tensor_kernel(const KernelHandle& a, const KernelHandle& b);

// m-fold tensor power of the sphere kernel on (R^d)^m
KernelHandle product_sphere_kernel(int m, int d, double radius = 1.0);

// wave propagator multiplier on R^3: sin(2 pi t |xi|) / (2 pi |xi|), value t
// at xi = 0
KernelHandle wave_kernel_3d(double t);

// Solution of the 3-d wave equation with u(0) = 0, u_t(0) = f at time t,
// computed spectrally: u^(xi) = f^(xi) * sin(2 pi t |xi|) / (2 pi |xi|),
// with the xi = 0 value t * f^(0).  Agrees with the spherical-mean formula
// u(x) = (t / 4 pi) int_{S^2} f(x - t y) dsigma(y).
GridFunction wave_propagate_3d(const GridFunction& f, double t);

// exact transform of a discrete measure on the dual lattice
Spectrum deposit(const QuadratureMeasure& mu, const GridSpec& spec);

// sample a closed-form spectrum on the dual lattice
Spectrum sample_spectrum(const KernelHandle& K, const GridSpec& spec);

// Wraps a kernel with a radial spectrum (radial_base set) so the evaluator
// memoizes on |xi|^2.  Lattice radii repeat heavily, and dilated copies keep
// hitting the shared cache, which makes repeated maximal-operator sweeps
// cheap.  Single-threaded use only.
KernelHandle memoize_radial_spectrum(const KernelHandle& K);

// named-kernel factory for the command line; throws on unknown names
KernelHandle make_kernel(const std::string& name, const nlohmann::json& params);
std::vector<std::string> kernel_names();

// Gauss-Legendre nodes/weights on [-1, 1]
void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights);

} // namespace rconv
