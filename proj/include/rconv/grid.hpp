#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rconv {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Which side of the Fourier transform a set of samples lives on.
enum class Side { spatial, frequency };

// Periodic lattice on [-L/2, L/2)^n with N points per axis (N a power of two).
// Spatial spacing h = L/N; frequency spacing 1/L.  Per-axis indices are stored
// in natural FFT order: storage index s in [0, N) corresponds to the signed
// index m = s for s < N/2 and m = s - N otherwise, so coordinates x = m*h and
// frequencies xi = m/L both cover a symmetric window around the origin.
struct GridSpec {
  int n = 1;       // dimension
  int N = 64;      // points per axis, power of two
  double L = 16.0; // period

  double h() const { return L / N; }
  double dxi() const { return 1.0 / L; }
  std::size_t size() const;

  // storage index <-> signed index on one axis
  int signed_index(int s) const { return s < N / 2 ? s : s - N; }
  int storage_index(int m) const { return ((m % N) + N) % N; }

  // flatten a per-axis storage multi-index (row-major)
  std::size_t flatten(const std::vector<int>& idx) const;
  std::vector<int> unflatten(std::size_t flat) const;

  // lattice point for a flat index, on either side
  RVec point(std::size_t flat, Side side) const;

  bool operator==(const GridSpec& o) const {
    return n == o.n && N == o.N && L == o.L;
  }
};

void validate_spec(const GridSpec& spec);

// Samples of a function on the spatial lattice.
struct GridFunction {
  GridSpec spec;
  CVec values; // row-major over axes

  GridFunction() = default;
  GridFunction(const GridSpec& s, CVec v) : spec(s), values(std::move(v)) {}
  static GridFunction zero(const GridSpec& s);
};

// Discrete Fourier coefficients on the dual lattice, same storage order.
struct Spectrum {
  GridSpec spec;
  CVec coeffs;

  Spectrum() = default;
  Spectrum(const GridSpec& s, CVec c) : spec(s), coeffs(std::move(c)) {}
  static Spectrum zero(const GridSpec& s);
};

// A closed-form field; side says whether the evaluator gives point values or
// Fourier-transform values.
struct AnalyticField {
  std::function<Complex(const RVec&)> eval;
  Side side = Side::spatial;
};

// Sample an analytic field on the lattice of the indicated side.  Throws if
// any sample is non-finite.
GridFunction discretize(const AnalyticField& f, const GridSpec& spec);

// Unitary-convention transforms:
//   dft:  c[m] = h^n * sum_j f(x_j) e^{-2 pi i <j, m>/N}
//   idft: f[j] = (1/L)^n * sum_m c[m] e^{+2 pi i <j, m>/N}
// so idft(dft(f)) == f exactly and Plancherel holds:
//   (1/L)^n sum |c|^2 == h^n sum |f|^2.
Spectrum dft(const GridFunction& f);
GridFunction idft(const Spectrum& c);

// Tensor product of m functions on identical d-dimensional grids, giving a
// function on the (m*d)-dimensional grid with the same N and L.
GridFunction tensor_product(const std::vector<GridFunction>& factors);

// Discrete l^p norm with lattice weight h^{n/p}; p = infinity() gives sup.
double lp_norm(const GridFunction& f, double p);
double lp_norm(const Spectrum& c, double p); // weight (1/L)^{n/p}

// H^s norm: sum over modes of (1 + |xi|^2)^s |c|^2 with weight (1/L)^n.
double sobolev_norm(const GridFunction& f, double s);
double sobolev_norm(const Spectrum& c, double s);

constexpr double infinity() { return std::numeric_limits<double>::infinity(); }

// Binary grid-file round trip: 16-byte magic, length-prefixed JSON header
// {n, N, L, side, dtype:"complex128-le"}, then raw little-endian re/im pairs.
void save_grid(const std::string& path, const GridSpec& spec, const CVec& data,
               Side side);
struct LoadedGrid {
  GridSpec spec;
  CVec data;
  Side side;
};
LoadedGrid load_grid(const std::string& path);

// Numerically stable pairwise-tree summation (deterministic).
double tree_sum(const std::vector<double>& xs);
Complex tree_sum(const std::vector<Complex>& xs);

// Iterate all flat indices of a spec, calling fn(flat, per-axis storage idx).
void for_each_index(const GridSpec& spec,
                    const std::function<void(std::size_t, const std::vector<int>&)>& fn);

} // namespace rconv
