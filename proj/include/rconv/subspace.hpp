#pragma once

#include "rconv/grid.hpp"

namespace rconv {

enum class SubspaceKind { coordinate, diagonal };

// A k-dimensional subspace H of R^n along which functions are restricted.
//
// coordinate: H = {(x', 0)} for the first k coordinates of R^n.
// diagonal:   R^n = (R^d)^m and H = {(y, y, ..., y) : y in R^d}, so k = d.
//
// basis_H rows form an orthonormal basis of H; basis_perp rows complete it to
// an orthonormal basis of R^n.
//
// jacobian_rho is the metric factor of the parametrization used for fiber
// integrals over the dual lattice (see mixed_norm.hpp): 1 for coordinate
// subspaces, m^{-d/2} for the symmetric diagonal parametrization with m = 2,
// and m^{d/2} for m = 3 where the parametrization follows the simplex
// coordinates (eta_1, ..., eta_{m-1}).
struct Subspace {
  SubspaceKind kind = SubspaceKind::coordinate;
  int n = 1; // ambient dimension
  int k = 1; // dim H
  int m = 1; // number of diagonal blocks (diagonal kind only)
  int d = 1; // block dimension (diagonal kind only)
  Eigen::MatrixXd basis_H;    // k x n
  Eigen::MatrixXd basis_perp; // (n-k) x n
  double jacobian_rho = 1.0;
};

Subspace make_coordinate_subspace(int k, int n);
Subspace make_diagonal_subspace(int m, int d);

// One fiber of the dual-lattice foliation over a base frequency of H^*.
// For the coordinate kind the base index is the first-k-axes lattice point;
// for the diagonal kind it is the d-dimensional lattice point mu with
// m_1 + ... + m_m = mu (mod N) componentwise over the block indices.
struct Fiber {
  std::vector<int> base;               // per-axis storage index, length k (or d)
  std::vector<std::size_t> members;    // flat indices into the full lattice
};

// Base-lattice spec for the dual foliation of H (k-dimensional, same N, L).
GridSpec base_spec(const Subspace& H, const GridSpec& spec);

// Enumerate all fibers.  Every full-lattice index appears in exactly one fiber
// and each fiber has exactly N^{n-k} members.
std::vector<Fiber> fibers(const Subspace& H, const GridSpec& spec);

// Flat base index (into base_spec's lattice) of a full-lattice point.
std::size_t base_index_of(const Subspace& H, const GridSpec& spec,
                          const std::vector<int>& idx);

// Restriction of a spatial grid function to H, as a function on the
// k-dimensional lattice: coordinate slice x'' = 0, or the map
// y -> F(y, ..., y) for the diagonal kind.
GridFunction restrict_to(const GridFunction& F, const Subspace& H);

// Workhorse identity relating the transform of the restriction to fiber sums:
//   dft(restrict_to(F, H))[xi'] = (1/L)^{n-k} * sum over the fiber of xi'
//                                 of dft(F).
// Returns those fiber sums, for testing the identity and for building
// restricted convolutions.
Spectrum fiber_sums(const Spectrum& F, const Subspace& H);

} // namespace rconv
