#include "rconv/subspace.hpp"

#include <cmath>

namespace rconv {

Subspace make_coordinate_subspace(int k, int n) {
  if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
  Subspace H;
  H.kind = SubspaceKind::coordinate;
  H.n = n;
  H.k = k;
  H.basis_H = Eigen::MatrixXd::Zero(k, n);
  for (int i = 0; i < k; ++i) H.basis_H(i, i) = 1.0;
  H.basis_perp = Eigen::MatrixXd::Zero(n - k, n);
  for (int i = 0; i < n - k; ++i) H.basis_perp(i, k + i) = 1.0;
  H.jacobian_rho = 1.0;
  return H;
}

Subspace make_diagonal_subspace(int m, int d) {
  if (m < 2 || m > 3) throw std::invalid_argument("diagonal subspace needs m in {2,3}");
  if (d < 1) throw std::invalid_argument("block dimension must be positive");
  Subspace H;
  H.kind = SubspaceKind::diagonal;
  H.n = m * d;
  H.k = d;
  H.m = m;
  H.d = d;
  H.basis_H = Eigen::MatrixXd::Zero(d, m * d);
  const double inv = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < d; ++i)
    for (int b = 0; b < m; ++b) H.basis_H(i, b * d + i) = inv;
  H.basis_perp = Eigen::MatrixXd::Zero((m - 1) * d, m * d);
  if (m == 2) {
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < d; ++i) {
      H.basis_perp(i, i) = r;
      H.basis_perp(i, d + i) = -r;
    }
  } else { // m == 3
    const double r2 = 1.0 / std::sqrt(2.0), r6 = 1.0 / std::sqrt(6.0);
    for (int i = 0; i < d; ++i) {
      H.basis_perp(i, i) = r2;
      H.basis_perp(i, d + i) = -r2;
      H.basis_perp(d + i, i) = r6;
      H.basis_perp(d + i, d + i) = r6;
      H.basis_perp(d + i, 2 * d + i) = -2 * r6;
    }
  }
  H.jacobian_rho = m == 2 ? std::pow(2.0, -0.5 * d) : std::pow(3.0, 0.5 * d);
  return H;
}

GridSpec base_spec(const Subspace& H, const GridSpec& spec) {
  if (H.n != spec.n) throw std::invalid_argument("subspace/grid dimension mismatch");
  GridSpec b = spec;
  b.n = H.k;
  return b;
}

std::size_t base_index_of(const Subspace& H, const GridSpec& spec,
                          const std::vector<int>& idx) {
  const GridSpec b = base_spec(H, spec);
  std::vector<int> bidx(H.k);
  if (H.kind == SubspaceKind::coordinate) {
    for (int a = 0; a < H.k; ++a) bidx[a] = idx[a];
  } else {
    for (int i = 0; i < H.d; ++i) {
      int s = 0;
      for (int blk = 0; blk < H.m; ++blk) s += idx[blk * H.d + i];
      bidx[i] = s % spec.N;
    }
  }
  return b.flatten(bidx);
}

std::vector<Fiber> fibers(const Subspace& H, const GridSpec& spec) {
  const GridSpec b = base_spec(H, spec);
  std::vector<Fiber> out(b.size());
  for (std::size_t base = 0; base < b.size(); ++base) out[base].base = b.unflatten(base);
  for_each_index(spec, [&](std::size_t flat, const std::vector<int>& idx) {
    out[base_index_of(H, spec, idx)].members.push_back(flat);
  });
  return out;
}

GridFunction restrict_to(const GridFunction& F, const Subspace& H) {
  if (F.spec.n != H.n) throw std::invalid_argument("subspace/grid dimension mismatch");
  const GridSpec b = base_spec(H, F.spec);
  GridFunction g = GridFunction::zero(b);
  std::vector<int> full(H.n, 0);
  for_each_index(b, [&](std::size_t bf, const std::vector<int>& bidx) {
    if (H.kind == SubspaceKind::coordinate) {
      for (int a = 0; a < H.k; ++a) full[a] = bidx[a];
      for (int a = H.k; a < H.n; ++a) full[a] = 0;
    } else {
      for (int blk = 0; blk < H.m; ++blk)
        for (int i = 0; i < H.d; ++i) full[blk * H.d + i] = bidx[i];
    }
    g.values[static_cast<Eigen::Index>(bf)] =
        F.values[static_cast<Eigen::Index>(F.spec.flatten(full))];
  });
  return g;
}

Spectrum fiber_sums(const Spectrum& F, const Subspace& H) {
  if (F.spec.n != H.n) throw std::invalid_argument("subspace/grid dimension mismatch");
  const GridSpec b = base_spec(H, F.spec);
  Spectrum out = Spectrum::zero(b);
  const double w = std::pow(1.0 / F.spec.L, F.spec.n - H.k);
  for_each_index(F.spec, [&](std::size_t flat, const std::vector<int>& idx) {
    out.coeffs[static_cast<Eigen::Index>(base_index_of(H, F.spec, idx))] +=
        w * F.coeffs[static_cast<Eigen::Index>(flat)];
  });
  return out;
}

} // namespace rconv
