#include "rconv/mixed_norm.hpp"

#include <cmath>

namespace rconv {

RVec lambda_inner_profile(const Spectrum& F, const Subspace& H, double r) {
  if (!(r >= 1) && r != infinity())
    throw std::invalid_argument("inner exponent must be >= 1 or infinity");
  const GridSpec b = base_spec(H, F.spec);
  const double w_in =
      std::pow(1.0 / F.spec.L, F.spec.n - H.k) * H.jacobian_rho;
  RVec inner = RVec::Zero(static_cast<Eigen::Index>(b.size()));
  if (r == infinity()) {
    for_each_index(F.spec, [&](std::size_t flat, const std::vector<int>& idx) {
      auto& slot = inner[static_cast<Eigen::Index>(base_index_of(H, F.spec, idx))];
      slot = std::max(slot, std::abs(F.coeffs[static_cast<Eigen::Index>(flat)]));
    });
    return inner;
  }
  for_each_index(F.spec, [&](std::size_t flat, const std::vector<int>& idx) {
    inner[static_cast<Eigen::Index>(base_index_of(H, F.spec, idx))] +=
        w_in * std::pow(std::abs(F.coeffs[static_cast<Eigen::Index>(flat)]), r);
  });
  for (Eigen::Index i = 0; i < inner.size(); ++i)
    inner[i] = std::pow(inner[i], 1.0 / r);
  return inner;
}

double lambda_norm(const Spectrum& F, const Subspace& H, double r, double p) {
  if (!(p >= 1) && p != infinity())
    throw std::invalid_argument("outer exponent must be >= 1 or infinity");
  const RVec inner = lambda_inner_profile(F, H, r);
  if (p == infinity()) return inner.size() ? inner.maxCoeff() : 0.0;
  const double w_out = std::pow(1.0 / F.spec.L, H.k) / H.jacobian_rho;
  std::vector<double> terms(static_cast<std::size_t>(inner.size()));
  for (Eigen::Index i = 0; i < inner.size(); ++i)
    terms[static_cast<std::size_t>(i)] = w_out * std::pow(inner[i], p);
  return std::pow(tree_sum(terms), 1.0 / p);
}

double lambda_norm(const GridFunction& F, const Subspace& H, double r, double p) {
  return lambda_norm(dft(F), H, r, p);
}

double mixed_spatial_norm(const GridFunction& F, const Subspace& H, double p,
                          double q) {
  if (H.kind != SubspaceKind::coordinate)
    throw std::invalid_argument("mixed spatial norm requires a coordinate subspace");
  if (F.spec.n != H.n) throw std::invalid_argument("subspace/grid dimension mismatch");
  const GridSpec b = base_spec(H, F.spec);
  const double h = F.spec.h();
  const double cell_in = std::pow(h, F.spec.n - H.k);
  const double cell_out = std::pow(h, H.k);
  RVec inner = RVec::Zero(static_cast<Eigen::Index>(b.size()));
  if (q == infinity()) {
    for_each_index(F.spec, [&](std::size_t flat, const std::vector<int>& idx) {
      auto& slot = inner[static_cast<Eigen::Index>(b.flatten(
          std::vector<int>(idx.begin(), idx.begin() + H.k)))];
      slot = std::max(slot, std::abs(F.values[static_cast<Eigen::Index>(flat)]));
    });
  } else {
    if (!(q >= 1)) throw std::invalid_argument("inner exponent must be >= 1");
    for_each_index(F.spec, [&](std::size_t flat, const std::vector<int>& idx) {
      inner[static_cast<Eigen::Index>(b.flatten(
          std::vector<int>(idx.begin(), idx.begin() + H.k)))] +=
          cell_in * std::pow(std::abs(F.values[static_cast<Eigen::Index>(flat)]), q);
    });
    for (Eigen::Index i = 0; i < inner.size(); ++i)
      inner[i] = std::pow(inner[i], 1.0 / q);
  }
  if (p == infinity()) return inner.maxCoeff();
  if (!(p >= 1)) throw std::invalid_argument("outer exponent must be >= 1");
  std::vector<double> terms(static_cast<std::size_t>(inner.size()));
  for (Eigen::Index i = 0; i < inner.size(); ++i)
    terms[static_cast<std::size_t>(i)] = cell_out * std::pow(inner[i], p);
  return std::pow(tree_sum(terms), 1.0 / p);
}

// --- analytic path -------------------------------------------------------

namespace {

// Iterate a centered cubic quadrature lattice of the given dimension.
template <typename Fn>
void for_each_quad_point(int dim, const FiberQuad& q, Fn fn) {
  const int half = static_cast<int>(std::floor(q.radius / q.spacing));
  std::vector<int> idx(dim, -half);
  RVec w(dim);
  const long per_axis = 2L * half + 1;
  long total = 1;
  for (int a = 0; a < dim; ++a) total *= per_axis;
  for (long c = 0; c < total; ++c) {
    for (int a = 0; a < dim; ++a) w[a] = idx[a] * q.spacing;
    fn(w);
    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] <= half) break;
      idx[a] = -half;
    }
  }
}

} // namespace

double fiber_l2_analytic(const std::function<Complex(const RVec&)>& spectrum,
                         const Subspace& H, const RVec& xi, const FiberQuad& q) {
  if (xi.size() != H.k) throw std::invalid_argument("base frequency has wrong dimension");
  const int fdim = H.n - H.k;
  const double cell = std::pow(q.spacing, fdim) * H.jacobian_rho;
  double acc = 0.0;
  RVec zeta(H.n);
  if (H.kind == SubspaceKind::coordinate) {
    for_each_quad_point(fdim, q, [&](const RVec& w) {
      zeta.head(H.k) = xi;
      zeta.tail(fdim) = w;
      acc += cell * std::norm(spectrum(zeta));
    });
  } else {
    for_each_quad_point(fdim, q, [&](const RVec& w) {
      RVec last = xi;
      for (int blk = 0; blk < H.m - 1; ++blk) {
        zeta.segment(blk * H.d, H.d) = w.segment(blk * H.d, H.d);
        last -= w.segment(blk * H.d, H.d);
      }
      zeta.segment((H.m - 1) * H.d, H.d) = last;
      acc += cell * std::norm(spectrum(zeta));
    });
  }
  return acc;
}

namespace {

template <typename Score>
RVec scan_argmax(const Subspace& H, const BaseScan& scan, Score score) {
  RVec best = RVec::Zero(H.k);
  double best_val = -1.0;
  if (scan.radial) {
    for (double t = 0.0; t <= scan.radius + 1e-12; t += scan.step) {
      RVec xi = RVec::Zero(H.k);
      xi[0] = t;
      const double v = score(xi);
      if (v > best_val) {
        best_val = v;
        best = xi;
      }
    }
    return best;
  }
  FiberQuad grid{scan.step, scan.radius};
  RVec xi(H.k);
  for_each_quad_point(H.k, grid, [&](const RVec& w) {
    xi = w;
    const double v = score(xi);
    if (v > best_val) {
      best_val = v;
      best = xi;
    }
  });
  return best;
}

} // namespace

RVec lambda_2inf_argmax(const std::function<Complex(const RVec&)>& spectrum,
                        const Subspace& H, const FiberQuad& q,
                        const BaseScan& scan) {
  return scan_argmax(H, scan, [&](const RVec& xi) {
    return fiber_l2_analytic(spectrum, H, xi, q);
  });
}

double lambda_2inf_analytic(const std::function<Complex(const RVec&)>& spectrum,
                            const Subspace& H, const FiberQuad& q,
                            const BaseScan& scan) {
  const RVec xi = lambda_2inf_argmax(spectrum, H, q, scan);
  return std::sqrt(fiber_l2_analytic(spectrum, H, xi, q));
}

} // namespace rconv
