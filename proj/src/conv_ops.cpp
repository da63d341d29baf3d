#include "rconv/conv_ops.hpp"

#include <cmath>

#include "rconv/random_fields.hpp"

namespace rconv {

namespace {

Complex keval(const KernelHandle& K, const RVec& xi) {
  if (K.spectrum) return K.spectrum(xi);
  if (K.measure) return K.measure->fourier(xi);
  throw std::invalid_argument("kernel has no spectrum or measure");
}

// coordinate-subspace slice of a spectrum at xi'' = 0
Spectrum spectrum_restrict(const Spectrum& F, const Subspace& H) {
  if (H.kind != SubspaceKind::coordinate)
    throw std::invalid_argument("frequency restriction needs a coordinate subspace");
  const GridSpec b = base_spec(H, F.spec);
  Spectrum out = Spectrum::zero(b);
  std::vector<int> full(H.n, 0);
  for_each_index(b, [&](std::size_t bf, const std::vector<int>& bidx) {
    for (int a = 0; a < H.k; ++a) full[a] = bidx[a];
    out.coeffs[static_cast<Eigen::Index>(bf)] =
        F.coeffs[static_cast<Eigen::Index>(F.spec.flatten(full))];
  });
  return out;
}

} // namespace

GridFunction conv(const GridFunction& F, const GridFunction& G) {
  if (!(F.spec == G.spec)) throw std::invalid_argument("conv: spec mismatch");
  auto cf = dft(F), cg = dft(G);
  return idft(Spectrum(F.spec, cf.coeffs.cwiseProduct(cg.coeffs)));
}

GridFunction conv(const GridFunction& F, const KernelHandle& G) {
  auto cf = dft(F);
  auto cg = sample_spectrum(G, F.spec);
  return idft(Spectrum(F.spec, cf.coeffs.cwiseProduct(cg.coeffs)));
}

Spectrum t_apply(const Spectrum& F, const Spectrum& Ghat, const Subspace& H) {
  if (!(F.spec == Ghat.spec)) throw std::invalid_argument("t_apply: spec mismatch");
  return fiber_sums(Spectrum(F.spec, F.coeffs.cwiseProduct(Ghat.coeffs)), H);
}

Spectrum t_star_apply(const Spectrum& h, const Spectrum& Ghat, const Subspace& H) {
  const GridSpec b = base_spec(H, Ghat.spec);
  if (!(h.spec == b)) throw std::invalid_argument("t_star_apply: base spec mismatch");
  Spectrum out = Spectrum::zero(Ghat.spec);
  for_each_index(Ghat.spec, [&](std::size_t flat, const std::vector<int>& idx) {
    const auto bi = static_cast<Eigen::Index>(base_index_of(H, Ghat.spec, idx));
    out.coeffs[static_cast<Eigen::Index>(flat)] =
        std::conj(Ghat.coeffs[static_cast<Eigen::Index>(flat)]) * h.coeffs[bi];
  });
  return out;
}

GridFunction conv_restrict(const GridFunction& F, const GridFunction& G,
                           const Subspace& H) {
  return idft(t_apply(dft(F), dft(G), H));
}

GridFunction conv_restrict(const GridFunction& F, const KernelHandle& G,
                           const Subspace& H) {
  return idft(t_apply(dft(F), sample_spectrum(G, F.spec), H));
}

RVec tt_star_multiplier(const KernelHandle& G, const Subspace& H,
                        const GridSpec& spec) {
  auto Ghat = sample_spectrum(G, spec);
  const GridSpec b = base_spec(H, spec);
  const double w = std::pow(1.0 / spec.L, spec.n - H.k) * H.jacobian_rho;
  RVec mult = RVec::Zero(static_cast<Eigen::Index>(b.size()));
  for_each_index(spec, [&](std::size_t flat, const std::vector<int>& idx) {
    mult[static_cast<Eigen::Index>(base_index_of(H, spec, idx))] +=
        w * std::norm(Ghat.coeffs[static_cast<Eigen::Index>(flat)]);
  });
  return mult;
}

double operator_norm_power(const Spectrum& Ghat, const Subspace& H, int iters,
                           std::uint64_t seed) {
  const GridSpec b = base_spec(H, Ghat.spec);
  Spectrum h = Spectrum::zero(b);
  for (std::size_t i = 0; i < b.size(); ++i)
    h.coeffs[static_cast<Eigen::Index>(i)] = gaussian_pair(seed, i);
  double rayleigh = 0;
  for (int it = 0; it < iters; ++it) {
    const Spectrum u = t_star_apply(h, Ghat, H);
    const Spectrum h2 = t_apply(u, Ghat, H); // TT* h (note T(u^) uses G^ again)
    const double hh = h.coeffs.squaredNorm();
    rayleigh = (h2.coeffs.conjugate().cwiseProduct(h.coeffs)).sum().real() / hh;
    const double nrm = h2.coeffs.norm();
    if (nrm == 0) return 0.0;
    h.coeffs = h2.coeffs / nrm;
  }
  return std::sqrt(rayleigh);
}

Spectrum near_extremal_input(const Spectrum& Ghat, const Subspace& H) {
  const RVec inner = lambda_inner_profile(Ghat, H, 2);
  Eigen::Index best = 0;
  inner.maxCoeff(&best);
  Spectrum F = Spectrum::zero(Ghat.spec);
  for_each_index(Ghat.spec, [&](std::size_t flat, const std::vector<int>& idx) {
    if (static_cast<Eigen::Index>(base_index_of(H, Ghat.spec, idx)) == best)
      F.coeffs[static_cast<Eigen::Index>(flat)] =
          std::conj(Ghat.coeffs[static_cast<Eigen::Index>(flat)]);
  });
  return F;
}

GridFunction multilinear_apply(const KernelHandle& K,
                               const std::vector<GridFunction>& fs, int band) {
  const int m = static_cast<int>(fs.size());
  if (m < 2 || m > 3) throw std::invalid_argument("multilinear_apply needs m in {2,3}");
  const GridSpec spec = fs.front().spec;
  for (const auto& f : fs)
    if (!(f.spec == spec)) throw std::invalid_argument("factor spec mismatch");
  const int d = spec.n;
  if (m * d > 6) throw std::invalid_argument("budget exceeded: md > 6");
  if (K.n != m * d) throw std::invalid_argument("kernel dimension mismatch");

  // in-band mode list (flat index, signed frequency vector)
  std::vector<std::pair<std::size_t, RVec>> modes;
  for_each_index(spec, [&](std::size_t flat, const std::vector<int>& idx) {
    if (band > 0)
      for (int a = 0; a < d; ++a)
        if (std::abs(spec.signed_index(idx[a])) > band) return;
    modes.emplace_back(flat, spec.point(flat, Side::frequency));
  });
  double tuples = 1;
  for (int j = 0; j < m; ++j) tuples *= static_cast<double>(modes.size());
  if (tuples > 1.1e9) throw std::invalid_argument("budget exceeded: mode tuples");

  std::vector<Spectrum> hats;
  hats.reserve(fs.size());
  for (const auto& f : fs) hats.push_back(dft(f));

  const double w = std::pow(1.0 / spec.L, (m - 1) * d);
  Spectrum out = Spectrum::zero(spec);
  RVec zeta(m * d);
  std::vector<int> sum_idx(d);
  auto base_of = [&](const std::vector<const std::vector<int>*>& parts) {
    for (int a = 0; a < d; ++a) {
      int s = 0;
      for (const auto* p : parts) s += (*p)[a];
      sum_idx[a] = s % spec.N;
    }
    return spec.flatten(sum_idx);
  };

  // cache unflattened indices once
  std::vector<std::vector<int>> mode_idx(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i)
    mode_idx[i] = spec.unflatten(modes[i].first);

  if (m == 2) {
    for (std::size_t i1 = 0; i1 < modes.size(); ++i1) {
      const Complex a1 = hats[0].coeffs[static_cast<Eigen::Index>(modes[i1].first)];
      if (a1 == Complex(0, 0)) continue;
      zeta.head(d) = modes[i1].second;
      for (std::size_t i2 = 0; i2 < modes.size(); ++i2) {
        const Complex a2 = hats[1].coeffs[static_cast<Eigen::Index>(modes[i2].first)];
        if (a2 == Complex(0, 0)) continue;
        zeta.tail(d) = modes[i2].second;
        const std::size_t mu = base_of({&mode_idx[i1], &mode_idx[i2]});
        out.coeffs[static_cast<Eigen::Index>(mu)] += w * a1 * a2 * keval(K, zeta);
      }
    }
  } else {
    for (std::size_t i1 = 0; i1 < modes.size(); ++i1) {
      const Complex a1 = hats[0].coeffs[static_cast<Eigen::Index>(modes[i1].first)];
      if (a1 == Complex(0, 0)) continue;
      zeta.segment(0, d) = modes[i1].second;
      for (std::size_t i2 = 0; i2 < modes.size(); ++i2) {
        const Complex a2 = hats[1].coeffs[static_cast<Eigen::Index>(modes[i2].first)];
        if (a2 == Complex(0, 0)) continue;
        zeta.segment(d, d) = modes[i2].second;
        for (std::size_t i3 = 0; i3 < modes.size(); ++i3) {
          const Complex a3 =
              hats[2].coeffs[static_cast<Eigen::Index>(modes[i3].first)];
          if (a3 == Complex(0, 0)) continue;
          zeta.segment(2 * d, d) = modes[i3].second;
          const std::size_t mu =
              base_of({&mode_idx[i1], &mode_idx[i2], &mode_idx[i3]});
          out.coeffs[static_cast<Eigen::Index>(mu)] +=
              w * a1 * a2 * a3 * keval(K, zeta);
        }
      }
    }
  }
  return idft(out);
}

GridFunction multilinear_apply_measure(
    const QuadratureMeasure& mu,
    const std::vector<std::function<Complex(const RVec&)>>& fs,
    const GridSpec& spec) {
  const int m = static_cast<int>(fs.size());
  if (mu.dim() != m * spec.n)
    throw std::invalid_argument("measure dimension must be m*d");
  GridFunction out = GridFunction::zero(spec);
  const int d = spec.n;
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    const RVec x = spec.point(flat, Side::spatial);
    Complex acc(0, 0);
    for (Eigen::Index q = 0; q < mu.weights.size(); ++q) {
      Complex prod(1, 0);
      for (int j = 0; j < m; ++j) {
        RVec arg = x - mu.points.row(q).segment(j * d, d).transpose();
        prod *= fs[static_cast<std::size_t>(j)](arg);
      }
      acc += mu.weights[q] * prod;
    }
    out.values[static_cast<Eigen::Index>(flat)] = acc;
  }
  return out;
}

// --- verifiers ------------------------------------------------------------

VerificationReport verify_young_restricted(const GridFunction& F,
                                           const GridFunction& G,
                                           const Subspace& H, double p,
                                           double q, double r) {
  auto inv = [](double e) { return e == infinity() ? 0.0 : 1.0 / e; };
  if (!((p >= 2 || p == infinity()) && (q >= 2 || q == infinity()) &&
        (r >= 2 || r == infinity())) ||
      std::abs(inv(p) + inv(q) + inv(r) - 1.0) > 1e-12)
    throw std::invalid_argument("need p,q,r >= 2 with 1/p + 1/q + 1/r = 1");
  const double lhs = lp_norm(conv_restrict(F, G, H), r);
  const double rhs = lambda_norm(F, H, 2, p) * lambda_norm(G, H, 2, q);
  nlohmann::json params = {
      {"n", H.n},
      {"k", H.k},
      {"kind", H.kind == SubspaceKind::coordinate ? "coordinate" : "diagonal"},
      {"p", p == infinity() ? -1 : p},
      {"q", q == infinity() ? -1 : q},
      {"r", r == infinity() ? -1 : r},
      {"jacobian_rho", H.jacobian_rho},
  };
  auto rep = make_report("young-restricted", params, lhs, rhs, 1e-9);
  if (H.kind == SubspaceKind::diagonal) {
    // the module's Lambda weights carry jacobian_rho^{1/2 - 1/p}; undoing
    // them multiplies the ratio by jacobian_rho^{1/r}
    const double norm_ratio =
        rep.ratio * std::pow(H.jacobian_rho, inv(r));
    rep.params["normalized_ratio"] = norm_ratio;
    rep.params["normalization"] = "ratio * jacobian_rho^(1/r)";
    rep.pass = norm_ratio <= 1.0 + rep.tol;
  }
  return rep;
}

VerificationReport verify_restriction_product(const GridFunction& F,
                                              const GridFunction& G,
                                              const Subspace& H, double p,
                                              double q, double r) {
  auto inv = [](double e) { return e == infinity() ? 0.0 : 1.0 / e; };
  if (std::abs(inv(p) + inv(q) + inv(r) - 1.0) > 1e-12 ||
      !((p >= 2 || p == infinity()) && (q >= 2 || q == infinity()) &&
        (r >= 2 || r == infinity())))
    throw std::invalid_argument("need p,q,r >= 2 with 1/p + 1/q + 1/r = 1");
  GridFunction FG(F.spec, F.values.cwiseProduct(G.values));
  const double lhs = lp_norm(spectrum_restrict(dft(FG), H), r);
  const double rhs =
      mixed_spatial_norm(F, H, p, 2) * mixed_spatial_norm(G, H, q, 2);
  auto rep = make_report("restriction-product",
                         {{"n", H.n}, {"k", H.k}, {"p", p}, {"q", q}, {"r", r}},
                         lhs, rhs, 0.0);
  rep.pass = std::isfinite(rep.ratio); // comparability statement
  return rep;
}

VerificationReport verify_restriction_linear(const GridFunction& F,
                                             const Subspace& H, double p) {
  if (!(p >= 2)) throw std::invalid_argument("need p >= 2");
  const double r = p == 2.0 ? infinity() : p / (p - 2.0);
  const double lhs = lp_norm(spectrum_restrict(dft(F), H), r);
  const double rhs = mixed_spatial_norm(F, H, p, 1);
  auto rep = make_report("restriction-linear",
                         {{"n", H.n},
                          {"k", H.k},
                          {"p", p},
                          {"r", r == infinity() ? -1 : r}},
                         lhs, rhs, 0.0);
  rep.pass = std::isfinite(rep.ratio);
  return rep;
}

VerificationReport lp_improving_bound(const KernelHandle& nu, double codim_l,
                                      double gamma,
                                      const std::vector<GridFunction>& fs,
                                      double p, bool l2_form, int band) {
  const GridFunction B = multilinear_apply(nu, fs, band);
  double lhs, rhs = 1.0;
  if (l2_form) {
    lhs = sobolev_norm(B, gamma);
    for (const auto& f : fs) rhs *= lp_norm(f, 2);
  } else {
    const double pp = p / (p - 1.0);
    lhs = lp_norm(B, pp);
    for (const auto& f : fs) rhs *= lp_norm(f, p);
  }
  const double p_min = 2.0 * (codim_l + gamma) / (codim_l + 2.0 * gamma);
  auto rep = make_report("lp-improving",
                         {{"kernel", nu.id},
                          {"l", codim_l},
                          {"gamma", gamma},
                          {"p", p},
                          {"form", l2_form ? "l2-sobolev" : "lp-improving"},
                          {"p_min", p_min},
                          {"in_range", l2_form || p > p_min}},
                         lhs, rhs, 0.0);
  rep.pass = std::isfinite(rep.ratio);
  return rep;
}

VerificationReport product_sobolev_check(const GridFunction& u,
                                         const GridFunction& v, double r,
                                         double s) {
  if (!(r >= 0) || !(s >= 0)) throw std::invalid_argument("need r, s >= 0");
  if (!(u.spec == v.spec)) throw std::invalid_argument("spec mismatch");
  const double gamma = r + s - 0.5 * u.spec.n;
  GridFunction uv(u.spec, u.values.cwiseProduct(v.values));
  const double lhs = sobolev_norm(uv, gamma);
  const double rhs = sobolev_norm(u, r) * sobolev_norm(v, s);
  auto rep = make_report(
      "product-sobolev",
      {{"d", u.spec.n}, {"r", r}, {"s", s}, {"gamma", gamma}}, lhs, rhs, 0.0);
  rep.pass = std::isfinite(rep.ratio);
  return rep;
}

ProblemOneReport compare_problem_one_bounds(const KernelHandle& K,
                                            const GridFunction& f,
                                            const GridFunction& g, double r) {
  if (!(r >= 1)) throw std::invalid_argument("need r >= 1");
  const GridSpec spec = f.spec;
  const int d = spec.n;
  if (K.n != 2 * d) throw std::invalid_argument("kernel must live on R^{2d}");
  ProblemOneReport rep;
  rep.lhs = lp_norm(multilinear_apply(K, {f, g}), r);
  const double f2g2 = lp_norm(f, 2) * lp_norm(g, 2);
  const double cell = std::pow(1.0 / spec.L, d);

  if (r <= 2.0) {
    if (K.measure && (K.measure->weights.array() >= 0).all()) {
      // (sum |K^(xi,-xi)|^{r'} cell)^{1/r'}, sup for r = 1
      const double rp = r == 1.0 ? infinity() : r / (r - 1.0);
      double acc = 0, sup = 0;
      for (std::size_t flat = 0; flat < spec.size(); ++flat) {
        RVec xi = spec.point(flat, Side::frequency);
        RVec z(2 * d);
        z.head(d) = xi;
        z.tail(d) = -xi;
        const double v = std::abs(keval(K, z));
        sup = std::max(sup, v);
        if (rp != infinity()) acc += cell * std::pow(v, rp);
      }
      rep.rhs_one =
          f2g2 * (rp == infinity() ? sup : std::pow(acc, 1.0 / rp));
      rep.has_one = true;
    }
  }
  if (r >= 2.0) {
    // S(xi) = sum_eta |K^((xi-eta)/2, (xi+eta)/2)|^2 cell ; then the
    // l^{r/(r-2)} norm of S (sup at r = 2), all to the power (r-2)/(2r)
    // (power 1/2 of the l^{r/(r-2)} norm)
    double sup = 0, acc = 0;
    const double rho = r == 2.0 ? infinity() : r / (r - 2.0);
    for (std::size_t fxi = 0; fxi < spec.size(); ++fxi) {
      const RVec xi = spec.point(fxi, Side::frequency);
      double S = 0;
      for (std::size_t feta = 0; feta < spec.size(); ++feta) {
        const RVec eta = spec.point(feta, Side::frequency);
        RVec z(2 * d);
        z.head(d) = 0.5 * (xi - eta);
        z.tail(d) = 0.5 * (xi + eta);
        S += cell * std::norm(keval(K, z));
      }
      sup = std::max(sup, S);
      if (rho != infinity()) acc += cell * std::pow(S, rho);
    }
    rep.rhs_two =
        f2g2 * std::sqrt(rho == infinity() ? sup : std::pow(acc, 1.0 / rho));
    rep.has_two = true;
  }
  return rep;
}

} // namespace rconv
