#include "rconv/kernels.hpp"

#include <cmath>
#include <memory>
#include <unordered_map>
#include <numbers>

namespace rconv {

using std::numbers::pi;

Complex QuadratureMeasure::fourier(const RVec& xi) const {
  if (xi.size() != points.cols())
    throw std::invalid_argument("frequency dimension mismatch");
  Complex acc(0, 0);
  for (Eigen::Index q = 0; q < weights.size(); ++q) {
    const double phase = -2 * pi * points.row(q).dot(xi);
    acc += weights[q] * Complex(std::cos(phase), std::sin(phase));
  }
  return acc;
}

nlohmann::json QuadratureMeasure::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (Eigen::Index q = 0; q < points.rows(); ++q) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index a = 0; a < points.cols(); ++a) row.push_back(points(q, a));
    pts.push_back(std::move(row));
  }
  nlohmann::json ws = nlohmann::json::array();
  for (Eigen::Index q = 0; q < weights.size(); ++q) ws.push_back(weights[q]);
  return {{"n", dim()}, {"points", pts}, {"weights", ws}};
}

QuadratureMeasure QuadratureMeasure::from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const auto& pts = j.at("points");
  const auto& ws = j.at("weights");
  if (pts.size() != ws.size())
    throw std::invalid_argument("points/weights length mismatch");
  QuadratureMeasure mu;
  mu.points.resize(static_cast<Eigen::Index>(pts.size()), n);
  mu.weights.resize(static_cast<Eigen::Index>(ws.size()));
  for (std::size_t q = 0; q < pts.size(); ++q) {
    if (static_cast<int>(pts[q].size()) != n)
      throw std::invalid_argument("point dimension mismatch");
    for (int a = 0; a < n; ++a) mu.points(static_cast<Eigen::Index>(q), a) = pts[q][a];
    mu.weights[static_cast<Eigen::Index>(q)] = ws[q].get<double>();
  }
  return mu;
}

KernelHandle heat_kernel(double t, int n) {
  if (!(t > 0)) throw std::invalid_argument("heat time must be positive");
  KernelHandle K;
  K.id = "heat(t=" + std::to_string(t) + ",n=" + std::to_string(n) + ")";
  K.n = n;
  K.radial_base = true;
  K.spectrum = [t](const RVec& xi) {
    return Complex(std::exp(-4 * pi * pi * t * xi.squaredNorm()), 0);
  };
  return K;
}

KernelHandle bessel_kernel(double s, int n) {
  if (!(s > 0)) throw std::invalid_argument("Bessel order must be positive");
  KernelHandle K;
  K.id = "bessel(s=" + std::to_string(s) + ",n=" + std::to_string(n) + ")";
  K.n = n;
  K.radial_base = true;
  K.spectrum = [s](const RVec& xi) {
    return Complex(std::pow(1.0 + xi.squaredNorm(), -0.5 * s), 0);
  };
  return K;
}

KernelHandle riesz_kernel(double a, int n) {
  if (!(a > 0)) throw std::invalid_argument("Riesz exponent must be positive");
  KernelHandle K;
  K.id = "riesz(a=" + std::to_string(a) + ",n=" + std::to_string(n) + ")";
  K.n = n;
  K.radial_base = true;
  K.spectrum = [a](const RVec& xi) {
    const double r = xi.norm();
    return r == 0.0 ? Complex(0, 0) : Complex(std::pow(r, -a), 0);
  };
  return K;
}

double sphere_surface_area(int n, double radius) {
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n) *
         std::pow(radius, n - 1);
}

double sphere_hat(int n, double radius, double xi_norm) {
  if (n < 2 || n > 6) throw std::invalid_argument("sphere dimension must be in [2,6]");
  const double nu = 0.5 * (n - 2);
  const double u = radius * xi_norm;
  const double scale = std::pow(radius, n - 1);
  if (u < 1e-8) return scale * 2.0 * std::pow(pi, nu + 1) / std::tgamma(nu + 1);
  return scale * 2 * pi * std::pow(u, -nu) * std::cyl_bessel_j(nu, 2 * pi * u);
}

KernelHandle sphere_kernel(int n, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("sphere radius must be positive");
  KernelHandle K;
  K.id = "sphere(n=" + std::to_string(n) + ",r=" + std::to_string(radius) + ")";
  K.n = n;
  K.radial_base = true;
  K.spectrum = [n, radius](const RVec& xi) {
    return Complex(sphere_hat(n, radius, xi.norm()), 0);
  };
  K.measure = sphere_quadrature(n, radius, 48);
  return K;
}

void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(order);
  weights.resize(order);
  for (int i = 0; i < order; ++i) {
    // Newton from the Chebyshev-like initial guess
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        const double dpf = order * (x * p1 - p0) / (x * x - 1.0);
        weights[i] = 2.0 / ((1.0 - x * x) * dpf * dpf);
        break;
      }
    }
    nodes[i] = x;
  }
}

QuadratureMeasure sphere_quadrature(int n, double radius, int order) {
  if (n < 2 || n > 6) throw std::invalid_argument("sphere dimension must be in [2,6]");
  if (order < 4) throw std::invalid_argument("quadrature order too small");
  const int n_phi = 2 * order;
  QuadratureMeasure mu;
  if (n == 2) {
    mu.points.resize(n_phi, 2);
    mu.weights.resize(n_phi);
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2 * pi * j / n_phi;
      mu.points(j, 0) = radius * std::cos(phi);
      mu.points(j, 1) = radius * std::sin(phi);
      mu.weights[j] = radius * 2 * pi / n_phi;
    }
    return mu;
  }
  // polar angles theta_1..theta_{n-2} in (0, pi) by Gauss-Legendre (the
  // integrand is analytic in theta so convergence is exponential), uniform
  // azimuth
  std::vector<double> gl_x, gl_w;
  gauss_legendre(order, gl_x, gl_w);
  const int n_theta = n - 2;
  long total = n_phi;
  for (int a = 0; a < n_theta; ++a) total *= order;
  mu.points.resize(total, n);
  mu.weights.resize(total);
  std::vector<int> idx(n_theta, 0);
  long row = 0;
  while (true) {
    // angles and the product of sin-power weights for this theta tuple
    double wtheta = 1.0, sin_prod = 1.0;
    std::vector<double> theta(n_theta);
    RVec partial(n); // direction components built from the angles
    for (int a = 0; a < n_theta; ++a) {
      theta[a] = 0.5 * pi * (gl_x[idx[a]] + 1.0);
      const int sin_pow = n - 2 - a; // sin^{n-2-a} theta_a in the measure
      wtheta *= 0.5 * pi * gl_w[idx[a]] * std::pow(std::sin(theta[a]), sin_pow);
      partial[a] = sin_prod * std::cos(theta[a]);
      sin_prod *= std::sin(theta[a]);
    }
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2 * pi * j / n_phi;
      RVec x = partial;
      x[n - 2] = sin_prod * std::cos(phi);
      x[n - 1] = sin_prod * std::sin(phi);
      mu.points.row(row) = radius * x.transpose();
      mu.weights[row] = std::pow(radius, n - 1) * wtheta * 2 * pi / n_phi;
      ++row;
    }
    int a = n_theta - 1;
    for (; a >= 0; --a) {
      if (++idx[a] < order) break;
      idx[a] = 0;
    }
    if (a < 0) break;
  }
  return mu;
}

KernelHandle tensor_kernel(const KernelHandle& a, const KernelHandle& b) {
  KernelHandle K;
  K.id = "tensor(" + a.id + "," + b.id + ")";
  K.n = a.n + b.n;
  K.radial_base = false;
  if (a.spectrum && b.spectrum) {
    const int na = a.n;
    auto sa = a.spectrum, sb = b.spectrum;
    K.spectrum = [na, sa, sb, nb = b.n](const RVec& xi) {
      return sa(xi.head(na)) * sb(xi.tail(nb));
    };
  }
  return K;
}

KernelHandle product_sphere_kernel(int m, int d, double radius) {
  if (m < 2 || m > 3) throw std::invalid_argument("product sphere needs m in {2,3}");
  KernelHandle K;
  K.id = "product-sphere(m=" + std::to_string(m) + ",d=" + std::to_string(d) +
         ",r=" + std::to_string(radius) + ")";
  K.n = m * d;
  K.radial_base = true; // invariant under simultaneous block rotations
  K.spectrum = [m, d, radius](const RVec& xi) {
    double v = 1.0;
    for (int blk = 0; blk < m; ++blk)
      v *= sphere_hat(d, radius, xi.segment(blk * d, d).norm());
    return Complex(v, 0);
  };
  return K;
}

KernelHandle wave_kernel_3d(double t) {
  KernelHandle K;
  K.id = "wave3d(t=" + std::to_string(t) + ")";
  K.n = 3;
  K.radial_base = true;
  K.spectrum = [t](const RVec& xi) {
    const double r = xi.norm();
    if (r < 1e-12) return Complex(t, 0);
    return Complex(std::sin(2 * pi * t * r) / (2 * pi * r), 0);
  };
  return K;
}

GridFunction wave_propagate_3d(const GridFunction& f, double t) {
  if (f.spec.n != 3)
    throw std::invalid_argument("wave_propagate_3d: f must live on a 3-d grid");
  if (!(t > 0)) throw std::invalid_argument("wave_propagate_3d: t must be positive");
  const KernelHandle K = wave_kernel_3d(t);
  Spectrum c = dft(f);
  for (std::size_t flat = 0; flat < c.spec.size(); ++flat) {
    const auto i = static_cast<Eigen::Index>(flat);
    c.coeffs[i] *= K.spectrum(c.spec.point(flat, Side::frequency));
  }
  return idft(c);
}

KernelHandle memoize_radial_spectrum(const KernelHandle& K) {
  if (!K.radial_base)
    throw std::invalid_argument("memoize_radial_spectrum: kernel is not radial");
  // radial_base only promises invariance under joint block rotations (the
  // product-sphere case); the cache needs full dependence on |xi| alone, so
  // probe a few off-axis directions against the axis value.
  for (double r : {0.7, 1.3, 2.9}) {
    RVec axis = RVec::Zero(K.n);
    axis[0] = r;
    RVec diag = RVec::Constant(K.n, r / std::sqrt(double(K.n)));
    if (std::abs(K.spectrum(axis) - K.spectrum(diag)) >
        1e-12 * (1 + std::abs(K.spectrum(axis))))
      throw std::invalid_argument(
          "memoize_radial_spectrum: spectrum of " + K.id +
          " is not a function of |xi| alone");
  }
  KernelHandle M = K;
  M.id = K.id + "[memo]";
  auto cache = std::make_shared<std::unordered_map<double, Complex>>();
  M.spectrum = [base = K.spectrum, cache, n = K.n](const RVec& xi) {
    const double r2 = xi.squaredNorm();
    const auto it = cache->find(r2);
    if (it != cache->end()) return it->second;
    RVec probe = RVec::Zero(n);
    probe[0] = std::sqrt(r2);
    const Complex v = base(probe);
    cache->emplace(r2, v);
    return v;
  };
  return M;
}

Spectrum deposit(const QuadratureMeasure& mu, const GridSpec& spec) {
  validate_spec(spec);
  if (mu.dim() != spec.n)
    throw std::invalid_argument("measure/grid dimension mismatch");
  Spectrum out = Spectrum::zero(spec);
  for (std::size_t flat = 0; flat < spec.size(); ++flat)
    out.coeffs[static_cast<Eigen::Index>(flat)] =
        mu.fourier(spec.point(flat, Side::frequency));
  return out;
}

Spectrum sample_spectrum(const KernelHandle& K, const GridSpec& spec) {
  validate_spec(spec);
  if (K.n != spec.n) throw std::invalid_argument("kernel/grid dimension mismatch");
  if (!K.spectrum) {
    if (K.measure) return deposit(*K.measure, spec);
    throw std::invalid_argument("kernel has no spectrum or measure");
  }
  Spectrum out = Spectrum::zero(spec);
  for (std::size_t flat = 0; flat < spec.size(); ++flat)
    out.coeffs[static_cast<Eigen::Index>(flat)] =
        K.spectrum(spec.point(flat, Side::frequency));
  return out;
}

KernelHandle make_kernel(const std::string& name, const nlohmann::json& params) {
  auto get = [&](const char* key, double fallback) {
    return params.contains(key) ? params.at(key).get<double>() : fallback;
  };
  auto geti = [&](const char* key, int fallback) {
    return params.contains(key) ? params.at(key).get<int>() : fallback;
  };
  if (name == "heat") return heat_kernel(get("t", 1.0), geti("n", 2));
  if (name == "bessel") return bessel_kernel(get("s", 1.0), geti("n", 2));
  if (name == "riesz") return riesz_kernel(get("a", 0.5), geti("n", 2));
  if (name == "sphere") return sphere_kernel(geti("n", 3), get("radius", 1.0));
  if (name == "product-sphere")
    return product_sphere_kernel(geti("m", 2), geti("d", 2), get("radius", 1.0));
  if (name == "wave3d") return wave_kernel_3d(get("t", 1.0));
  throw std::invalid_argument("unknown kernel: " + name);
}

std::vector<std::string> kernel_names() {
  return {"heat", "bessel", "riesz", "sphere", "product-sphere", "wave3d"};
}

} // namespace rconv
