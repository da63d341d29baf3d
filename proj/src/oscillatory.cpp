#include "rconv/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rconv/random_fields.hpp"

namespace rconv {
namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

using CMatR =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMat = Eigen::MatrixXcd;

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

// odometer increment over mixed radices; returns false after the last tuple
bool advance(std::vector<int>& idx, const std::vector<int>& dims) {
  for (int ax = static_cast<int>(idx.size()) - 1; ax >= 0; --ax) {
    if (++idx[ax] < dims[ax]) return true;
    idx[ax] = 0;
  }
  return false;
}

double dot_rv(const RVec& a, const RVec& b) { return a.dot(b); }

Phase quadratic_registry(const std::string& label, int d) {
  Phase p;
  p.label = label;
  p.d = d;
  if (label == "dot") {
    p.eval = [](const RVec& u, const RVec& v) { return u.dot(v); };
    p.grad = [d](const RVec& u, const RVec& v) {
      RVec g(2 * d);
      g.head(d) = v;
      g.tail(d) = u;
      return g;
    };
    p.hess = [d](const RVec&, const RVec&) {
      RMat h = RMat::Zero(2 * d, 2 * d);
      h.topRightCorner(d, d).setIdentity();
      h.bottomLeftCorner(d, d).setIdentity();
      return h;
    };
    p.separable_delta = true;
    p.alpha = [](const RVec& z) { return -z.squaredNorm(); };
    p.beta = [](const RVec& z, const RVec& u) { return dot_rv(z, u); };
    p.gamma_ = [](const RVec& z, const RVec& v) { return dot_rv(z, v); };
  } else if (label == "squares") {
    p.eval = [](const RVec& u, const RVec& v) {
      return u.squaredNorm() + v.squaredNorm();
    };
    p.grad = [d](const RVec& u, const RVec& v) {
      RVec g(2 * d);
      g.head(d) = 2.0 * u;
      g.tail(d) = 2.0 * v;
      return g;
    };
    p.hess = [d](const RVec&, const RVec&) {
      return RMat(2.0 * RMat::Identity(2 * d, 2 * d));
    };
    p.separable_delta = true;
    p.alpha = [](const RVec& z) { return -2.0 * z.squaredNorm(); };
    p.beta = [](const RVec& z, const RVec& u) { return 2.0 * dot_rv(z, u); };
    p.gamma_ = [](const RVec& z, const RVec& v) { return 2.0 * dot_rv(z, v); };
  } else if (label == "rank-deficient") {
    p.eval = [](const RVec& u, const RVec& v) { return u[0] * v[0]; };
    p.grad = [d](const RVec& u, const RVec& v) {
      RVec g = RVec::Zero(2 * d);
      g[0] = v[0];
      g[d] = u[0];
      return g;
    };
    p.hess = [d](const RVec&, const RVec&) {
      RMat h = RMat::Zero(2 * d, 2 * d);
      h(0, d) = 1.0;
      h(d, 0) = 1.0;
      return h;
    };
    p.separable_delta = true;
    p.alpha = [](const RVec& z) { return -z[0] * z[0]; };
    p.beta = [](const RVec& z, const RVec& u) { return z[0] * u[0]; };
    p.gamma_ = [](const RVec& z, const RVec& v) { return z[0] * v[0]; };
  } else if (label == "zero") {
    p.eval = [](const RVec&, const RVec&) { return 0.0; };
    p.grad = [d](const RVec&, const RVec&) { return RVec(RVec::Zero(2 * d)); };
    p.hess = [d](const RVec&, const RVec&) {
      return RMat(RMat::Zero(2 * d, 2 * d));
    };
    p.separable_delta = true;
    p.alpha = [](const RVec&) { return 0.0; };
    p.beta = [](const RVec&, const RVec&) { return 0.0; };
    p.gamma_ = [](const RVec&, const RVec&) { return 0.0; };
  } else {
    throw std::invalid_argument("unknown phase label: " + label);
  }
  return p;
}

struct Monomial {
  double coef = 0;
  std::vector<int> pu, pv; // exponents per axis
};

double mono_pow(double x, int e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

double mono_eval(const Monomial& t, const RVec& u, const RVec& v) {
  double r = t.coef;
  for (int i = 0; i < static_cast<int>(t.pu.size()); ++i)
    r *= mono_pow(u[i], t.pu[i]) * mono_pow(v[i], t.pv[i]);
  return r;
}

// derivative of the monomial in variable `var` (0..d-1 -> u, d..2d-1 -> v)
Monomial mono_diff(const Monomial& t, int var) {
  const int d = static_cast<int>(t.pu.size());
  Monomial r = t;
  int& e = var < d ? r.pu[var] : r.pv[var - d];
  if (e == 0) {
    r.coef = 0;
    return r;
  }
  r.coef *= e;
  e -= 1;
  return r;
}

} // namespace

Phase make_phase(const std::string& label, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("phase dimension must be 1..3");
  if (label == "rank-deficient" && d < 2)
    throw std::invalid_argument("rank-deficient phase needs d >= 2");
  return quadratic_registry(label, d);
}

std::vector<std::string> phase_names() {
  return {"dot", "squares", "rank-deficient", "zero"};
}

Phase make_polynomial_phase(int d, const nlohmann::json& terms) {
  if (d < 1 || d > 3) throw std::invalid_argument("phase dimension must be 1..3");
  auto parsed = std::make_shared<std::vector<Monomial>>();
  for (const auto& t : terms) {
    Monomial m;
    m.coef = t.at("coef").get<double>();
    m.pu = t.at("pu").get<std::vector<int>>();
    m.pv = t.at("pv").get<std::vector<int>>();
    if (static_cast<int>(m.pu.size()) != d ||
        static_cast<int>(m.pv.size()) != d)
      throw std::invalid_argument("monomial exponent lists must have length d");
    for (int e : m.pu)
      if (e < 0) throw std::invalid_argument("negative exponent");
    for (int e : m.pv)
      if (e < 0) throw std::invalid_argument("negative exponent");
    parsed->push_back(std::move(m));
  }
  Phase p;
  p.label = "polynomial";
  p.d = d;
  p.eval = [parsed](const RVec& u, const RVec& v) {
    double r = 0;
    for (const auto& t : *parsed) r += mono_eval(t, u, v);
    return r;
  };
  p.grad = [parsed, d](const RVec& u, const RVec& v) {
    RVec g = RVec::Zero(2 * d);
    for (int var = 0; var < 2 * d; ++var)
      for (const auto& t : *parsed) g[var] += mono_eval(mono_diff(t, var), u, v);
    return g;
  };
  p.hess = [parsed, d](const RVec& u, const RVec& v) {
    RMat h = RMat::Zero(2 * d, 2 * d);
    for (int a = 0; a < 2 * d; ++a)
      for (int b = a; b < 2 * d; ++b) {
        double s = 0;
        for (const auto& t : *parsed)
          s += mono_eval(mono_diff(mono_diff(t, a), b), u, v);
        h(a, b) = s;
        h(b, a) = s;
      }
    return h;
  };
  return p;
}

Amplitude make_bump_amplitude(int d, double radius) {
  if (d < 1 || d > 3) throw std::invalid_argument("amplitude dimension 1..3");
  if (!(radius > 0)) throw std::invalid_argument("amplitude radius must be > 0");
  // unit-mass smooth bump on [-radius, radius]
  auto raw = [](double s) {
    return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
  };
  double mass = 0; // Simpson on [-1, 1]
  const int M = 4000;
  const double dt = 2.0 / M;
  for (int i = 0; i <= M; ++i) {
    const double w = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    mass += w * raw(-1.0 + i * dt);
  }
  mass *= dt / 3.0;
  const double scale = 1.0 / (mass * radius);
  Amplitude psi;
  psi.d = d;
  psi.support_radius = radius;
  psi.axis_profile = [raw, scale, radius](double t) {
    return scale * raw(t / radius);
  };
  auto prof = psi.axis_profile;
  psi.eval = [prof, d](const RVec& u, const RVec& v) {
    double r = 1;
    for (int i = 0; i < d; ++i) r *= prof(u[i]) * prof(v[i]);
    return r;
  };
  return psi;
}

double delta_z_phi(const Phase& phi, const RVec& u, const RVec& v,
                   const RVec& z) {
  return phi.eval(u, v) - phi.eval(u - z, v - z);
}

double phase_gradient_bound(const Phase& phi, const Amplitude& psi) {
  const int d = phi.d;
  const double r = psi.support_radius;
  const int cnt = d == 1 ? 33 : 9;
  std::vector<int> idx(2 * d, 0), dims(2 * d, cnt);
  RVec u(d), v(d);
  double best = 0;
  do {
    for (int i = 0; i < d; ++i) u[i] = -r + 2.0 * r * idx[i] / (cnt - 1);
    for (int i = 0; i < d; ++i) v[i] = -r + 2.0 * r * idx[d + i] / (cnt - 1);
    best = std::max(best, phi.grad(u, v).norm());
  } while (advance(idx, dims));
  return best;
}

int required_modes(const Phase& phi, const Amplitude& psi, double lambda,
                   double L) {
  const double G = phase_gradient_bound(phi, psi);
  const double need = 2.0 * L * lambda * G;
  return std::max(8, next_pow2(static_cast<int>(std::floor(need)) + 1));
}

GridFunction m_lambda_apply(const Phase& phi, const Amplitude& psi,
                            double lambda, const GridFunction& f,
                            const GridFunction& g) {
  const GridSpec spec = f.spec;
  if (!(g.spec == spec)) throw std::invalid_argument("f and g grids differ");
  if (spec.n != phi.d || psi.d != phi.d)
    throw std::invalid_argument("phase/amplitude/grid dimensions differ");
  const int d = spec.n;
  const double h = spec.h();
  const double G = phase_gradient_bound(phi, psi);
  if (h * lambda * G >= 0.5)
    throw std::runtime_error(
        "resolution guard violated: h*lambda*max|grad phi| = " +
        std::to_string(h * lambda * G) + " >= 0.5; need N >= " +
        std::to_string(required_modes(phi, psi, lambda, spec.L)) +
        " at L = " + std::to_string(spec.L));
  const int J = std::min(spec.N / 2 - 1,
                         static_cast<int>(std::floor(psi.support_radius / h)));
  const int na = 2 * J + 1;
  std::vector<double> prof(na);
  for (int j = 0; j < na; ++j) prof[j] = psi.axis_profile((j - J) * h);

  const std::size_t cols = [&] {
    std::size_t c = 1;
    for (int i = 0; i < d; ++i) c *= static_cast<std::size_t>(na);
    return c;
  }();
  const std::size_t rows = spec.size();
  if (rows * cols > 60'000'000)
    throw std::runtime_error("grid too large for bilinear quadrature");

  // column c of Fsh holds f shifted by the c-th amplitude lattice offset
  CMatR Fsh(rows, cols), Gsh(rows, cols);
  std::vector<int> stride(d, 1);
  for (int ax = d - 2; ax >= 0; --ax) stride[ax] = stride[ax + 1] * spec.N;
  {
    std::vector<int> off(d, 0), dims(d, na);
    std::size_t c = 0;
    std::vector<int> sx(d, 0), sdims(d, spec.N);
    do {
      std::size_t flat = 0;
      std::fill(sx.begin(), sx.end(), 0);
      do {
        std::size_t src = 0;
        for (int ax = 0; ax < d; ++ax) {
          int s = sx[ax] - (off[ax] - J);
          s = ((s % spec.N) + spec.N) % spec.N;
          src += static_cast<std::size_t>(s) * stride[ax];
        }
        Fsh(flat, c) = f.values[src];
        Gsh(flat, c) = g.values[src];
        ++flat;
      } while (advance(sx, sdims));
      ++c;
    } while (advance(off, dims));
  }

  // quadrature weights h^{2d} psi e^{2 pi i lambda phi}
  CMat C(cols, cols);
  {
    const double w0 = std::pow(h, 2 * d);
    std::vector<int> iu(d, 0), dims(d, na);
    RVec u(d), v(d);
    std::size_t cu = 0;
    do {
      double pu = 1;
      for (int i = 0; i < d; ++i) {
        u[i] = (iu[i] - J) * h;
        pu *= prof[iu[i]];
      }
      std::vector<int> iv(d, 0);
      std::size_t cv = 0;
      do {
        double pv = 1;
        for (int i = 0; i < d; ++i) {
          v[i] = (iv[i] - J) * h;
          pv *= prof[iv[i]];
        }
        const double w = pu * pv;
        C(cu, cv) = w == 0.0
                        ? Complex(0, 0)
                        : w0 * w * std::polar(1.0, kTau * lambda * phi.eval(u, v));
        ++cv;
      } while (advance(iv, dims));
      ++cu;
    } while (advance(iu, dims));
  }

  CMatR comb = Gsh * C.transpose();
  GridFunction out(spec, CVec::Zero(rows));
  out.values = (Fsh.array() * comb.array()).rowwise().sum();
  return out;
}

namespace {

// C(z) = step^{2d} sum_{u,v} e^{-2 pi i lambda delta_z phi} psi(u,v)
// psi(u-z,v-z); evaluated either through the separable split or by the
// generic triple loop.
Complex corr_at(const Phase& phi, const Amplitude& psi, double lambda,
                double step, const RVec& z, int J) {
  const int d = phi.d;
  const double wd = std::pow(step, d);
  std::vector<int> dims(d, 2 * J + 1);
  if (phi.separable_delta) {
    Complex qu(0, 0), qv(0, 0);
    std::vector<int> iu(d, 0);
    RVec u(d);
    do {
      double p = 1;
      for (int i = 0; i < d; ++i) {
        u[i] = (iu[i] - J) * step;
        p *= psi.axis_profile(u[i]) * psi.axis_profile(u[i] - z[i]);
      }
      if (p != 0.0) {
        qu += p * std::polar(1.0, -kTau * lambda * phi.beta(z, u));
        qv += p * std::polar(1.0, -kTau * lambda * phi.gamma_(z, u));
      }
    } while (advance(iu, dims));
    return std::polar(1.0, -kTau * lambda * phi.alpha(z)) * (wd * qu) * (wd * qv);
  }
  Complex acc(0, 0);
  std::vector<int> iu(d, 0);
  RVec u(d), v(d);
  do {
    double pu = 1;
    for (int i = 0; i < d; ++i) {
      u[i] = (iu[i] - J) * step;
      pu *= psi.axis_profile(u[i]) * psi.axis_profile(u[i] - z[i]);
    }
    if (pu == 0.0) continue;
    std::vector<int> iv(d, 0);
    do {
      double pv = 1;
      for (int i = 0; i < d; ++i) {
        v[i] = (iv[i] - J) * step;
        pv *= psi.axis_profile(v[i]) * psi.axis_profile(v[i] - z[i]);
      }
      if (pv == 0.0) continue;
      acc += pu * pv * std::polar(1.0, -kTau * lambda * delta_z_phi(phi, u, v, z));
    } while (advance(iv, dims));
  } while (advance(iu, dims));
  return wd * wd * acc;
}

void check_triple_budget(const Phase& phi, int J, int Jz) {
  if (phi.separable_delta) return;
  const double nu = std::pow(2.0 * J + 1.0, phi.d);
  const double nz = std::pow(2.0 * Jz + 1.0, phi.d);
  if (nz * nu * nu > 2e8)
    throw std::runtime_error(
        "triple quadrature too large for a non-separable phase");
}

} // namespace

Complex sigma_phi_hat(const Phase& phi, const Amplitude& psi, const RVec& xi,
                      double lambda, double step) {
  if (xi.size() != phi.d || psi.d != phi.d)
    throw std::invalid_argument("dimension mismatch");
  const double G = phase_gradient_bound(phi, psi);
  if (step * (lambda * G + xi.norm()) >= 0.5)
    throw std::runtime_error(
        "resolution guard violated in the (u,v,z) quadrature; reduce step");
  const int d = phi.d;
  const double r = psi.support_radius;
  const int J = static_cast<int>(std::floor(r / step));
  const int Jz = static_cast<int>(std::floor(2.0 * r / step));
  check_triple_budget(phi, J, Jz);
  std::vector<int> iz(d, 0), dims(d, 2 * Jz + 1);
  RVec z(d);
  Complex acc(0, 0);
  do {
    for (int i = 0; i < d; ++i) z[i] = (iz[i] - Jz) * step;
    acc += std::polar(1.0, -kTau * xi.dot(z)) * corr_at(phi, psi, lambda, step, z, J);
  } while (advance(iz, dims));
  return std::pow(step, d) * acc;
}

double sigma_sup_lattice(const Phase& phi, const Amplitude& psi, double lambda,
                         const GridSpec& spec) {
  if (spec.n != phi.d || psi.d != phi.d)
    throw std::invalid_argument("dimension mismatch");
  validate_spec(spec);
  const int d = spec.n;
  const double h = spec.h();
  const double G = phase_gradient_bound(phi, psi);
  if (h * lambda * G >= 0.5)
    throw std::runtime_error(
        "resolution guard violated: h*lambda*max|grad phi| = " +
        std::to_string(h * lambda * G) + " >= 0.5; need N >= " +
        std::to_string(required_modes(phi, psi, lambda, spec.L)) +
        " at L = " + std::to_string(spec.L));
  const double r = psi.support_radius;
  if (!(2.0 * r < spec.L))
    throw std::invalid_argument("amplitude support exceeds the period");
  const int J = std::min(spec.N / 2 - 1, static_cast<int>(std::floor(r / h)));
  const int Jz = std::min(spec.N / 2, static_cast<int>(std::floor(2.0 * r / h)));
  check_triple_budget(phi, J, Jz);
  // z-correlation deposited periodically, then one DFT
  GridFunction corr(spec, CVec::Zero(spec.size()));
  std::vector<int> iz(d, 0), dims(d, 2 * Jz + 1), sidx(d);
  RVec z(d);
  do {
    for (int i = 0; i < d; ++i) {
      z[i] = (iz[i] - Jz) * h;
      sidx[i] = spec.storage_index(iz[i] - Jz);
    }
    corr.values[spec.flatten(sidx)] += corr_at(phi, psi, lambda, h, z, J);
  } while (advance(iz, dims));
  return dft(corr).coeffs.cwiseAbs().maxCoeff();
}

VerificationReport verify_oscillatory_bound(const Phase& phi,
                                            const Amplitude& psi,
                                            double lambda,
                                            const GridFunction& f,
                                            const GridFunction& g) {
  auto M = m_lambda_apply(phi, psi, lambda, f, g);
  const double lhs = lp_norm(M, 2.0);
  const double sup = sigma_sup_lattice(phi, psi, lambda, f.spec);
  const double rhs = std::sqrt(sup) * lp_norm(f, 2.0) * lp_norm(g, 2.0);
  nlohmann::json params{{"phase", phi.label},
                        {"d", phi.d},
                        {"lambda", lambda},
                        {"N", f.spec.N},
                        {"L", f.spec.L},
                        {"radius", psi.support_radius}};
  return make_report("oscillatory-l2", params, lhs, rhs, 1e-6);
}

namespace {

// Banded bilinear model of the fine-lattice operator: T[a,b] is the windowed
// oscillatory kernel's spectrum at coarse modes a, b in [-B, B]^d, so that
// M^(m) = (1/L)^d sum_{a+b=m} f^(a) g^(b) T[a,b] for band-limited f, g.
struct ModeTable {
  int d = 1, B = 0, nb = 0;
  std::size_t per_side = 0; // nb^d
  double wL = 0;            // (1/L)^d
  std::vector<Complex> T;   // flat over (a-multi, b-multi)

  Complex at(std::size_t aflat, std::size_t bflat) const {
    return T[aflat * per_side + bflat];
  }
};

std::vector<Complex> transform_axis(const std::vector<Complex>& in,
                                    std::vector<int>& dims, int axis,
                                    const CMat& P) {
  const int na = dims[axis];
  const int nb = static_cast<int>(P.rows());
  std::size_t pre = 1, post = 1;
  for (int i = 0; i < axis; ++i) pre *= dims[i];
  for (int i = axis + 1; i < static_cast<int>(dims.size()); ++i) post *= dims[i];
  std::vector<Complex> out(pre * nb * post);
  for (std::size_t p = 0; p < pre; ++p) {
    Eigen::Map<const CMatR> ib(in.data() + p * na * post, na, post);
    Eigen::Map<CMatR> ob(out.data() + p * nb * post, nb, post);
    ob.noalias() = P * ib;
  }
  dims[axis] = nb;
  return out;
}

ModeTable build_mode_table(const Phase& phi, const Amplitude& psi,
                           double lambda, const GridSpec& spec, int B) {
  const int d = spec.n;
  const double h = spec.h();
  const int J = static_cast<int>(std::floor(psi.support_radius / h));
  const int na = 2 * J + 1;
  std::vector<int> dims(2 * d, na);
  double total = 1;
  for (int i = 0; i < 2 * d; ++i) total *= na;
  if (total > 4e7) throw std::runtime_error("amplitude lattice too large");

  std::vector<double> prof(na);
  for (int j = 0; j < na; ++j) prof[j] = psi.axis_profile((j - J) * h);
  std::vector<Complex> W(static_cast<std::size_t>(total));
  {
    std::vector<int> idx(2 * d, 0);
    RVec u(d), v(d);
    std::size_t flat = 0;
    do {
      double w = 1;
      for (int i = 0; i < d; ++i) {
        u[i] = (idx[i] - J) * h;
        v[i] = (idx[d + i] - J) * h;
        w *= prof[idx[i]] * prof[idx[d + i]];
      }
      W[flat++] = w == 0.0
                      ? Complex(0, 0)
                      : w * std::polar(1.0, kTau * lambda * phi.eval(u, v));
    } while (advance(idx, dims));
  }

  const int nb = 2 * B + 1;
  CMat P(nb, na);
  for (int m = 0; m < nb; ++m)
    for (int j = 0; j < na; ++j)
      P(m, j) = std::polar(1.0, -kTau * ((j - J) * h) * ((m - B) / spec.L));
  for (int ax = 0; ax < 2 * d; ++ax) W = transform_axis(W, dims, ax, P);

  ModeTable t;
  t.d = d;
  t.B = B;
  t.nb = nb;
  t.per_side = 1;
  for (int i = 0; i < d; ++i) t.per_side *= nb;
  t.wL = std::pow(1.0 / spec.L, d);
  const double w0 = std::pow(h, 2 * d);
  for (auto& c : W) c *= w0;
  t.T = std::move(W);
  return t;
}

// coefficients over [-B, B]^d, flat row-major
std::size_t mode_flat(const ModeTable& t, const std::vector<int>& m) {
  std::size_t f = 0;
  for (int i = 0; i < t.d; ++i)
    f = f * t.nb + static_cast<std::size_t>(m[i] + t.B);
  return f;
}

// y[m] = (1/L)^d sum_{a+b=m} f[a] g[b] T[a,b] over m in [-2B, 2B]^d
std::vector<Complex> apply_banded(const ModeTable& t,
                                  const std::vector<Complex>& fc,
                                  const std::vector<Complex>& gc) {
  const int mb = 4 * t.B + 1;
  std::size_t mtot = 1;
  for (int i = 0; i < t.d; ++i) mtot *= mb;
  std::vector<Complex> y(mtot, Complex(0, 0));
  std::vector<int> mm(t.d, -2 * t.B), mdims(t.d, mb), mi(t.d, 0);
  std::size_t yi = 0;
  do {
    for (int i = 0; i < t.d; ++i) mm[i] = mi[i] - 2 * t.B;
    Complex acc(0, 0);
    std::vector<int> ai(t.d, 0), adims(t.d, t.nb), aa(t.d), bb(t.d);
    do {
      bool ok = true;
      for (int i = 0; i < t.d; ++i) {
        aa[i] = ai[i] - t.B;
        bb[i] = mm[i] - aa[i];
        if (bb[i] < -t.B || bb[i] > t.B) {
          ok = false;
          break;
        }
      }
      if (ok) {
        const std::size_t af = mode_flat(t, aa), bf = mode_flat(t, bb);
        acc += fc[af] * gc[bf] * t.at(af, bf);
      }
    } while (advance(ai, adims));
    y[yi++] = t.wL * acc;
  } while (advance(mi, mdims));
  return y;
}

// first_slot: f'[a] = (1/L)^d sum_m conj(g[m-a] T[a, m-a]) y[m]
// otherwise:  g'[b] = (1/L)^d sum_m conj(f[m-b] T[m-b, b]) y[m]
std::vector<Complex> apply_banded_adjoint(const ModeTable& t,
                                          const std::vector<Complex>& other,
                                          const std::vector<Complex>& y,
                                          bool first_slot) {
  const int mb = 4 * t.B + 1;
  std::vector<Complex> out(t.per_side, Complex(0, 0));
  std::vector<int> ai(t.d, 0), adims(t.d, t.nb), aa(t.d), bb(t.d), mi(t.d, 0),
      mdims(t.d, mb);
  std::size_t self = 0;
  do {
    for (int i = 0; i < t.d; ++i) aa[i] = ai[i] - t.B;
    Complex acc(0, 0);
    std::fill(mi.begin(), mi.end(), 0);
    std::size_t yi = 0;
    do {
      bool ok = true;
      for (int i = 0; i < t.d; ++i) {
        bb[i] = (mi[i] - 2 * t.B) - aa[i];
        if (bb[i] < -t.B || bb[i] > t.B) {
          ok = false;
          break;
        }
      }
      if (ok) {
        const std::size_t of = mode_flat(t, bb);
        const Complex tv = first_slot ? t.at(self, of) : t.at(of, self);
        acc += std::conj(other[of] * tv) * y[yi];
      }
      ++yi;
    } while (advance(mi, mdims));
    out[self++] = t.wL * acc;
  } while (advance(ai, adims));
  return out;
}

double coeff_norm(const std::vector<Complex>& c) {
  double s = 0;
  for (const auto& z : c) s += std::norm(z);
  return std::sqrt(s);
}

double pair_ratio(const ModeTable& t, const std::vector<Complex>& fc,
                  const std::vector<Complex>& gc) {
  const double nf = coeff_norm(fc) * std::sqrt(t.wL);
  const double ng = coeff_norm(gc) * std::sqrt(t.wL);
  if (nf == 0 || ng == 0) return 0;
  auto y = apply_banded(t, fc, gc);
  return coeff_norm(y) * std::sqrt(t.wL) / (nf * ng);
}

void normalize(std::vector<Complex>& c) {
  const double n = coeff_norm(c);
  if (n > 0)
    for (auto& z : c) z /= n;
}

} // namespace

nlohmann::json LambdaScan::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points)
    pts.push_back({{"lambda", p.lambda}, {"lower", p.lower}, {"upper", p.upper}});
  return {{"points", pts},
          {"lower_fit", lower_fit.to_json()},
          {"upper_fit", upper_fit.to_json()},
          {"degenerate", degenerate}};
}

LambdaScan lambda_decay_scan(const Phase& phi, const Amplitude& psi, int d,
                             const std::vector<double>& lambdas, int seeds) {
  if (phi.d != d || psi.d != d)
    throw std::invalid_argument("phase/amplitude dimension mismatch");
  if (d < 1 || d > 2) throw std::invalid_argument("scan supports d in {1,2}");
  if (lambdas.size() < 3)
    throw std::invalid_argument("need at least 3 lambda values");
  if (seeds < 1) throw std::invalid_argument("need at least one seed");

  LambdaScan scan;
  {
    // Hessian nondegeneracy, sampled over the amplitude box
    const double r = psi.support_radius;
    const int cnt = 5;
    std::vector<int> idx(2 * d, 0), dims(2 * d, cnt);
    RVec u(d), v(d);
    double min_det = std::numeric_limits<double>::infinity();
    do {
      for (int i = 0; i < d; ++i) u[i] = -r + 2.0 * r * idx[i] / (cnt - 1);
      for (int i = 0; i < d; ++i) v[i] = -r + 2.0 * r * idx[d + i] / (cnt - 1);
      min_det = std::min(min_det, std::abs(phi.hess(u, v).determinant()));
    } while (advance(idx, dims));
    scan.degenerate = min_det < 1e-9;
  }

  const double r = psi.support_radius;
  const double L = 4.0 * r;
  const double G = phase_gradient_bound(phi, psi);

  std::vector<double> lowers, uppers;
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double lambda = lambdas[li];
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    const int B = std::max(8, static_cast<int>(std::ceil(1.3 * lambda * r * L)) + 8);
    const int floorN = d == 1 ? 256 : 64;
    int N = next_pow2(std::max(
        {floorN, static_cast<int>(std::ceil(2.0 * L * lambda * G * 1.43)),
         static_cast<int>(std::ceil(4.5 * B))}));
    const int capN = d == 1 ? 32768 : 128;
    if (N > capN)
      throw std::runtime_error("lambda too large for the scan resolution cap");
    const GridSpec spec{d, N, L};

    const double sup = sigma_sup_lattice(phi, psi, lambda, spec);
    const double upper = std::sqrt(std::max(sup, 0.0));

    const ModeTable table = build_mode_table(phi, psi, lambda, spec, B);
    const double env_w = std::max(2.0, 0.7 * lambda * r);
    auto env = [&](const std::vector<int>& m) {
      double s2 = 0;
      for (int i = 0; i < d; ++i) {
        const double x = (m[i]) / L;
        s2 += x * x;
      }
      return std::exp(-s2 / (env_w * env_w));
    };

    double best = 0;
    std::vector<Complex> bf, bg;
    const std::uint64_t seed0 = 0x6f5c2d1e00000000ull + 977 * li;
    for (int s = 0; s <= seeds; ++s) {
      std::vector<Complex> fc(table.per_side), gc(table.per_side);
      std::vector<int> mi(d, 0), dims(d, table.nb), mm(d);
      std::size_t flat = 0;
      do {
        for (int i = 0; i < d; ++i) mm[i] = mi[i] - table.B;
        double xi2 = 0;
        for (int i = 0; i < d; ++i) xi2 += (mm[i] / L) * (mm[i] / L);
        const double e = env(mm);
        if (s == seeds) {
          // chirp ansatz, the stationary-phase near-extremizer family
          const Complex c = std::polar(e, -std::numbers::pi * xi2 / lambda);
          fc[flat] = c;
          gc[flat] = c;
        } else {
          fc[flat] = e * gaussian_pair(seed0 + 2 * s, flat);
          gc[flat] = e * gaussian_pair(seed0 + 2 * s + 1, flat);
        }
        ++flat;
      } while (advance(mi, dims));
      const double rr = pair_ratio(table, fc, gc);
      if (rr > best) {
        best = rr;
        bf = fc;
        bg = gc;
      }
    }
    // alternating power-iteration refinement from the best candidate
    normalize(bf);
    normalize(bg);
    for (int round = 0; round < 20; ++round) {
      auto y = apply_banded(table, bf, bg);
      if (round % 2 == 0) {
        bf = apply_banded_adjoint(table, bg, y, true);
        normalize(bf);
      } else {
        bg = apply_banded_adjoint(table, bf, y, false);
        normalize(bg);
      }
      best = std::max(best, pair_ratio(table, bf, bg));
    }

    scan.points.push_back({lambda, best, upper});
    lowers.push_back(best);
    uppers.push_back(upper);
  }

  scan.lower_fit = fit_powerlaw(lambdas, lowers);
  scan.upper_fit = fit_powerlaw(lambdas, uppers);
  return scan;
}

} // namespace rconv
