#include "rconv/grid.hpp"
#include "rconv/fft.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace rconv {

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int i = 0; i < n; ++i) s *= static_cast<std::size_t>(N);
  return s;
}

void validate_spec(const GridSpec& spec) {
  if (spec.n < 1 || spec.n > 6)
    throw std::invalid_argument("grid dimension must be in [1,6]");
  if (spec.N < 2 || !std::has_single_bit(static_cast<unsigned>(spec.N)))
    throw std::invalid_argument("grid resolution must be a power of two >= 2");
  if (!(spec.L > 0) || !std::isfinite(spec.L))
    throw std::invalid_argument("grid period must be positive and finite");
  // memory guard: refuse lattices that cannot be materialized
  if (spec.size() > (std::size_t{1} << 26))
    throw std::invalid_argument("lattice budget exceeded: N^n > 2^26");
}

std::size_t GridSpec::flatten(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < n; ++a) flat = flat * N + static_cast<std::size_t>(idx[a]);
  return flat;
}

std::vector<int> GridSpec::unflatten(std::size_t flat) const {
  std::vector<int> idx(n);
  for (int a = n - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % N);
    flat /= N;
  }
  return idx;
}

RVec GridSpec::point(std::size_t flat, Side side) const {
  const double step = side == Side::spatial ? h() : dxi();
  RVec x(n);
  auto idx = unflatten(flat);
  for (int a = 0; a < n; ++a) x[a] = signed_index(idx[a]) * step;
  return x;
}

GridFunction GridFunction::zero(const GridSpec& s) {
  return GridFunction(s, CVec::Zero(static_cast<Eigen::Index>(s.size())));
}

Spectrum Spectrum::zero(const GridSpec& s) {
  return Spectrum(s, CVec::Zero(static_cast<Eigen::Index>(s.size())));
}

void for_each_index(const GridSpec& spec,
                    const std::function<void(std::size_t, const std::vector<int>&)>& fn) {
  const std::size_t total = spec.size();
  std::vector<int> idx(spec.n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(flat, idx);
    for (int a = spec.n - 1; a >= 0; --a) {
      if (++idx[a] < spec.N) break;
      idx[a] = 0;
    }
  }
}

GridFunction discretize(const AnalyticField& f, const GridSpec& spec) {
  validate_spec(spec);
  if (!f.eval) throw std::invalid_argument("analytic field has no evaluator");
  GridFunction g = GridFunction::zero(spec);
  const std::size_t total = spec.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    const Complex v = f.eval(spec.point(flat, f.side));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::runtime_error("non-finite sample while discretizing field");
    g.values[static_cast<Eigen::Index>(flat)] = v;
  }
  return g;
}

Spectrum dft(const GridFunction& f) {
  validate_spec(f.spec);
  CVec data = f.values;
  fft_forward(data, f.spec);
  data *= std::pow(f.spec.h(), f.spec.n);
  return Spectrum(f.spec, std::move(data));
}

GridFunction idft(const Spectrum& c) {
  validate_spec(c.spec);
  CVec data = c.coeffs;
  fft_inverse(data, c.spec);
  // fft_inverse divides by N^n; the unitary convention wants (1/L)^n before an
  // unnormalized inverse sum, i.e. an overall factor (N/L)^n = h^{-n}.
  data *= std::pow(1.0 / c.spec.h(), c.spec.n);
  return GridFunction(c.spec, std::move(data));
}

GridFunction tensor_product(const std::vector<GridFunction>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor product of nothing");
  const GridSpec base = factors.front().spec;
  for (const auto& f : factors)
    if (!(f.spec == base))
      throw std::invalid_argument("tensor factors must share one grid spec");
  GridSpec out = base;
  out.n = base.n * static_cast<int>(factors.size());
  validate_spec(out);
  GridFunction g = GridFunction::zero(out);
  const std::size_t block = base.size();
  // row-major: index of factor 0 varies slowest
  std::vector<std::size_t> sub(factors.size(), 0);
  const std::size_t total = out.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    Complex v = 1.0;
    std::size_t rest = flat;
    for (std::size_t k = factors.size(); k-- > 0;) {
      sub[k] = rest % block;
      rest /= block;
    }
    for (std::size_t k = 0; k < factors.size(); ++k)
      v *= factors[k].values[static_cast<Eigen::Index>(sub[k])];
    g.values[static_cast<Eigen::Index>(flat)] = v;
  }
  return g;
}

namespace {

double weighted_lp(const CVec& data, double p, double cell) {
  if (p == infinity()) {
    double m = 0;
    for (Eigen::Index i = 0; i < data.size(); ++i)
      m = std::max(m, std::abs(data[i]));
    return m;
  }
  if (!(p >= 1)) throw std::invalid_argument("lp exponent must be >= 1");
  std::vector<double> terms(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i)
    terms[static_cast<std::size_t>(i)] = cell * std::pow(std::abs(data[i]), p);
  return std::pow(tree_sum(terms), 1.0 / p);
}

} // namespace

double lp_norm(const GridFunction& f, double p) {
  return weighted_lp(f.values, p, std::pow(f.spec.h(), f.spec.n));
}

double lp_norm(const Spectrum& c, double p) {
  return weighted_lp(c.coeffs, p, std::pow(1.0 / c.spec.L, c.spec.n));
}

double sobolev_norm(const Spectrum& c, double s) {
  const double cell = std::pow(1.0 / c.spec.L, c.spec.n);
  std::vector<double> terms(c.spec.size());
  for (std::size_t flat = 0; flat < c.spec.size(); ++flat) {
    const RVec xi = c.spec.point(flat, Side::frequency);
    const double w = std::pow(1.0 + xi.squaredNorm(), s);
    terms[flat] = cell * w * std::norm(c.coeffs[static_cast<Eigen::Index>(flat)]);
  }
  return std::sqrt(tree_sum(terms));
}

double sobolev_norm(const GridFunction& f, double s) {
  return sobolev_norm(dft(f), s);
}

double tree_sum(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  std::vector<double> layer = xs;
  while (layer.size() > 1) {
    std::size_t half = (layer.size() + 1) / 2;
    for (std::size_t i = 0; i + half < layer.size(); ++i) layer[i] += layer[i + half];
    layer.resize(half);
  }
  return layer[0];
}

Complex tree_sum(const std::vector<Complex>& xs) {
  if (xs.empty()) return Complex(0, 0);
  std::vector<Complex> layer = xs;
  while (layer.size() > 1) {
    std::size_t half = (layer.size() + 1) / 2;
    for (std::size_t i = 0; i + half < layer.size(); ++i) layer[i] += layer[i + half];
    layer.resize(half);
  }
  return layer[0];
}

// ---------------------------------------------------------------------------
// Binary grid files

namespace {
constexpr char kMagic[16] = {'R', 'C', 'O', 'N', 'V', 'G', 'R', 'I',
                             'D', '\0', 'v', '1', '\0', '\0', '\0', '\0'};
}

void save_grid(const std::string& path, const GridSpec& spec, const CVec& data,
               Side side) {
  validate_spec(spec);
  if (static_cast<std::size_t>(data.size()) != spec.size())
    throw std::invalid_argument("grid data size mismatch");
  nlohmann::json header = {
      {"n", spec.n},
      {"N", spec.N},
      {"L", spec.L},
      {"side", side == Side::spatial ? "spatial" : "frequency"},
      {"dtype", "complex128-le"},
  };
  const std::string hs = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t len = hs.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double re = data[i].real(), im = data[i].imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

LoadedGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[16];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("bad grid-file magic in " + path);
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len > (1u << 20)) throw std::runtime_error("bad header length in " + path);
  std::string hs(len, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(len));
  nlohmann::json header = nlohmann::json::parse(hs);
  if (header.at("dtype").get<std::string>() != "complex128-le")
    throw std::runtime_error("unsupported dtype in " + path);
  LoadedGrid g;
  g.spec.n = header.at("n").get<int>();
  g.spec.N = header.at("N").get<int>();
  g.spec.L = header.at("L").get<double>();
  validate_spec(g.spec);
  const std::string side = header.at("side").get<std::string>();
  if (side == "spatial") g.side = Side::spatial;
  else if (side == "frequency") g.side = Side::frequency;
  else throw std::runtime_error("unknown side in " + path);
  g.data.resize(static_cast<Eigen::Index>(g.spec.size()));
  for (Eigen::Index i = 0; i < g.data.size(); ++i) {
    double re = 0, im = 0;
    in.read(reinterpret_cast<char*>(&re), sizeof(re));
    in.read(reinterpret_cast<char*>(&im), sizeof(im));
    g.data[i] = Complex(re, im);
  }
  if (!in) throw std::runtime_error("truncated grid file " + path);
  return g;
}

} // namespace rconv
