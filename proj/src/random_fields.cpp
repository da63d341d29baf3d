#include "rconv/random_fields.hpp"

#include <cmath>
#include <numbers>

namespace rconv {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t z = splitmix64(splitmix64(seed) ^ counter * 0x9e3779b97f4a7c15ULL);
  return (z >> 11) * 0x1.0p-53;
}

Complex gaussian_pair(std::uint64_t seed, std::uint64_t counter) {
  // Box-Muller from two counter-derived uniforms
  const double u1 = uniform01(seed, 2 * counter);
  const double u2 = uniform01(seed, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1 + 1e-300));
  const double th = 2.0 * std::numbers::pi * u2;
  return Complex(r * std::cos(th), r * std::sin(th));
}

int band_cap_modes(const GridSpec& spec, int m) {
  return std::max(1, spec.N / (2 * m) - 1);
}

Spectrum random_band_spectrum(const GridSpec& spec, std::uint64_t seed, int band) {
  validate_spec(spec);
  if (band < 1 || band > spec.N / 2 - 1)
    throw std::invalid_argument("band must be in [1, N/2 - 1]");
  Spectrum S = Spectrum::zero(spec);
  for_each_index(spec, [&](std::size_t flat, const std::vector<int>& idx) {
    double xi2 = 0;
    for (int a = 0; a < spec.n; ++a) {
      const int ma = spec.signed_index(idx[a]);
      if (std::abs(ma) > band) return;
      const double xia = ma / spec.L;
      xi2 += xia * xia;
    }
    S.coeffs[static_cast<Eigen::Index>(flat)] =
        std::exp(-0.5 * xi2) * gaussian_pair(seed, flat);
  });
  return S;
}

GridFunction random_band_field(const GridSpec& spec, std::uint64_t seed, int band) {
  return idft(random_band_spectrum(spec, seed, band));
}

} // namespace rconv
