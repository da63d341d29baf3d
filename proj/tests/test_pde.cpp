#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rconv/pde_checks.hpp"
#include "rconv/random_fields.hpp"

using namespace rconv;
using std::numbers::pi;

namespace {

// Spectrum supported on the fiber over xi' = 0 (first axis) with the
// Cauchy-Schwarz equality profile (1 + |xi''|^2)^{-s} of the trace bound.
GridFunction fiber_extremal(const GridSpec& spec, double s) {
  Spectrum c = Spectrum::zero(spec);
  for (int j = 0; j < spec.N; ++j) {
    const double xi = spec.signed_index(j) * spec.dxi();
    std::vector<int> idx{0, j};
    c.coeffs[static_cast<Eigen::Index>(spec.flatten(idx))] =
        std::pow(1.0 + xi * xi, -s);
  }
  return idft(c);
}

GridFunction translate(const GridFunction& f, const std::vector<int>& shift) {
  GridFunction g = GridFunction::zero(f.spec);
  for (std::size_t flat = 0; flat < f.spec.size(); ++flat) {
    std::vector<int> idx = f.spec.unflatten(flat);
    for (std::size_t a = 0; a < idx.size(); ++a)
      idx[a] = f.spec.storage_index(idx[a] + shift[a]);
    g.values[static_cast<Eigen::Index>(f.spec.flatten(idx))] =
        f.values[static_cast<Eigen::Index>(flat)];
  }
  return g;
}

GridFunction gaussian3(const GridSpec& spec, double a, const RVec& center) {
  AnalyticField f;
  f.side = Side::spatial;
  f.eval = [a, center](const RVec& x) {
    return Complex(std::exp(-a * (x - center).squaredNorm()), 0);
  };
  return discretize(f, spec);
}

} // namespace

TEST_CASE("trace constant hits the closed-form spot values") {
  CHECK(trace_constant(1.0, 2, 1) == doctest::Approx(std::sqrt(pi)).epsilon(1e-8));
  CHECK(trace_constant(2.0, 4, 2) == doctest::Approx(std::sqrt(pi)).epsilon(1e-8));
  // s = 3/2, codim 1: 2 * int (1+r^2)^{-3/2} = 2.
  CHECK(trace_constant(1.5, 3, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("trace constant is monotone decreasing in s and diverges at the endpoint") {
  double prev = std::numeric_limits<double>::infinity();
  for (double s : {0.6, 0.75, 1.0, 1.5, 2.0, 3.0}) {
    const double c = trace_constant(s, 2, 1);
    CHECK(c < prev);
    prev = c;
  }
  CHECK_THROWS_AS(trace_constant(0.5, 2, 1), std::runtime_error);
  CHECK_THROWS_AS(trace_constant(1.0, 4, 2), std::runtime_error);
  CHECK_THROWS_AS(trace_constant(1.0, 2, 2), std::invalid_argument);
}

TEST_CASE("closed form and lattice fiber sum realize the same constant") {
  for (auto [s, m, L] : {std::tuple{1.0, 1, 8.0},
                         std::tuple{1.5, 1, 4.0},
                         std::tuple{0.8, 1, 8.0},
                         std::tuple{2.0, 2, 8.0},
                         std::tuple{1.6, 2, 4.0}}) {
    const double c2 = trace_constant(s, m + 1, 1) * trace_constant(s, m + 1, 1);
    // trace_constant(s, m+1, 1) has codim m only when k = 1, n = m+1.
    const double sup = trace_multiplier_sup(s, m, L);
    CHECK(std::abs(sup / c2 - 1.0) < 1e-6);
  }
}

TEST_CASE("trace inequality holds for random band-limited fields") {
  const GridSpec spec{2, 64, 8.0};
  const Subspace H = make_coordinate_subspace(1, 2);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GridFunction u = random_band_field(spec, 7000 + seed, 20);
    const auto rep = verify_trace(u, H, 1.0);
    CHECK(rep.pass);
    CHECK(rep.ratio <= 1.0 + 1e-6);
    CHECK(rep.params.at("multiplier_rel_gap").get<double>() < 1e-6);
  }
}

TEST_CASE("fiber-concentrated profile nearly saturates the trace constant") {
  const GridSpec spec{2, 1024, 4.0};
  const GridFunction u = fiber_extremal(spec, 1.0);
  const auto rep = verify_trace(u, make_coordinate_subspace(1, 2), 1.0);
  CHECK(rep.pass);
  CHECK(rep.ratio > 0.99);
}

TEST_CASE("endpoint s = codim/2 ratio grows with the band") {
  // At s = 1/2 (codim 1) the constant diverges; the raw quotient
  // ||u|_H||_2 / ||u||_{H^{1/2}} for the fiber profile grows ~ sqrt(log N).
  const Subspace H = make_coordinate_subspace(1, 2);
  double prev = 0;
  for (int N : {128, 512, 2048}) {
    const GridSpec spec{2, N, 4.0};
    const GridFunction u = fiber_extremal(spec, 0.5);
    const double q = lp_norm(restrict_to(u, H), 2) / sobolev_norm(u, 0.5);
    CHECK(q > 1.05 * prev);
    prev = q;
  }
  CHECK_THROWS_AS(
      verify_trace(GridFunction::zero(GridSpec{2, 16, 4.0}),
                   make_coordinate_subspace(1, 2), 0.5),
      std::runtime_error);
}

TEST_CASE("heat restriction inequality passes and records the sharp constant") {
  const GridSpec spec{2, 64, 8.0};
  const Subspace H = make_coordinate_subspace(1, 2);
  const double t = 0.25;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GridFunction F = random_band_field(spec, 8100 + seed, 20);
    const auto rep = verify_heat_restriction(F, H, t);
    CHECK(rep.pass);
    CHECK(rep.ratio <= 1.0 + 1e-6);
    const double measured = rep.params.at("measured_constant").get<double>();
    const double sharp = rep.params.at("sharp_constant").get<double>();
    CHECK(measured == doctest::Approx(std::pow(8 * pi * t, -0.25)).epsilon(1e-10));
    CHECK(measured == doctest::Approx(sharp).epsilon(1e-10));
    CHECK(rep.params.at("power_iteration").get<double>() ==
          doctest::Approx(measured).epsilon(1e-4));
    // The (4 pi t)^{-1/4} constant is valid but strictly above the measured one.
    CHECK(rep.params.at("claimed_constant").get<double>() > measured);
  }
}

TEST_CASE("heat restriction contracts after the critical time") {
  const GridSpec spec{2, 64, 8.0};
  const Subspace H = make_coordinate_subspace(1, 2);
  for (double t : {1.0 / (4 * pi), 0.5}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const GridFunction F = random_band_field(spec, 8200 + seed, 20);
      const double lhs = lp_norm(conv_restrict(F, heat_kernel(t, 2), H), 2);
      CHECK(lhs <= lp_norm(F, 2) * (1 + 1e-12));
    }
  }
}

TEST_CASE("heat restriction ratio is invariant under lattice translations along H") {
  const GridSpec spec{2, 64, 8.0};
  const Subspace H = make_coordinate_subspace(1, 2);
  const GridFunction F = random_band_field(spec, 8300, 20);
  const auto base = verify_heat_restriction(F, H, 0.25);
  for (int shift : {3, 17, 31}) {
    const auto moved = verify_heat_restriction(translate(F, {shift, 0}), H, 0.25);
    CHECK(moved.ratio == doctest::Approx(base.ratio).epsilon(1e-10));
  }
}

TEST_CASE("3-d wave propagator: small-time limit and spectral zero mode") {
  const GridSpec spec{3, 32, 8.0};
  const GridFunction f = gaussian3(spec, 2.0, RVec::Zero(3));
  const double t = 1e-3;
  const GridFunction u = wave_propagate_3d(f, t);
  double worst = 0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i)
    worst = std::max(worst, std::abs(u.values[i] / t - f.values[i]));
  CHECK(worst < 1e-4 * f.values.cwiseAbs().maxCoeff());
  // zero mode: u^(0) = t f^(0), i.e. the means satisfy mean(u) = t mean(f)
  CHECK(std::abs(dft(u).coeffs[0] - t * dft(f).coeffs[0]) < 1e-12);
  CHECK_THROWS_AS(wave_propagate_3d(GridFunction::zero(GridSpec{2, 16, 4.0}), 1.0),
                  std::invalid_argument);
}

TEST_CASE("3-d wave propagator matches the spherical-mean quadrature") {
  const GridSpec spec{3, 64, 12.0};
  const double a = 2.0, t = 1.0;
  const GridFunction f = gaussian3(spec, a, RVec::Zero(3));
  const GridFunction u = wave_propagate_3d(f, t);
  const QuadratureMeasure mu = sphere_quadrature(3, 1.0, 32); // 2048 nodes
  const double ref = lp_norm(u, infinity());
  for (std::size_t flat : {spec.flatten({0, 0, 0}), spec.flatten({1, 2, 3}),
                           spec.flatten({60, 5, 62}), spec.flatten({10, 54, 2})}) {
    const RVec x = spec.point(flat, Side::spatial);
    double mean = 0;
    for (Eigen::Index q = 0; q < mu.weights.size(); ++q)
      mean += mu.weights[q] *
              std::exp(-a * (x - t * mu.points.row(q).transpose()).squaredNorm());
    const double oracle = t / (4 * pi) * mean;
    CHECK(std::abs(u.values[static_cast<Eigen::Index>(flat)].real() - oracle) <
          1e-5 * ref);
    CHECK(std::abs(u.values[static_cast<Eigen::Index>(flat)].imag()) < 1e-12);
  }
}

TEST_CASE("3-d wave energy bound with a time-independent constant") {
  const GridSpec spec{3, 32, 8.0};
  const GridFunction f = gaussian3(spec, 1.0, RVec::Zero(3));
  const double l2 = lp_norm(f, 2);
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const GridFunction u = wave_propagate_3d(f, t);
    CHECK(sobolev_norm(u, 1.0) <= 2.5 * l2);
  }
}

TEST_CASE("wave restriction threshold dichotomy in codimension 1") {
  const auto rep = wave_restriction_threshold(3, 2, 1.0, {0.25, 0.45, 0.75});
  CHECK(rep.threshold == doctest::Approx(0.5));
  REQUIRE(rep.points.size() == 3);
  CHECK(rep.points[0].classification == "stable");
  CHECK(std::abs(rep.points[0].growth) < 0.02);
  CHECK(rep.points[1].classification == "indeterminate"); // |s - 1/2| < 0.1
  CHECK(rep.points[2].classification == "divergent");
  CHECK(rep.points[2].growth > 0.25);
  const auto j = rep.to_json();
  CHECK(j.at("points").size() == 3);
}

TEST_CASE("wave restriction threshold: degenerate k = n is stable below s = 1") {
  const auto rep = wave_restriction_threshold(3, 3, 1.0, {0.25, 0.5, 0.85});
  CHECK(rep.threshold == doctest::Approx(1.0));
  for (const auto& q : rep.points) CHECK(q.classification == "stable");
}

TEST_CASE("wave restriction threshold in codimension 2") {
  const auto rep = wave_restriction_threshold(3, 1, 1.0, {-0.6, 0.5});
  CHECK(rep.threshold == doctest::Approx(0.0));
  CHECK(rep.points[0].classification == "stable");
  CHECK(rep.points[1].classification == "divergent");
}

TEST_CASE("admissible exponent triangle for wave products") {
  CHECK(wave_product_region(0.5, 0.5));
  CHECK(wave_product_region(0.5, 1.0 / 3));
  CHECK(wave_product_region(0.6, 0.4));
  CHECK(wave_product_region(0.55, 0.42));        // interior
  CHECK(wave_product_region(0.5, 0.4));          // on the vertical edge
  CHECK_FALSE(wave_product_region(0.4, 0.4));
  CHECK_FALSE(wave_product_region(0.65, 0.45));
  CHECK_FALSE(wave_product_region(0.5, 0.3));
}

TEST_CASE("wave product bounds are refinement stable") {
  const GridSpec spec{3, 32, 8.0};
  const GridFunction f = gaussian3(spec, 1.0, RVec::Zero(3));
  RVec c(3);
  c << 0.5, -0.25, 0.5;
  const GridFunction g = gaussian3(spec, 1.0, c);
  for (double p : {2.0, 1.8}) {
    const auto rep = verify_wave_product(f, g, 1.0, p);
    CHECK(rep.pass);
    CHECK(rep.params.at("improving_branch").get<bool>());
    CHECK(rep.params.at("c_product_sobolev").get<double>() > 0);
    CHECK(rep.params.at("c_improving").get<double>() > 0);
  }
  const auto outside = verify_wave_product(f, g, 1.0, 1.2);
  CHECK(outside.pass);
  CHECK_FALSE(outside.params.at("improving_branch").get<bool>());
}
