// Command-line surface: mixed-norm evaluation, restricted convolution,
// inequality verification suites, parameter scans, and kernel emission.
// Exit codes: 0 all checks pass, 1 an inequality check failed, 2 usage or
// precondition error, 3 resolution-guard abort.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "rconv/cli_report.hpp"
#include "rconv/conv_ops.hpp"
#include "rconv/oscillatory.hpp"
#include "rconv/pde_checks.hpp"
#include "rconv/random_fields.hpp"
#include "rconv/scale_ops.hpp"

using namespace rconv;

namespace {

double parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity") return infinity();
  return std::stod(text);
}

Spectrum spectrum_from_source(const std::string& file, const std::string& kernel,
                              const std::string& kernel_params,
                              const GridSpec& spec) {
  if (!file.empty()) {
    const LoadedGrid g = load_grid(file);
    if (g.side == Side::frequency) return Spectrum{g.spec, g.data};
    return dft(GridFunction{g.spec, g.data});
  }
  if (kernel.empty())
    throw std::invalid_argument("need either --file or --kernel");
  const nlohmann::json params =
      kernel_params.empty() ? nlohmann::json::object()
                            : nlohmann::json::parse(kernel_params);
  return sample_spectrum(make_kernel(kernel, params), spec);
}

struct Emitter {
  std::string out_path; // empty: stdout
  std::string csv_path;

  int finish(std::vector<VerificationReport>& reports, const RunConfig& cfg,
             const Subspace* H = nullptr) const {
    annotate_reports(reports, cfg, H);
    if (out_path.empty()) {
      for (const auto& r : reports) std::cout << r.to_json().dump() << "\n";
    } else {
      write_jsonl(out_path, reports);
    }
    if (!csv_path.empty()) write_csv(csv_path, reports);
    return reports_exit_code(reports);
  }
};

// Admissible (p, q, r) Young triples with 1/p + 1/q + 1/r = 1, all >= 2.
const std::vector<std::array<double, 3>>& young_triples() {
  static const std::vector<std::array<double, 3>> table{
      {2.0, infinity(), 2.0},
      {4.0, 4.0, 2.0},
      {3.0, 3.0, 3.0},
      {2.0, 4.0, 4.0},
      {infinity(), 2.0, 2.0}};
  return table;
}

VerificationReport wave_point_report(const WaveThresholdReport& rep,
                                     const WaveThresholdPoint& q) {
  VerificationReport r;
  r.inequality_id = "wave-threshold";
  r.lhs = q.fine;
  r.rhs = q.coarse;
  r.ratio = q.coarse > 0 ? q.fine / q.coarse : 0;
  r.tol = 0.02;
  const std::string expected = std::abs(q.s - rep.threshold) < 0.1 ? "indeterminate"
                               : q.s < rep.threshold               ? "stable"
                                                                   : "divergent";
  r.pass = q.classification == expected;
  r.params = {{"s", q.s},
              {"t", rep.t},
              {"n", rep.n},
              {"k", rep.k},
              {"threshold", rep.threshold},
              {"growth", q.growth},
              {"classification", q.classification},
              {"expected", expected}};
  return r;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"restricted-convolution inequality toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, csv_path;
  std::string flag_n, flag_N, flag_L, flag_seed, flag_threads;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "JSON-lines report path (default stdout)");
  app.add_option("--csv", csv_path, "also write a CSV report");
  app.add_option("--n", flag_n, "ambient dimension");
  app.add_option("--N", flag_N, "lattice points per axis");
  app.add_option("--L", flag_L, "lattice period");
  app.add_option("--seed", flag_seed, "base RNG seed");
  app.add_option("--threads", flag_threads, "worker threads");

  // norm ---------------------------------------------------------------
  auto* norm_cmd = app.add_subcommand("norm", "mixed Fourier norm of a function");
  std::string norm_file, norm_kernel, norm_kparams, norm_H = "coord:1";
  std::string norm_r = "2", norm_p = "inf";
  norm_cmd->add_option("--file", norm_file, "grid file");
  norm_cmd->add_option("--kernel", norm_kernel, "kernel name");
  norm_cmd->add_option("--kernel-params", norm_kparams, "kernel params (JSON)");
  norm_cmd->add_option("--H", norm_H, "subspace coord:K | diag:MxD");
  norm_cmd->add_option("--r", norm_r, "inner exponent (number or inf)");
  norm_cmd->add_option("--p", norm_p, "outer exponent (number or inf)");

  // conv ---------------------------------------------------------------
  auto* conv_cmd = app.add_subcommand("conv", "restricted convolution to file");
  std::string conv_file, conv_with, conv_kernel, conv_kparams, conv_H = "coord:1";
  std::string conv_out;
  conv_cmd->add_option("--file", conv_file, "grid file for F")->required();
  conv_cmd->add_option("--with", conv_with, "grid file for G");
  conv_cmd->add_option("--kernel", conv_kernel, "kernel name for G");
  conv_cmd->add_option("--kernel-params", conv_kparams, "kernel params (JSON)");
  conv_cmd->add_option("--H", conv_H, "subspace");
  conv_cmd->add_option("--out-grid", conv_out, "output grid path")->required();

  // verify -------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "named inequality suites");
  verify_cmd->require_subcommand(1);
  int v_seeds = 20, v_triples = 5, v_k = 1, v_d = 1;
  double v_s = 1.0, v_t = 1.0, v_p = 2.0, v_q = 2.0, v_r = 2.0;
  double v_lambda = 8.0, v_s2 = 1.0, v_radius = 1.0;
  std::string v_H = "coord:1", v_phase = "dot", v_slist = "0.25,0.75";
  auto* young = verify_cmd->add_subcommand("young", "restricted Young inequality");
  young->add_option("--H", v_H);
  young->add_option("--triples", v_triples, "number of (p,q,r) triples");
  young->add_option("--seeds", v_seeds);
  auto* restriction = verify_cmd->add_subcommand("restriction", "frequency-restriction bounds");
  restriction->add_option("--H", v_H);
  restriction->add_option("--p", v_p);
  restriction->add_option("--q", v_q);
  restriction->add_option("--r", v_r);
  restriction->add_option("--seeds", v_seeds);
  auto* trace = verify_cmd->add_subcommand("trace", "Sobolev trace inequality");
  trace->add_option("--s", v_s);
  trace->add_option("--k", v_k);
  trace->add_option("--seeds", v_seeds);
  auto* heat = verify_cmd->add_subcommand("heat", "heat-restriction inequality");
  heat->add_option("--t", v_t);
  heat->add_option("--k", v_k);
  heat->add_option("--seeds", v_seeds);
  auto* wave = verify_cmd->add_subcommand("wave", "wave-restriction threshold dichotomy");
  wave->add_option("--k", v_k, "subspace dimension (ambient n = 3)");
  wave->add_option("--t", v_t);
  wave->add_option("--s-list", v_slist, "comma-separated s values");
  auto* psob = verify_cmd->add_subcommand("product-sobolev", "product Sobolev comparability");
  psob->add_option("--r", v_r);
  psob->add_option("--s", v_s2);
  psob->add_option("--seeds", v_seeds);
  auto* osc = verify_cmd->add_subcommand("oscillatory", "bilinear oscillatory L2 bound");
  osc->add_option("--phase", v_phase);
  osc->add_option("--d", v_d);
  osc->add_option("--lambda", v_lambda);
  osc->add_option("--radius", v_radius, "amplitude support radius");
  osc->add_option("--seeds", v_seeds);
  auto* pone = verify_cmd->add_subcommand("problem-one", "competing bilinear bounds");
  pone->add_option("--r", v_r);
  pone->add_option("--seeds", v_seeds);

  // scan ---------------------------------------------------------------
  auto* scan_cmd = app.add_subcommand("scan", "parameter sweeps");
  scan_cmd->require_subcommand(1);
  int sc_m = 2, sc_d = 2, sc_jmax = 4, sc_seeds = 10, sc_scan_d = 1;
  double sc_l = 2.0, sc_gamma = 0.5;
  std::string sc_lambdas = "16..256", sc_phase = "dot", sc_plist = "2.5,3,4";
  auto* gfit = scan_cmd->add_subcommand("gamma-fit", "dyadic band decay of the sphere kernel on the diagonal");
  double sc_spacing = 0.5;
  gfit->add_option("--m", sc_m);
  gfit->add_option("--d", sc_d);
  gfit->add_option("--bands", sc_jmax, "highest dyadic band");
  gfit->add_option("--spacing", sc_spacing, "fiber quadrature step");
  auto* ldecay = scan_cmd->add_subcommand("lambda-decay", "oscillatory decay scan");
  ldecay->add_option("--phase", sc_phase);
  ldecay->add_option("--d", sc_scan_d);
  ldecay->add_option("--lambdas", sc_lambdas, "a..b (doubling) or comma list");
  ldecay->add_option("--seeds", sc_seeds);
  auto* lpimp = scan_cmd->add_subcommand("lp-improving", "Lp-improving ratio sweep");
  lpimp->add_option("--l", sc_l, "codimension parameter");
  lpimp->add_option("--gamma", sc_gamma);
  lpimp->add_option("--p-list", sc_plist);
  lpimp->add_option("--seeds", sc_seeds);
  auto* maximal = scan_cmd->add_subcommand("maximal", "maximal-operator refinement stability");
  maximal->add_option("--seeds", sc_seeds);

  // kernels ------------------------------------------------------------
  auto* kern_cmd = app.add_subcommand("kernels", "emit kernel spectra");
  std::string kern_name, kern_params, kern_out;
  kern_cmd->add_option("--name", kern_name, "kernel name (omit to list)");
  kern_cmd->add_option("--kernel-params", kern_params, "kernel params (JSON)");
  kern_cmd->add_option("--out-grid", kern_out, "write sampled spectrum here");

  // Let global flags (--N, --seed, ...) appear after the subcommand too.
  const std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
    for (CLI::App* sub : a->get_subcommands({})) {
      sub->fallthrough();
      enable_fallthrough(sub);
    }
  };
  enable_fallthrough(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!flag_n.empty()) override_config(cfg, "n", flag_n);
    if (!flag_N.empty()) override_config(cfg, "N", flag_N);
    if (!flag_L.empty()) override_config(cfg, "L", flag_L);
    if (!flag_seed.empty()) override_config(cfg, "seed", flag_seed);
    if (!flag_threads.empty()) override_config(cfg, "threads", flag_threads);
    const Emitter emit{out_path, csv_path};
    std::vector<VerificationReport> reports;

    if (*norm_cmd) {
      const GridSpec spec = config_spec(cfg);
      const Spectrum F = spectrum_from_source(norm_file, norm_kernel, norm_kparams, spec);
      const Subspace H = parse_subspace(norm_H, F.spec.n);
      const double r = parse_exponent(norm_r), p = parse_exponent(norm_p);
      const double v = lambda_norm(F, H, r, p);
      auto rep = make_report("norm",
                             {{"source", norm_file.empty() ? norm_kernel : norm_file},
                              {"r", norm_r},
                              {"p", norm_p}},
                             v, v, 0.0);
      reports.push_back(rep);
      return emit.finish(reports, cfg, &H);
    }

    if (*conv_cmd) {
      const LoadedGrid lf = load_grid(conv_file);
      const GridFunction F = lf.side == Side::spatial
                                 ? GridFunction{lf.spec, lf.data}
                                 : idft(Spectrum{lf.spec, lf.data});
      const Subspace H = parse_subspace(conv_H, F.spec.n);
      GridFunction out;
      if (!conv_with.empty()) {
        const LoadedGrid lg = load_grid(conv_with);
        const GridFunction G = lg.side == Side::spatial
                                   ? GridFunction{lg.spec, lg.data}
                                   : idft(Spectrum{lg.spec, lg.data});
        out = conv_restrict(F, G, H);
      } else {
        if (conv_kernel.empty())
          throw std::invalid_argument("conv: need --with or --kernel");
        const nlohmann::json kp = conv_kparams.empty()
                                      ? nlohmann::json::object()
                                      : nlohmann::json::parse(conv_kparams);
        out = conv_restrict(F, make_kernel(conv_kernel, kp), H);
      }
      save_grid(conv_out, out.spec, out.values, Side::spatial);
      reports.push_back(make_report("conv",
                                    {{"file", conv_file}, {"out", conv_out}},
                                    lp_norm(out, 2), lp_norm(out, 2), 0.0));
      return emit.finish(reports, cfg, &H);
    }

    if (*young) {
      const GridSpec spec = config_spec(cfg);
      const Subspace H = parse_subspace(v_H, spec.n);
      if (v_triples < 1 || v_triples > static_cast<int>(young_triples().size()))
        throw std::invalid_argument("--triples must be in 1..5");
      const int band = band_cap_modes(spec, 2);
      for (int ti = 0; ti < v_triples; ++ti) {
        const auto [p, q, r] = young_triples()[static_cast<std::size_t>(ti)];
        for (int s = 0; s < v_seeds; ++s) {
          const std::uint64_t base = cfg.seed + 10007ull * static_cast<std::uint64_t>(ti) +
                                     2ull * static_cast<std::uint64_t>(s);
          const GridFunction F = random_band_field(spec, base, band);
          const GridFunction G = random_band_field(spec, base + 1, band);
          reports.push_back(verify_young_restricted(F, G, H, p, q, r));
        }
      }
      return emit.finish(reports, cfg, &H);
    }

    if (*restriction) {
      const GridSpec spec = config_spec(cfg);
      const Subspace H = parse_subspace(v_H, spec.n);
      const int band = band_cap_modes(spec, 2);
      for (int s = 0; s < v_seeds; ++s) {
        const GridFunction F = random_band_field(spec, cfg.seed + 2ull * s, band);
        const GridFunction G = random_band_field(spec, cfg.seed + 2ull * s + 1, band);
        reports.push_back(verify_restriction_product(F, G, H, v_p, v_q, v_r));
        reports.push_back(verify_restriction_linear(F, H, v_p));
      }
      return emit.finish(reports, cfg, &H);
    }

    if (*trace) {
      const GridSpec spec = config_spec(cfg);
      const Subspace H = make_coordinate_subspace(v_k, spec.n);
      const int band = band_cap_modes(spec, 1);
      for (int s = 0; s < v_seeds; ++s)
        reports.push_back(verify_trace(
            random_band_field(spec, cfg.seed + static_cast<std::uint64_t>(s), band),
            H, v_s));
      return emit.finish(reports, cfg, &H);
    }

    if (*heat) {
      const GridSpec spec = config_spec(cfg);
      const Subspace H = make_coordinate_subspace(v_k, spec.n);
      const int band = band_cap_modes(spec, 1);
      for (int s = 0; s < v_seeds; ++s)
        reports.push_back(verify_heat_restriction(
            random_band_field(spec, cfg.seed + static_cast<std::uint64_t>(s), band),
            H, v_t));
      return emit.finish(reports, cfg, &H);
    }

    if (*wave) {
      const auto rep = wave_restriction_threshold(3, v_k, v_t,
                                                  parse_lambda_range(v_slist));
      for (const auto& q : rep.points) reports.push_back(wave_point_report(rep, q));
      return emit.finish(reports, cfg);
    }

    if (*psob) {
      const GridSpec spec = config_spec(cfg);
      const int band = band_cap_modes(spec, 2);
      for (int s = 0; s < v_seeds; ++s) {
        const GridFunction u = random_band_field(spec, cfg.seed + 2ull * s, band);
        const GridFunction v = random_band_field(spec, cfg.seed + 2ull * s + 1, band);
        reports.push_back(product_sobolev_check(u, v, v_r, v_s2));
      }
      return emit.finish(reports, cfg);
    }

    if (*osc) {
      const Phase phi = make_phase(v_phase, v_d);
      const Amplitude psi = make_bump_amplitude(v_d, v_radius);
      GridSpec spec;
      spec.n = v_d;
      spec.L = cfg.L;
      spec.N = cfg.N > 0 ? cfg.N
                         : required_modes(phi, psi, v_lambda, spec.L);
      validate_spec(spec);
      const int band = band_cap_modes(spec, 2);
      for (int s = 0; s < v_seeds; ++s) {
        const GridFunction f = random_band_field(spec, cfg.seed + 2ull * s, band);
        const GridFunction g = random_band_field(spec, cfg.seed + 2ull * s + 1, band);
        reports.push_back(verify_oscillatory_bound(phi, psi, v_lambda, f, g));
      }
      return emit.finish(reports, cfg);
    }

    if (*pone) {
      const GridSpec spec = config_spec(cfg);
      const KernelHandle K = make_kernel("sphere", {{"n", spec.n}});
      const int band = band_cap_modes(spec, 2);
      for (int s = 0; s < v_seeds; ++s) {
        const GridFunction f = random_band_field(spec, cfg.seed + 2ull * s, band);
        const GridFunction g = random_band_field(spec, cfg.seed + 2ull * s + 1, band);
        const ProblemOneReport pr = compare_problem_one_bounds(K, f, g, v_r);
        double best = infinity();
        if (pr.has_one) best = std::min(best, pr.rhs_one);
        if (pr.has_two) best = std::min(best, pr.rhs_two);
        reports.push_back(make_report("problem-one",
                                      {{"r", v_r},
                                       {"rhs_one", pr.rhs_one},
                                       {"rhs_two", pr.rhs_two},
                                       {"has_one", pr.has_one},
                                       {"has_two", pr.has_two}},
                                      pr.lhs, best, 1e-6));
      }
      return emit.finish(reports, cfg);
    }

    if (*gfit) {
      const KernelHandle nu = memoize_radial_spectrum(sphere_kernel(sc_m * sc_d, 1.0));
      const Subspace H = make_diagonal_subspace(sc_m, sc_d);
      std::vector<int> js;
      for (int j = 1; j <= sc_jmax; ++j) js.push_back(j);
      const DecayFit fit =
          gamma_fit(nu, H, make_lp_family(sc_jmax + 3), js, sc_spacing);
      auto rep = make_report("gamma-fit", fit.to_json(), fit.gamma_hat(),
                             fit.gamma_hat(), 0.0);
      rep.pass = fit.r2 >= 0.9;
      reports.push_back(rep);
      return emit.finish(reports, cfg, &H);
    }

    if (*ldecay) {
      const Phase phi = make_phase(sc_phase, sc_scan_d);
      const Amplitude psi = make_bump_amplitude(sc_scan_d, 0.25);
      const LambdaScan scan = lambda_decay_scan(phi, psi, sc_scan_d,
                                                parse_lambda_range(sc_lambdas),
                                                sc_seeds);
      nlohmann::json params = scan.to_json();
      params["phase"] = sc_phase;
      params["d"] = sc_scan_d;
      auto rep = make_report("lambda-decay", params, scan.lower_fit.slope,
                             scan.upper_fit.slope, 0.0);
      rep.pass = true;
      for (const auto& pt : scan.points)
        rep.pass = rep.pass && pt.lower <= pt.upper * (1 + 1e-6);
      reports.push_back(rep);
      return emit.finish(reports, cfg);
    }

    if (*lpimp) {
      const GridSpec spec = config_spec(cfg);
      const KernelHandle nu = product_sphere_kernel(2, spec.n / 2, 1.0);
      const int band = band_cap_modes(spec, 2);
      GridSpec block;
      block.n = spec.n / 2;
      block.N = spec.N;
      block.L = spec.L;
      for (double p : parse_lambda_range(sc_plist)) {
        for (int s = 0; s < sc_seeds; ++s) {
          const std::vector<GridFunction> fs{
              random_band_field(block, cfg.seed + 2ull * s, band),
              random_band_field(block, cfg.seed + 2ull * s + 1, band)};
          reports.push_back(lp_improving_bound(nu, sc_l, sc_gamma, fs, p, false));
        }
      }
      return emit.finish(reports, cfg);
    }

    if (*maximal) {
      // Refinement stability of the bilinear spherical maximal ratio in R^4:
      // the t-grid density doubles and the ratio must move by < 2%.
      GridSpec block{2, 16, 16.0};
      const KernelHandle K = memoize_radial_spectrum(sphere_kernel(4, 1.0));
      const int band = band_cap_modes(GridSpec{4, 16, 16.0}, 2);
      for (int s = 0; s < sc_seeds; ++s) {
        const std::vector<GridFunction> fs{
            random_band_field(block, cfg.seed + 2ull * s, band),
            random_band_field(block, cfg.seed + 2ull * s + 1, band)};
        const double denom = lp_norm(fs[0], 2) * lp_norm(fs[1], 2);
        const double r8 = lp_norm(maximal_apply(K, fs, 1.0, 2.0, 8), 2) / denom;
        const double r16 = lp_norm(maximal_apply(K, fs, 1.0, 2.0, 16), 2) / denom;
        auto rep = make_report("maximal-refinement",
                               {{"per_octave_coarse", 8},
                                {"per_octave_fine", 16},
                                {"ratio_coarse", r8},
                                {"ratio_fine", r16}},
                               std::abs(r16 / r8 - 1.0), 0.02, 0.0);
        reports.push_back(rep);
      }
      return emit.finish(reports, cfg);
    }

    if (*kern_cmd) {
      if (kern_name.empty()) {
        nlohmann::json names = kernel_names();
        std::cout << names.dump() << "\n";
        return 0;
      }
      const nlohmann::json kp = kern_params.empty() ? nlohmann::json::object()
                                                    : nlohmann::json::parse(kern_params);
      const KernelHandle K = make_kernel(kern_name, kp);
      GridSpec spec = config_spec(cfg);
      spec.n = K.n;
      spec.N = cfg.N > 0 ? cfg.N : default_grid_N(K.n);
      const Spectrum c = sample_spectrum(K, spec);
      if (!kern_out.empty()) save_grid(kern_out, c.spec, c.coeffs, Side::frequency);
      reports.push_back(make_report("kernel",
                                    {{"name", kern_name}, {"id", K.id}, {"out", kern_out}},
                                    lp_norm(c, infinity()), lp_norm(c, infinity()), 0.0));
      return emit.finish(reports, cfg);
    }

    throw std::invalid_argument("no subcommand executed");
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    if (msg.find("resolution guard") != std::string::npos) {
      std::cerr << "resolution-guard abort: " << msg << "\n";
      return 3;
    }
    std::cerr << "error: " << msg << "\n";
    return 2;
  }
}
