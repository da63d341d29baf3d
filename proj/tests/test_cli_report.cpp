#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rconv/cli_report.hpp"
#include "rconv/grid.hpp"

using namespace rconv;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = "./rconv " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  std::vector<nlohmann::json> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
  return lines;
}

} // namespace

TEST_CASE("default grid table and empty config") {
  CHECK(default_grid_N(1) == 64);
  CHECK(default_grid_N(2) == 64);
  CHECK(default_grid_N(3) == 32);
  CHECK(default_grid_N(4) == 32);
  CHECK(default_grid_N(6) == 16);
  CHECK_THROWS_AS(default_grid_N(7), std::invalid_argument);
  const RunConfig cfg = load_config("");
  const GridSpec spec = config_spec(cfg);
  CHECK(spec.n == 2);
  CHECK(spec.N == 64);
  CHECK(spec.L == 16.0);
}

TEST_CASE("config file overrides defaults and flags override the file") {
  write_file("cli_test_cfg.json", R"({"n": 3, "N": 16, "seed": 9})");
  RunConfig cfg = load_config("cli_test_cfg.json");
  CHECK(cfg.n == 3);
  CHECK(cfg.seed == 9);
  CHECK(config_spec(cfg).N == 16);
  override_config(cfg, "N", "32");
  CHECK(config_spec(cfg).N == 32);
  REQUIRE(cfg.notes.size() == 1);
  CHECK(cfg.notes[0].find("--N=32") != std::string::npos);
  // same value: no conflict note
  override_config(cfg, "n", "3");
  CHECK(cfg.notes.size() == 1);
  CHECK_THROWS_AS(override_config(cfg, "bogus", "1"), std::invalid_argument);
  CHECK_THROWS_AS(override_config(cfg, "N", "notanumber"), std::invalid_argument);
}

TEST_CASE("config schema violations point at the offending key") {
  write_file("cli_test_bad1.json", R"({"unknown_key": 1})");
  CHECK_THROWS_WITH_AS(load_config("cli_test_bad1.json"),
                       doctest::Contains("/unknown_key"), std::runtime_error);
  write_file("cli_test_bad2.json", R"({"n": "two"})");
  CHECK_THROWS_WITH_AS(load_config("cli_test_bad2.json"),
                       doctest::Contains("/n"), std::runtime_error);
  CHECK_THROWS_AS(load_config("cli_test_missing.json"), std::runtime_error);
}

TEST_CASE("subspace and lambda-range parsing") {
  const Subspace Hc = parse_subspace("coord:1", 2);
  CHECK(Hc.kind == SubspaceKind::coordinate);
  CHECK(Hc.k == 1);
  const Subspace Hd = parse_subspace("diag:2x2", 4);
  CHECK(Hd.kind == SubspaceKind::diagonal);
  CHECK(Hd.m == 2);
  CHECK_THROWS_AS(parse_subspace("diag:2x2", 5), std::invalid_argument);
  CHECK_THROWS_AS(parse_subspace("nonsense", 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_subspace("ring:3", 3), std::invalid_argument);

  CHECK(parse_lambda_range("16..128") == std::vector<double>{16, 32, 64, 128});
  CHECK(parse_lambda_range("1,2.5,3") == std::vector<double>{1, 2.5, 3});
  CHECK_THROWS_AS(parse_lambda_range("8..4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_lambda_range(""), std::invalid_argument);
}

TEST_CASE("annotation stamps version, config, and subspace convention") {
  RunConfig cfg = load_config("");
  cfg.notes.push_back("example note");
  const Subspace H = parse_subspace("diag:2x2", 4);
  std::vector<VerificationReport> reports{
      make_report("demo", {{"x", 1}}, 1.0, 2.0, 0.0)};
  annotate_reports(reports, cfg, &H);
  const auto& p = reports[0].params;
  CHECK(p.at("artifact_version").get<std::string>() == kArtifactVersion);
  CHECK(p.at("config").at("N").get<int>() == 64);
  CHECK(p.at("subspace").at("kind").get<std::string>() == "diagonal");
  CHECK(p.at("subspace").at("jacobian_rho").get<double>() ==
        doctest::Approx(0.5)); // 2^{-d/2}, d = 2
  CHECK(p.at("config_notes")[0].get<std::string>() == "example note");
  CHECK(reports_exit_code(reports) == 0);
  reports[0].pass = false;
  CHECK(reports_exit_code(reports) == 1);
}

TEST_CASE("cli: verify trace writes passing reports and exits 0") {
  REQUIRE(run_cli("verify trace --seeds 2 --s 1 --out cli_test_trace.jsonl") == 0);
  const auto lines = read_jsonl("cli_test_trace.jsonl");
  REQUIRE(lines.size() == 2);
  for (const auto& j : lines) {
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("inequality_id").get<std::string>() == "trace-sobolev");
    CHECK(j.at("params").at("artifact_version").get<std::string>() ==
          kArtifactVersion);
  }
}

TEST_CASE("cli: exit-code contract") {
  CHECK(run_cli("--totally-bogus-flag") == 2);
  CHECK(run_cli("not-a-subcommand") == 2);
  CHECK(run_cli("verify young --triples 99 --seeds 1") == 2);
  // undersized lattice for the requested oscillation -> guard abort
  CHECK(run_cli("verify oscillatory --lambda 64 --N 32 --L 8 --seeds 1") == 3);
}

TEST_CASE("cli: identical config and seed give byte-identical output") {
  const std::string cmd =
      "verify young --seeds 2 --triples 1 --seed 42 --out cli_test_det";
  REQUIRE(run_cli(cmd + "1.jsonl") == 0);
  REQUIRE(run_cli(cmd + "2.jsonl") == 0);
  const std::string a = slurp("cli_test_det1.jsonl");
  CHECK(!a.empty());
  CHECK(a == slurp("cli_test_det2.jsonl"));
}

TEST_CASE("cli: csv emission and config-file precedence") {
  write_file("cli_test_cfg2.json", R"({"N": 16})");
  REQUIRE(run_cli("verify heat --seeds 1 --t 0.25 --config cli_test_cfg2.json "
                  "--N 32 --out cli_test_heat.jsonl --csv cli_test_heat.csv") == 0);
  const auto lines = read_jsonl("cli_test_heat.jsonl");
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].at("params").at("config").at("N").get<int>() == 32);
  const std::string note =
      lines[0].at("params").at("config_notes")[0].get<std::string>();
  CHECK(note.find("--N=32") != std::string::npos);
  const std::string csv = slurp("cli_test_heat.csv");
  CHECK(csv.find("inequality_id") != std::string::npos);
  CHECK(csv.find("heat-restriction") != std::string::npos);
}

TEST_CASE("cli: kernel emission and restricted convolution round trip") {
  REQUIRE(run_cli("kernels --name heat --kernel-params '{\"t\":1,\"n\":2}' "
                  "--out-grid cli_test_heat.grid") == 0);
  const LoadedGrid k = load_grid("cli_test_heat.grid");
  CHECK(k.side == Side::frequency);
  CHECK(k.spec.n == 2);
  REQUIRE(run_cli("conv --file cli_test_heat.grid --kernel heat "
                  "--kernel-params '{\"t\":1,\"n\":2}' --H coord:1 "
                  "--out-grid cli_test_conv.grid") == 0);
  const LoadedGrid c = load_grid("cli_test_conv.grid");
  CHECK(c.spec.n == 1); // restricted to the 1-d base lattice
  CHECK(c.side == Side::spatial);
}

TEST_CASE("cli: norm subcommand emits the sharp heat mixed norm") {
  REQUIRE(run_cli("norm --kernel heat --kernel-params '{\"t\":1,\"n\":2}' "
                  "--H coord:1 --r 2 --p inf --out cli_test_norm.jsonl") == 0);
  const auto lines = read_jsonl("cli_test_norm.jsonl");
  REQUIRE(lines.size() == 1);
  // Lambda_{2,inf} of the heat kernel at t = 1, codim 1: (8 pi)^{-1/4}
  CHECK(lines[0].at("lhs").get<double>() ==
        doctest::Approx(std::pow(8 * 3.14159265358979, -0.25)).epsilon(1e-6));
}
