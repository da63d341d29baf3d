#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rconv/report.hpp"
#include "rconv/subspace.hpp"

namespace rconv {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Resolved run parameters: documented defaults, overridden by a JSON config
// file, overridden in turn by command-line flags.  `from_file` remembers
// which keys the file set explicitly so flag/file conflicts can be reported;
// `notes` collects those conflict messages and is echoed into every report.
struct RunConfig {
  int n = 2;
  int N = 0; // 0: derive from n via default_grid_N
  double L = 16.0;
  std::uint64_t seed = 1;
  int threads = 1;
  std::set<std::string> from_file;
  std::vector<std::string> notes;
};

// Default lattice resolution per dimension: 64 for n <= 2, 32 for n in {3,4},
// 16 for n in {5,6}.
int default_grid_N(int n);

// Defaults overridden by the JSON file at `path` ("" keeps pure defaults).
// Allowed keys: n, N, L, seed, threads.  Schema violations throw with a JSON
// pointer to the offending key.
RunConfig load_config(const std::string& path);

// Apply one command-line override (key in {n, N, L, seed, threads}); flags
// win over the file, and a disagreement with an explicit file value is noted.
void override_config(RunConfig& cfg, const std::string& key,
                     const std::string& value);

GridSpec config_spec(const RunConfig& cfg);
nlohmann::json config_json(const RunConfig& cfg);

// "coord:k" or "diag:MxD" -> Subspace in ambient dimension n.
Subspace parse_subspace(const std::string& text, int n);

// "16..1024" -> doubling sequence; or a comma-separated list of values.
std::vector<double> parse_lambda_range(const std::string& text);

// Stamp every report with the artifact version, the resolved config, the
// subspace convention (kind, k, n, jacobian_rho), and any conflict notes.
void annotate_reports(std::vector<VerificationReport>& reports,
                      const RunConfig& cfg, const Subspace* H = nullptr);

// 0 if every report passes, 1 otherwise (the CLI exit-code contract; usage
// errors exit 2 and resolution-guard aborts exit 3, handled by the driver).
int reports_exit_code(const std::vector<VerificationReport>& reports);

} // namespace rconv
