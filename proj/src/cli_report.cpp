#include "rconv/cli_report.hpp"

#include <fstream>
#include <stdexcept>

namespace rconv {

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what) {
  throw std::runtime_error("config schema violation at " + pointer + ": " + what);
}

} // namespace

int default_grid_N(int n) {
  if (n <= 2) return 64;
  if (n <= 4) return 32;
  if (n <= 6) return 16;
  throw std::invalid_argument("no default grid for n > 6");
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    schema_error("/", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("/", "top level must be an object");
  for (const auto& [key, value] : j.items()) {
    const std::string ptr = "/" + key;
    if (key == "n" || key == "N" || key == "threads") {
      if (!value.is_number_integer()) schema_error(ptr, "expected an integer");
    } else if (key == "L") {
      if (!value.is_number()) schema_error(ptr, "expected a number");
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer())
        schema_error(ptr, "expected a non-negative integer");
    } else {
      schema_error(ptr, "unknown key");
    }
    if (key == "n") cfg.n = value.get<int>();
    if (key == "N") cfg.N = value.get<int>();
    if (key == "L") cfg.L = value.get<double>();
    if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    if (key == "threads") cfg.threads = value.get<int>();
    cfg.from_file.insert(key);
  }
  return cfg;
}

void override_config(RunConfig& cfg, const std::string& key,
                     const std::string& value) {
  auto note_conflict = [&](const std::string& old_value) {
    if (cfg.from_file.count(key) && old_value != value)
      cfg.notes.push_back("flag --" + key + "=" + value +
                          " overrides config-file value " + old_value);
  };
  try {
    if (key == "n") {
      note_conflict(std::to_string(cfg.n));
      cfg.n = std::stoi(value);
    } else if (key == "N") {
      note_conflict(std::to_string(cfg.N));
      cfg.N = std::stoi(value);
    } else if (key == "L") {
      note_conflict(std::to_string(cfg.L));
      cfg.L = std::stod(value);
    } else if (key == "seed") {
      note_conflict(std::to_string(cfg.seed));
      cfg.seed = std::stoull(value);
    } else if (key == "threads") {
      note_conflict(std::to_string(cfg.threads));
      cfg.threads = std::stoi(value);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse value '" + value + "' for --" + key);
  }
}

GridSpec config_spec(const RunConfig& cfg) {
  GridSpec spec;
  spec.n = cfg.n;
  spec.N = cfg.N > 0 ? cfg.N : default_grid_N(cfg.n);
  spec.L = cfg.L;
  validate_spec(spec);
  return spec;
}

nlohmann::json config_json(const RunConfig& cfg) {
  const GridSpec spec = config_spec(cfg);
  return {{"n", spec.n},     {"N", spec.N},
          {"L", spec.L},     {"seed", cfg.seed},
          {"threads", cfg.threads}};
}

Subspace parse_subspace(const std::string& text, int n) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument(
        "subspace must be coord:K or diag:MxD, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  try {
    if (kind == "coord") {
      return make_coordinate_subspace(std::stoi(rest), n);
    }
    if (kind == "diag") {
      const auto x = rest.find('x');
      if (x == std::string::npos)
        throw std::invalid_argument("diag needs MxD, got '" + rest + "'");
      const int m = std::stoi(rest.substr(0, x));
      const int d = std::stoi(rest.substr(x + 1));
      if (m * d != n)
        throw std::invalid_argument("diag:" + rest + " needs ambient n = " +
                                    std::to_string(m * d));
      return make_diagonal_subspace(m, d);
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse subspace '" + text + "'");
  }
  throw std::invalid_argument("unknown subspace kind '" + kind +
                              "' (use coord or diag)");
}

std::vector<double> parse_lambda_range(const std::string& text) {
  std::vector<double> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const double a = std::stod(text.substr(0, dots));
      const double b = std::stod(text.substr(dots + 2));
      if (!(a > 0) || b < a)
        throw std::invalid_argument("range must satisfy 0 < a <= b");
      for (double v = a; v <= b * (1 + 1e-12); v *= 2) out.push_back(v);
      return out;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      out.push_back(std::stod(text.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse lambda list '" + text + "'");
  }
  if (out.empty())
    throw std::invalid_argument("empty lambda list '" + text + "'");
  return out;
}

void annotate_reports(std::vector<VerificationReport>& reports,
                      const RunConfig& cfg, const Subspace* H) {
  nlohmann::json sub = nullptr;
  if (H) {
    sub = {{"kind", H->kind == SubspaceKind::coordinate ? "coordinate" : "diagonal"},
           {"n", H->n},
           {"k", H->k},
           {"jacobian_rho", H->jacobian_rho}};
  }
  for (auto& r : reports) {
    r.params["artifact_version"] = kArtifactVersion;
    r.params["config"] = config_json(cfg);
    if (!sub.is_null()) r.params["subspace"] = sub;
    if (!cfg.notes.empty()) r.params["config_notes"] = cfg.notes;
  }
}

int reports_exit_code(const std::vector<VerificationReport>& reports) {
  return all_pass(reports) ? 0 : 1;
}

} // namespace rconv
