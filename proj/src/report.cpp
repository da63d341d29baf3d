#include "rconv/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rconv {

nlohmann::json VerificationReport::to_json() const {
  return {{"inequality_id", inequality_id}, {"params", params}, {"lhs", lhs},
          {"rhs", rhs},                     {"ratio", ratio},   {"pass", pass},
          {"tol", tol}};
}

VerificationReport make_report(const std::string& id, nlohmann::json params,
                               double lhs, double rhs, double tol) {
  VerificationReport r;
  r.inequality_id = id;
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = rhs != 0 ? lhs / rhs : (lhs == 0 ? 0.0 : std::numeric_limits<double>::infinity());
  if (!std::isfinite(r.ratio)) throw std::runtime_error("non-finite ratio in " + id);
  r.tol = tol;
  r.pass = r.ratio <= 1.0 + tol;
  return r;
}

void write_jsonl(const std::string& path, const std::vector<VerificationReport>& rs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& r : rs) out << r.to_json().dump() << '\n';
}

void write_csv(const std::string& path, const std::vector<VerificationReport>& rs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "inequality_id,params,lhs,rhs,ratio,pass\n";
  for (const auto& r : rs) {
    std::string p = r.params.dump();
    std::string quoted = "\"";
    for (char c : p) {
      if (c == '"') quoted += "\"\"";
      else quoted += c;
    }
    quoted += "\"";
    out << r.inequality_id << ',' << quoted << ',' << r.lhs << ',' << r.rhs << ','
        << r.ratio << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

bool all_pass(const std::vector<VerificationReport>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return true;
}

} // namespace rconv
