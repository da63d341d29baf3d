#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rconv {

// Outcome of one inequality check.  ratio = lhs/rhs; pass means
// ratio <= 1 + tol (or a stability criterion, recorded in params).
struct VerificationReport {
  std::string inequality_id;
  nlohmann::json params; // exponents, dimensions, subspace, kernel id, seed...
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
  bool pass = false;
  double tol = 0;

  nlohmann::json to_json() const;
};

VerificationReport make_report(const std::string& id, nlohmann::json params,
                               double lhs, double rhs, double tol);

// JSON-lines / CSV serialization.  CSV columns: inequality_id, params (as a
// compact JSON string), lhs, rhs, ratio, pass.
void write_jsonl(const std::string& path, const std::vector<VerificationReport>& rs);
void write_csv(const std::string& path, const std::vector<VerificationReport>& rs);

bool all_pass(const std::vector<VerificationReport>& rs);

} // namespace rconv
