#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wibp/ibp_verifier.hpp"

namespace wibp::cli {

struct ResultRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double se_l = 0.0;
  double se_r = 0.0;
  double diff = 0.0;
  double tol = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string lhs_method;
  std::string rhs_method;
};

ResultRow row_from(const VerificationReport& r);

/// Plain CSV table (header row, '.' decimal separator).
struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);

struct Report {
  std::string subcommand;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<ResultRow> results;
  std::vector<Table> tables;
  nlohmann::json sidecar = nlohmann::json::object();  // timings and run environment
};

/// The deterministic part of the report: config hash, seed, results and
/// library versions. Timings live in the sidecar only.
nlohmann::json report_json(const Report& r);

/// 0 when every verdict passes, 2 when some are inconclusive and none fail,
/// 1 when any fails.
int exit_code(const std::vector<ResultRow>& rows);

/// Writes report.json, report.meta.json and one CSV per table into dir.
void write_outputs(const Report& r, const std::string& dir, bool csv);

std::string serialize(const nlohmann::json& j);

}  // namespace wibp::cli
