#include "wibp/cli/report.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace wibp::cli {

ResultRow row_from(const VerificationReport& r) {
  return {r.name,
          r.lhs.value,
          r.rhs.value,
          r.lhs.std_error,
          r.rhs.std_error,
          r.abs_diff,
          r.tolerance,
          r.verdict,
          std::string(method_name(r.lhs.method)),
          std::string(method_name(r.rhs.method))};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

nlohmann::json report_json(const Report& r) {
  auto results = nlohmann::json::array();
  for (const auto& row : r.results) {
    results.push_back({{"name", row.name},
                       {"lhs", num(row.lhs)},
                       {"rhs", num(row.rhs)},
                       {"se_l", num(row.se_l)},
                       {"se_r", num(row.se_r)},
                       {"diff", num(row.diff)},
                       {"tol", num(row.tol)},
                       {"verdict", std::string(verdict_name(row.verdict))},
                       {"lhs_method", row.lhs_method},
                       {"rhs_method", row.rhs_method}});
  }
  char eigen[32];
  std::snprintf(eigen, sizeof eigen, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  char json_v[32];
  std::snprintf(json_v, sizeof json_v, "%d.%d.%d", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                NLOHMANN_JSON_VERSION_PATCH);
  return {{"subcommand", r.subcommand},
          {"config_hash", r.config_hash},
          {"seed", r.seed},
          {"results", results},
          {"versions", {{"wibp", "1.0.0"}, {"eigen", eigen}, {"nlohmann_json", json_v}}}};
}

int exit_code(const std::vector<ResultRow>& rows) {
  bool inconclusive = false;
  for (const auto& r : rows) {
    if (r.verdict == Verdict::fail) return 1;
    if (r.verdict == Verdict::inconclusive) inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

std::string serialize(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_outputs(const Report& r, const std::string& dir, bool csv) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    out << content;
  };
  write("report.json", serialize(report_json(r)));
  write("report.meta.json", serialize(r.sidecar));
  if (!csv) return;
  for (const auto& t : r.tables) {
    std::string s;
    for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
    s += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
      s += "\n";
    }
    write(t.name + ".csv", s);
  }
}

}  // namespace wibp::cli
