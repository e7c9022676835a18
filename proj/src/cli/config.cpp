#include "wibp/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wibp/test_functions.hpp"

namespace wibp::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw SchemaError(path + ": " + msg); }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t count(const json& j, const std::string& path, std::uint64_t min = 1) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < static_cast<std::int64_t>(min))
    fail(path, "expected an integer >= " + std::to_string(min));
  return j.get<std::uint64_t>();
}

Vec vec(const json& j, const std::string& path, int dim) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  if (static_cast<int>(j.size()) != dim)
    fail(path, "expected " + std::to_string(dim) + " entries (model.dim), got " + std::to_string(j.size()));
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = number(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<Vec> vec_list(const json& j, const std::string& path, int dim) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of vectors");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    Vec v = vec(j[i], p, dim);
    if (!(v.norm() > 0.0)) fail(p, "vector must be non-zero");
    out.push_back(v / v.norm());
  }
  return out;
}

}  // namespace

GaussianModel load_model(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (!j.contains("dim")) fail(path + ".dim", "required field is missing");
  const int n = static_cast<int>(count(j["dim"], path + ".dim"));
  GaussianModel m = GaussianModel::standard(n);
  if (j.contains("spectral_profile")) {
    const auto& sp = j["spectral_profile"];
    if (sp.is_string()) {
      if (sp.get<std::string>() != "brownian") fail(path + ".spectral_profile", "unknown profile name");
      m = GaussianModel::brownian(n);
    } else {
      if (!sp.is_array()) fail(path + ".spectral_profile", "expected \"brownian\" or an array");
      std::vector<double> v;
      for (std::size_t i = 0; i < sp.size(); ++i)
        v.push_back(number(sp[i], path + ".spectral_profile[" + std::to_string(i) + "]"));
      m.spectral_profile = v;
    }
  }
  try {
    m.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return m;
}

TestFunction load_psi(const json& j, int dim, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (!j.contains("name") || !j["name"].is_string()) fail(path + ".name", "required string field is missing");
  const std::string name = j["name"].get<std::string>();
  auto get = [&](const char* key) -> const json& {
    if (!j.contains(key)) fail(path + "." + key, "required field is missing");
    return j[key];
  };
  if (name == "constant") return psi_constant(j.contains("value") ? number(j["value"], path + ".value") : 1.0);
  if (name == "coordinate") {
    const auto i = count(get("index"), path + ".index", 0);
    if (static_cast<int>(i) >= dim) fail(path + ".index", "index exceeds model.dim");
    return psi_coordinate(dim, static_cast<int>(i));
  }
  if (name == "tanh")
    return psi_tanh(vec(get("w"), path + ".w", dim), j.contains("b") ? number(j["b"], path + ".b") : 0.0);
  if (name == "dist_clamp") {
    const double cap = number(get("cap"), path + ".cap");
    if (!(cap > 0.0)) fail(path + ".cap", "must be positive");
    return psi_dist_clamp(vec(get("point"), path + ".point", dim), cap);
  }
  fail(path + ".name", "unknown test function '" + name + "'");
}

RunConfig parse_config(json j, std::optional<std::uint64_t> seed_override) {
  if (!j.is_object()) fail("config", "expected a JSON object");
  if (seed_override) j["seed"] = *seed_override;
  RunConfig c;
  if (!j.contains("seed")) fail("seed", "required field is missing (runs are never seeded from the clock)");
  c.seed = count(j["seed"], "seed", 0);
  c.name = j.value("name", std::string("run"));
  if (!j.contains("model")) fail("model", "required field is missing");
  c.model = load_model(j["model"]);
  const int n = c.model.dim;
  if (!j.contains("body")) fail("body", "required field is missing");
  c.body = j["body"];
  c.psi = j.value("psi", json{{"name", "constant"}, {"value", 1.0}});
  load_psi(c.psi, n);

  const json dirs = j.value("directions", json::object());
  if (!dirs.is_object()) fail("directions", "expected an object");
  if (dirs.contains("k")) {
    c.k = vec_list(dirs["k"], "directions.k", n);
  } else {
    for (int i = 0; i < n; ++i) c.k.push_back(Vec::Unit(n, i));
  }
  if (dirs.contains("h")) {
    Vec h = vec(dirs["h"], "directions.h", n);
    if (!(h.norm() > 0.0)) fail("directions.h", "vector must be non-zero");
    c.h = h / h.norm();
  }
  if (dirs.contains("candidates")) c.candidates = vec_list(dirs["candidates"], "directions.candidates", n);

  const json b = j.value("budget", json::object());
  if (!b.is_object()) fail("budget", "expected an object");
  auto& rb = c.budget;
  if (b.contains("samples")) rb.samples = count(b["samples"], "budget.samples", 2);
  if (b.contains("order")) rb.area.order = static_cast<int>(count(b["order"], "budget.order", 2));
  if (b.contains("mc_samples")) rb.area.samples = count(b["mc_samples"], "budget.mc_samples", 2);
  if (b.contains("boundary_samples")) rb.area.boundary_samples = count(b["boundary_samples"], "budget.boundary_samples");
  if (b.contains("circle_angles")) rb.area.circle_angles = static_cast<int>(count(b["circle_angles"], "budget.circle_angles", 8));
  if (b.contains("sphere_polar")) rb.area.sphere_polar = static_cast<int>(count(b["sphere_polar"], "budget.sphere_polar", 4));
  if (b.contains("sphere_azimuth")) rb.area.sphere_azimuth = static_cast<int>(count(b["sphere_azimuth"], "budget.sphere_azimuth", 8));
  if (b.contains("minkowski_samples")) rb.minkowski_samples = count(b["minkowski_samples"], "budget.minkowski_samples", 2);
  if (b.contains("points")) rb.points = count(b["points"], "budget.points");
  if (b.contains("subspace_samples")) rb.subspace_samples = count(b["subspace_samples"], "budget.subspace_samples", 2);
  if (b.contains("density_samples")) rb.density_samples = count(b["density_samples"], "budget.density_samples", 1000);
  if (b.contains("density_radius")) {
    rb.density_radius = number(b["density_radius"], "budget.density_radius");
    if (!(rb.density_radius > 0.0)) fail("budget.density_radius", "must be positive");
  }
  if (b.contains("epsilons")) {
    const auto& e = b["epsilons"];
    if (!e.is_array() || e.size() < 3) fail("budget.epsilons", "expected at least 3 values");
    rb.epsilons.clear();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string p = "budget.epsilons[" + std::to_string(i) + "]";
      const double v = number(e[i], p);
      if (!(v > 0.0 && v <= 0.1)) fail(p, "must lie in (0, 0.1]");
      if (i > 0 && !(v < rb.epsilons.back())) fail(p, "epsilons must be strictly decreasing");
      rb.epsilons.push_back(v);
    }
  }

  const json g = j.value("grid", json::object());
  if (!g.is_object()) fail("grid", "expected an object");
  if (g.contains("dims")) {
    const auto& d = g["dims"];
    if (!d.is_array() || d.empty()) fail("grid.dims", "expected a non-empty array");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto v = static_cast<int>(count(d[i], "grid.dims[" + std::to_string(i) + "]"));
      if (!c.dims.empty() && v <= c.dims.back()) fail("grid.dims", "dimensions must be increasing");
      c.dims.push_back(v);
    }
  }
  if (g.contains("samples")) {
    const auto& d = g["samples"];
    if (!d.is_array() || d.empty()) fail("grid.samples", "expected a non-empty array");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto v = count(d[i], "grid.samples[" + std::to_string(i) + "]", 2);
      if (!c.sample_grid.empty() && v <= c.sample_grid.back()) fail("grid.samples", "sample counts must be increasing");
      c.sample_grid.push_back(v);
    }
  }
  if (g.contains("chain")) {
    const auto& ch = g["chain"];
    if (!ch.is_array() || ch.empty()) fail("grid.chain", "expected a non-empty array of subspaces");
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const std::string p = "grid.chain[" + std::to_string(i) + "]";
      auto F = vec_list(ch[i], p, n);
      if (!c.chain.empty() && F.size() <= c.chain.back().size()) fail(p, "subspace dimensions must increase");
      c.chain.push_back(std::move(F));
    }
  }
  const json o = j.value("outputs", json::object());
  if (!o.is_object()) fail("outputs", "expected an object");
  c.csv = o.value("csv", true);
  c.effective = std::move(j);
  return c;
}

RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw SchemaError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(std::move(j), seed_override);
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wibp::cli
