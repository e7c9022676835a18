#pragma once

// Run configuration (JSON):
//   {
//     "name": "...",
//     "seed": 1,
//     "model": {"dim": 3, "spectral_profile": "brownian" | [...]},
//     "body": {...},
//     "psi": {"name": "constant", "value": 1} | {"name": "coordinate", "index": 0}
//          | {"name": "tanh", "w": [...], "b": 0} | {"name": "dist_clamp", "point": [...], "cap": 1},
//     "directions": {"k": [[...], ...], "h": [...], "candidates": [[...], ...]},
//     "budget": {"samples": 1000000, "order": 64, "mc_samples": 100000, "boundary_samples": 4000,
//                "epsilons": [0.04, 0.02, 0.01], "minkowski_samples": 100000,
//                "points": 100, "subspace_samples": 400, "circle_angles": 4096,
//                "sphere_polar": 128, "sphere_azimuth": 256,
//                "density_radius": 0.1, "density_samples": 20000},
//     "grid": {"dims": [...], "samples": [...], "chain": [[[...], ...], ...]},
//     "outputs": {"csv": true}
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wibp/gaussian_space.hpp"
#include "wibp/surface_measure.hpp"

namespace wibp::cli {

struct RunBudget {
  std::size_t samples = 1000000;
  Budget area;
  std::vector<double> epsilons{0.04, 0.02, 0.01};
  std::size_t minkowski_samples = 100000;
  std::size_t points = 100;
  std::size_t subspace_samples = 400;
  double density_radius = 0.1;
  std::size_t density_samples = 20000;
};

struct RunConfig {
  nlohmann::json effective;  // the validated config with overrides applied
  std::string name;
  std::uint64_t seed = 0;
  GaussianModel model;
  nlohmann::json body;
  nlohmann::json psi;
  std::vector<Vec> k;
  std::optional<Vec> h;
  std::vector<Vec> candidates;
  RunBudget budget;
  std::vector<int> dims;
  std::vector<std::size_t> sample_grid;
  std::vector<std::vector<Vec>> chain;
  bool csv = true;
};

GaussianModel load_model(const nlohmann::json& j, const std::string& path = "model");
TestFunction load_psi(const nlohmann::json& j, int dim, const std::string& path = "psi");

/// Validates `j`; errors are SchemaError messages prefixed with the field
/// path. `seed_override` replaces the config's seed.
RunConfig parse_config(nlohmann::json j, std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace wibp::cli
