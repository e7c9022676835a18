#pragma once

#include <string>
#include <vector>

#include "wibp/cli/config.hpp"
#include "wibp/cli/report.hpp"

namespace wibp::cli {

/// perimeter, ibp, surface, gradcheck, converge-dim, converge-subspace,
/// density, converge-samples, converge-epsilon.
const std::vector<std::string>& subcommands();

/// Runs one subcommand. Library errors propagate.
Report run(const std::string& subcommand, const RunConfig& config);

}  // namespace wibp::cli
