// Command-line front end: wibp <subcommand> --config run.json [--seed N] [--out DIR] [--threads N]

#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "wibp/cli/runner.hpp"
#include "wibp/kernels/kernels.hpp"
#include "wibp/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gaussian surface measures and integration by parts on convex sets"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  unsigned threads = 1;
  std::string isa;
  const std::map<std::string, std::string> about{
      {"perimeter", "Gaussian perimeter by area formula and Minkowski content"},
      {"ibp", "integration-by-parts check for each direction k"},
      {"surface", "upper, lower and total boundary integrals"},
      {"gradcheck", "gauge gradient formula against finite differences on the boundary"},
      {"converge-dim", "perimeter across a grid of dimensions"},
      {"converge-subspace", "IBP along a nested chain of subspaces"},
      {"density", "Lebesgue density of the body at boundary points"},
      {"converge-samples", "lhs estimate against sample count"},
      {"converge-epsilon", "Minkowski quotients against shell width"}};
  for (const auto& name : wibp::cli::subcommands()) {
    const auto it = about.find(name);
    auto* sub = app.add_subcommand(name, it == about.end() ? "" : it->second);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--isa", isa, "kernel variant")->check(CLI::IsMember({"scalar", "avx2"}));
  }
  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    wibp::set_thread_count(threads);
    if (!isa.empty()) wibp::kernels::select(wibp::kernels::parse_isa(isa));
    const auto config = wibp::cli::load_config(config_path, seed);
    const auto report = wibp::cli::run(sub, config);
    wibp::cli::write_outputs(report, out_dir, config.csv);
    for (const auto& row : report.results) {
      std::cout << row.name << ": lhs=" << wibp::cli::format_number(row.lhs)
                << " rhs=" << wibp::cli::format_number(row.rhs) << " diff=" << wibp::cli::format_number(row.diff)
                << " tol=" << wibp::cli::format_number(row.tol) << " " << wibp::verdict_name(row.verdict) << "\n";
    }
    return wibp::cli::exit_code(report.results);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
