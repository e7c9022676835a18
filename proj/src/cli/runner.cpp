#include "wibp/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "wibp/body_spec.hpp"
#include "wibp/kernels/kernels.hpp"
#include "wibp/parallel.hpp"

namespace wibp::cli {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_number(v); }

Direction pick_direction(const RunConfig& c, const ConvexBody& body, json& sidecar) {
  if (c.h) return Direction::from(*c.h);
  std::vector<Direction> cands;
  for (const auto& v : c.candidates) cands.push_back(Direction::from(v));
  if (cands.empty()) cands = default_candidates(body.dim(), c.seed + 2);
  const auto choice = choose_direction(body, cands, c.budget.area.boundary_samples, c.seed + 2);
  sidecar["direction_vertical_mass"] = choice.vertical_mass.value;
  return choice.direction;
}

ResultRow agreement(const std::string& name, const EstimateWithError& a, const EstimateWithError& b,
                    double rel) {
  const double tol = std::max(3.0 * combined_se(a, b), rel * std::abs(b.value));
  return row_from(make_report(name, a, b, tol));
}

ResultRow bound_row(const std::string& name, double lhs, double rhs, double se_l, double se_r, double diff,
                    double tol, bool ok) {
  return {name, lhs, rhs, se_l, se_r, diff, tol, ok ? Verdict::pass : Verdict::fail, "monte_carlo", "monte_carlo"};
}

Mat orthonormal(const std::vector<Vec>& vs) {
  std::vector<Vec> out;
  for (Vec v : vs) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : out) v -= b.dot(v) * b;
    if (v.norm() < 1e-10) throw SchemaError("grid.chain: subspace vectors are linearly dependent");
    out.push_back(v / v.norm());
  }
  Mat m(out.front().size(), static_cast<Eigen::Index>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = out[i];
  return m;
}

std::vector<Vec> columns(const Mat& m) {
  std::vector<Vec> out;
  for (Eigen::Index i = 0; i < m.cols(); ++i) out.push_back(m.col(i));
  return out;
}

void perimeter(const RunConfig& c, Report& r) {
  const ConvexBody body = load_body(c.body, c.model);
  const Direction h = pick_direction(c, body, r.sidecar);
  const GraphPair pair = make_graph_pair(body, h);
  auto t0 = Clock::now();
  const auto area = total_boundary_measure(body, pair, c.model, c.budget.area, c.seed);
  const double t_area = seconds_since(t0);
  t0 = Clock::now();
  const auto mk = minkowski_content_perimeter(body, c.budget.epsilons, c.budget.minkowski_samples, c.seed + 3);
  const double t_mk = seconds_since(t0);
  r.results.push_back(agreement("perimeter", area, mk.estimate, 0.02));
  if (mk.warning) r.sidecar["warnings"].push_back(*mk.warning);
  Table t{"perimeter", {"method", "value", "std_error", "n", "wall_time_s"}, {}};
  t.rows.push_back({std::string(method_name(area.method)), fmt(area.value), fmt(area.std_error),
                    std::to_string(area.n_samples), fmt(t_area)});
  t.rows.push_back({"minkowski_content", fmt(mk.estimate.value), fmt(mk.estimate.std_error),
                    std::to_string(mk.estimate.n_samples), fmt(t_mk)});
  r.tables.push_back(std::move(t));
  r.sidecar["timings"] = {{"area_formula_s", t_area}, {"minkowski_s", t_mk}};
}

void ibp(const RunConfig& c, Report& r) {
  const ConvexBody body = load_body(c.body, c.model);
  const TestFunction psi = load_psi(c.psi, c.model.dim);
  IbpConfig ic;
  ic.samples = c.budget.samples;
  ic.budget = c.budget.area;
  ic.seed = c.seed;
  ic.pinned_h = pick_direction(c, body, r.sidecar);
  const bool vector_form = c.effective.value("vector_measure", false);
  Table t{"ibp", {"check", "k_index", "lhs", "se_l", "rhs", "se_r", "diff", "tol", "verdict", "wall_time_s"}, {}};
  const GraphPair pair = make_graph_pair(body, *ic.pinned_h);
  for (std::size_t i = 0; i < c.k.size(); ++i) {
    const Direction k = Direction::from(c.k[i]);
    const std::string suffix = "[k=" + std::to_string(i) + "]";
    auto t0 = Clock::now();
    auto rep = verify_ibp(body, psi, k, c.model, ic);
    rep.name = "ibp" + suffix;
    std::vector<VerificationReport> reps{rep};
    std::vector<double> times{seconds_since(t0)};
    if (vector_form) {
      t0 = Clock::now();
      auto vm = vector_measure_check(body, pair, psi, k, c.model, c.budget.area, c.budget.samples, c.seed);
      vm.name = "vector_measure" + suffix;
      reps.push_back(vm);
      times.push_back(seconds_since(t0));
    }
    for (std::size_t j = 0; j < reps.size(); ++j) {
      const auto row = row_from(reps[j]);
      r.results.push_back(row);
      t.rows.push_back({j == 0 ? "ibp" : "vector_measure", std::to_string(i), fmt(row.lhs), fmt(row.se_l),
                        fmt(row.rhs), fmt(row.se_r), fmt(row.diff), fmt(row.tol),
                        std::string(verdict_name(row.verdict)), fmt(times[j])});
    }
  }
  r.tables.push_back(std::move(t));
}

void surface(const RunConfig& c, Report& r) {
  const ConvexBody body = load_body(c.body, c.model);
  const Direction h = pick_direction(c, body, r.sidecar);
  const GraphPair pair = make_graph_pair(body, h);
  Table t{"surface", {"quantity", "value", "std_error", "method"}, {}};
  for (Which w : {Which::upper, Which::lower}) {
    if (!pair.finite(w)) continue;
    const auto e = epigraph_perimeter(pair, w, c.model, c.budget.area, c.seed);
    t.rows.push_back({w == Which::upper ? "upper_graph" : "lower_graph", fmt(e.value), fmt(e.std_error),
                      std::string(method_name(e.method))});
  }
  const auto total = total_boundary_measure(body, pair, c.model, c.budget.area, c.seed);
  t.rows.push_back({"total_boundary", fmt(total.value), fmt(total.std_error), std::string(method_name(total.method))});
  const int m = std::min(c.model.dim, 3);
  std::vector<Vec> F;
  if (!c.chain.empty()) {
    F = columns(orthonormal(c.chain.back()));
  } else {
    for (int i = 0; i < m; ++i) F.push_back(Vec::Unit(c.model.dim, i));
  }
  Budget sb = c.budget.area;
  sb.samples = c.budget.subspace_samples;
  const auto sec = subspace_hausdorff(body, F, {}, c.model, sb, c.seed);
  t.rows.push_back({"subspace_m" + std::to_string(F.size()), fmt(sec.value), fmt(sec.std_error),
                    std::string(method_name(sec.method))});
  if (static_cast<int>(F.size()) == c.model.dim) r.results.push_back(agreement("graph_vs_section", total, sec, 0.01));
  else
    r.results.push_back(bound_row("section_below_graph", sec.value, total.value, sec.std_error, total.std_error,
                                  std::max(0.0, sec.value - total.value), 3.0 * combined_se(sec, total),
                                  sec.value - total.value <= 3.0 * combined_se(sec, total)));
  r.tables.push_back(std::move(t));
}

void gradcheck(const RunConfig& c, Report& r) {
  const ConvexBody body = load_body(c.body, c.model);
  const Direction h = pick_direction(c, body, r.sidecar);
  const GraphPair pair = make_graph_pair(body, h);
  const auto pts = ray_cast_boundary(body, c.budget.points, c.seed, 1e-13);
  Table t{"gradcheck", {"index", "class", "denominator", "relative_error", "normal_error"}, {}};
  std::vector<double> rel;
  double worst_normal = 0.0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      const auto g = gradient_formula_check(body, pair, pts[i]);
      rel.push_back(g.relative_error);
      worst_normal = std::max(worst_normal, g.normal_error);
      t.rows.push_back({std::to_string(i), std::string(boundary_class_name(g.cls)), fmt(g.denominator),
                        fmt(g.relative_error), fmt(g.normal_error)});
    } catch (const CaseError&) {
      ++skipped;
      t.rows.push_back({std::to_string(i), "vertical", "", "", ""});
    } catch (const DegeneracyError&) {
      ++skipped;
      t.rows.push_back({std::to_string(i), "degenerate", "", "", ""});
    }
  }
  if (rel.empty()) throw DirectionError("gradcheck: no boundary point lies on a graph");
  auto sorted = rel;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const double median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  r.results.push_back(row_from(
      make_report("gradient_formula_median", EstimateWithError::exact(median), EstimateWithError::exact(0.0), 1e-3)));
  r.results.push_back(row_from(make_report("normal_formula_max", EstimateWithError::exact(worst_normal),
                                           EstimateWithError::exact(0.0), 1e-6)));
  r.sidecar["skipped_points"] = skipped;
  r.tables.push_back(std::move(t));
}

GaussianModel model_in_dim(const RunConfig& c, int d) {
  json m = c.effective.at("model");
  m["dim"] = d;
  if (m.contains("spectral_profile") && m["spectral_profile"].is_array()) m["spectral_profile"] = "brownian";
  return load_model(m);
}

void converge_dim(const RunConfig& c, Report& r) {
  const std::vector<int> dims = c.dims.empty() ? std::vector<int>{2, 3, 4} : c.dims;
  Table t{"converge_dim",
          {"dim", "area_formula", "se_area", "minkowski", "se_minkowski", "successive_diff", "wall_time_s"},
          {}};
  double prev = std::nan("");
  for (int d : dims) {
    const auto t0 = Clock::now();
    const GaussianModel model = model_in_dim(c, d);
    const ConvexBody body = load_body(c.body, model);
    RunConfig local = c;
    local.h.reset();
    local.candidates.clear();
    json side;
    const Direction h = pick_direction(local, body, side);
    const GraphPair pair = make_graph_pair(body, h);
    const auto area = total_boundary_measure(body, pair, model, c.budget.area, c.seed);
    const auto mk = minkowski_content_perimeter(body, c.budget.epsilons, c.budget.minkowski_samples, c.seed + 3);
    r.results.push_back(agreement("perimeter[dim=" + std::to_string(d) + "]", area, mk.estimate, 0.02));
    t.rows.push_back({std::to_string(d), fmt(area.value), fmt(area.std_error), fmt(mk.estimate.value),
                      fmt(mk.estimate.std_error), std::isnan(prev) ? "" : fmt(area.value - prev),
                      fmt(seconds_since(t0))});
    prev = area.value;
  }
  r.tables.push_back(std::move(t));
}

void converge_subspace(const RunConfig& c, Report& r) {
  const ConvexBody body = load_body(c.body, c.model);
  std::vector<std::vector<Vec>> chain;
  if (!c.chain.empty()) {
    for (const auto& F : c.chain) chain.push_back(columns(orthonormal(F)));
  } else {
    const Vec h = c.h ? *c.h : Vec::Unit(c.model.dim, 0);
    std::vector<Vec> seed_vectors{h};
    for (int i = 0; i < c.model.dim; ++i) seed_vectors.push_back(Vec::Unit(c.model.dim, i));
    std::vector<Vec> basis;
    for (const auto& v : seed_vectors) {
      Vec w = v;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) w -= b.dot(w) * b;
      if (w.norm() > 1e-8) basis.push_back(w / w.norm());
      if (basis.size() == static_cast<std::size_t>(std::min(c.model.dim, 3))) break;
    }
    for (std::size_t m = 1; m <= basis.size(); ++m) chain.emplace_back(basis.begin(), basis.begin() + static_cast<long>(m));
  }
  Budget sb = c.budget.area;
  sb.samples = c.budget.subspace_samples;
  Table t{"converge_subspace", {"m", "value", "std_error", "wall_time_s"}, {}};
  std::vector<EstimateWithError> vals;
  for (const auto& F : chain) {
    const auto t0 = Clock::now();
    vals.push_back(subspace_hausdorff(body, F, {}, c.model, sb, c.seed));
    t.rows.push_back({std::to_string(F.size()), fmt(vals.back().value), fmt(vals.back().std_error),
                      fmt(seconds_since(t0))});
  }
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    const double diff = std::max(0.0, vals[i].value - vals[i + 1].value);
    const double tol = 3.0 * combined_se(vals[i], vals[i + 1]);
    r.results.push_back(bound_row("monotone[m=" + std::to_string(chain[i].size()) + "<=" +
                                      std::to_string(chain[i + 1].size()) + "]",
                                  vals[i].value, vals[i + 1].value, vals[i].std_error, vals[i + 1].std_error, diff,
                                  tol, diff <= tol));
    r.results.back().lhs_method = std::string(method_name(vals[i].method));
    r.results.back().rhs_method = std::string(method_name(vals[i + 1].method));
  }
  r.tables.push_back(std::move(t));
}

void density(const RunConfig& c, Report& r) {
  const ConvexBody body = load_body(c.body, c.model);
  const auto pts = ray_cast_boundary(body, c.budget.points, c.seed, 1e-13);
  Table t{"density", {"index", "density", "std_error"}, {}};
  double lo = kInf;
  double hi = -kInf;
  double se_lo = 0.0;
  double se_hi = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto e = lebesgue_density(body, pts[i], c.budget.density_radius, c.budget.density_samples, c.seed + 1 + i);
    t.rows.push_back({std::to_string(i), fmt(e.value), fmt(e.std_error)});
    if (e.value - 3.0 * e.std_error < lo) {
      lo = e.value - 3.0 * e.std_error;
      se_lo = e.std_error;
    }
    if (e.value + 3.0 * e.std_error > hi) {
      hi = e.value + 3.0 * e.std_error;
      se_hi = e.std_error;
    }
  }
  if (pts.empty()) throw DirectionError("density: no ray left the body");
  r.results.push_back(bound_row("density_strictly_between_0_and_1", lo, hi, se_lo, se_hi, 0.0, 0.0,
                                lo > 0.0 && hi < 1.0));
  r.tables.push_back(std::move(t));
}

void converge_samples(const RunConfig& c, Report& r) {
  const ConvexBody body = load_body(c.body, c.model);
  const TestFunction psi = load_psi(c.psi, c.model.dim);
  const Direction k = Direction::from(c.k.front());
  const std::vector<std::size_t> grid =
      c.sample_grid.empty() ? std::vector<std::size_t>{10000, 100000, 1000000} : c.sample_grid;
  Table t{"converge_samples", {"samples", "lhs", "se_l", "wall_time_s"}, {}};
  std::vector<EstimateWithError> vals;
  for (std::size_t s : grid) {
    const auto t0 = Clock::now();
    vals.push_back(lhs_volume_integral(body, psi, k, c.model, s, c.seed));
    t.rows.push_back({std::to_string(s), fmt(vals.back().value), fmt(vals.back().std_error), fmt(seconds_since(t0))});
  }
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    const double ratio = vals[i + 1].std_error / vals[i].std_error;
    const double expect = std::sqrt(static_cast<double>(grid[i]) / static_cast<double>(grid[i + 1]));
    const double diff = std::abs(ratio - expect);
    r.results.push_back(bound_row("se_scaling[" + std::to_string(grid[i]) + "->" + std::to_string(grid[i + 1]) + "]",
                                  ratio, expect, 0.0, 0.0, diff, 0.2 * expect, diff <= 0.2 * expect));
  }
  r.tables.push_back(std::move(t));
}

void converge_epsilon(const RunConfig& c, Report& r) {
  const ConvexBody body = load_body(c.body, c.model);
  const Direction h = pick_direction(c, body, r.sidecar);
  const GraphPair pair = make_graph_pair(body, h);
  const auto mk = minkowski_content_perimeter(body, c.budget.epsilons, c.budget.minkowski_samples, c.seed + 3);
  const auto area = total_boundary_measure(body, pair, c.model, c.budget.area, c.seed);
  Table t{"converge_epsilon", {"epsilon", "quotient", "std_error"}, {}};
  for (std::size_t i = 0; i < mk.epsilons.size(); ++i)
    t.rows.push_back({fmt(mk.epsilons[i]), fmt(mk.quotients[i]), fmt(mk.quotient_se[i])});
  t.rows.push_back({"0", fmt(mk.estimate.value), fmt(mk.estimate.std_error)});
  r.results.push_back(agreement("epsilon_intercept", mk.estimate, area, 0.02));
  if (mk.warning) r.sidecar["warnings"].push_back(*mk.warning);
  r.tables.push_back(std::move(t));
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"perimeter",        "ibp",     "surface",
                                              "gradcheck",        "converge-dim", "converge-subspace",
                                              "density",          "converge-samples", "converge-epsilon"};
  return names;
}

Report run(const std::string& subcommand, const RunConfig& config) {
  Report r;
  r.subcommand = subcommand;
  r.config_hash = config_hash(config.effective);
  r.seed = config.seed;
  r.sidecar = {{"subcommand", subcommand},
               {"name", config.name},
               {"threads", thread_count()},
               {"isa", std::string(kernels::isa_name(kernels::active_isa()))},
               {"warnings", json::array()}};
  const auto t0 = Clock::now();
  if (subcommand == "perimeter") perimeter(config, r);
  else if (subcommand == "ibp") ibp(config, r);
  else if (subcommand == "surface") surface(config, r);
  else if (subcommand == "gradcheck") gradcheck(config, r);
  else if (subcommand == "converge-dim") converge_dim(config, r);
  else if (subcommand == "converge-subspace") converge_subspace(config, r);
  else if (subcommand == "density") density(config, r);
  else if (subcommand == "converge-samples") converge_samples(config, r);
  else if (subcommand == "converge-epsilon") converge_epsilon(config, r);
  else throw ParameterError("unknown subcommand '" + subcommand + "'");
  r.sidecar["wall_time_s"] = seconds_since(t0);
  return r;
}

}  // namespace wibp::cli
