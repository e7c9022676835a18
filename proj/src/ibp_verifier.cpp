#include "wibp/ibp_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wibp/kernels/kernels.hpp"
#include "wibp/parallel.hpp"

namespace wibp {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Verdict decide(double lhs, double rhs, double diff, double tol) {
  if (!std::isfinite(lhs) || !std::isfinite(rhs) || !std::isfinite(diff)) return Verdict::fail;
  if (tol > 0.25 * std::max({std::abs(lhs), std::abs(rhs), 0.01})) return Verdict::inconclusive;
  return diff <= tol ? Verdict::pass : Verdict::fail;
}

VerificationReport make_report(std::string name, const EstimateWithError& lhs, const EstimateWithError& rhs,
                               std::optional<double> fixed_tol) {
  VerificationReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_diff = std::abs(lhs.value - rhs.value);
  r.tolerance = fixed_tol ? *fixed_tol : 3.0 * combined_se(lhs, rhs);
  r.verdict = decide(lhs.value, rhs.value, r.abs_diff, r.tolerance);
  return r;
}

namespace {

double acceptance(const ConvexBody& body, std::size_t samples, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(body.dim());
  const auto counts = map_chunks<std::size_t>(chunk_count(samples), [&](std::size_t c) {
    const std::size_t m = std::min(kChunkSize, samples - c * kChunkSize);
    std::vector<double> block(n * m);
    std::vector<std::uint8_t> mask(m);
    auto rng = chunk_rng(seed, c);
    fill_gaussian_block(rng, n, m, block.data());
    body.contains_batch(block.data(), m, mask.data());
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
  });
  std::size_t total = 0;
  for (auto v : counts) total += v;
  return static_cast<double>(total) / static_cast<double>(samples);
}

nlohmann::json to_json(const Vec& v) {
  auto a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

GraphValue graph_gradient_shrinking(const GraphPair& pair, Which which, const Vec& y) {
  double step = kDefaultFdStep;
  for (;;) {
    try {
      return graph_value_and_gradient(pair, which, y, step);
    } catch (const MarginError&) {
      step *= 0.25;
      if (step < 1e-11) throw;
    }
  }
}

}  // namespace

EstimateWithError lhs_volume_integral(const ConvexBody& body, const TestFunction& psi, const Direction& k,
                                      const GaussianModel& model, std::size_t samples, std::uint64_t seed) {
  model.validate();
  if (model.dim != body.dim() || k.dim() != body.dim())
    throw DimensionError("lhs_volume_integral: model, body and k dimensions differ");
  if (samples < 2) throw ParameterError("lhs_volume_integral: at least 2 samples are required");
  const double acc = acceptance(body, kPreflightSamples, seed ^ 0x9e3779b97f4a7c15ull);
  if (acc < kMinAcceptance) {
    std::ostringstream os;
    os << "lhs_volume_integral: estimated Gaussian mass of the body is " << acc
       << " (below 1e-3); translate the body toward the origin or enlarge it";
    throw MassError(os.str());
  }
  const auto n = static_cast<std::size_t>(body.dim());
  const auto& ker = kernels::active();
  const std::vector<double> zero(n, 0.0);
  const auto parts = map_chunks<SampleStats>(chunk_count(samples), [&](std::size_t c) {
    const std::size_t m = std::min(kChunkSize, samples - c * kChunkSize);
    std::vector<double> block(n * m);
    std::vector<std::uint8_t> mask(m);
    std::vector<double> kx(m), dpsi(m, 0.0), val(m, 0.0), out(m);
    auto rng = chunk_rng(seed, c);
    fill_gaussian_block(rng, n, m, block.data());
    body.contains_batch(block.data(), m, mask.data());
    ker.affine_dot(block.data(), m, n, m, k.vec().data(), zero.data(), kx.data());
    Vec x(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < m; ++j) {
      if (!mask[j]) continue;
      for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = block[i * m + j];
      dpsi[j] = directional_derivative(psi, k.vec(), x);
      val[j] = psi(x);
    }
    ker.mul_sub(dpsi.data(), val.data(), kx.data(), m, out.data());
    const kernels::Moments mo = ker.masked_moments(out.data(), mask.data(), m);
    SampleStats s;
    s.n = m;
    s.sum = mo.sum;
    s.sumsq = mo.sumsq;
    return s;
  });
  return merge_all(parts).estimate(seed);
}

EstimateWithError rhs_surface_integral(const ConvexBody& body, const GraphPair& pair, const TestFunction& psi,
                                       const Direction& k, const GaussianModel& model, const Budget& budget,
                                       std::uint64_t seed, RhsRoute route, bool check_vertical) {
  if (k.dim() != body.dim()) throw DimensionError("rhs_surface_integral: k dimension differs from the body");
  if (!pair.finite(Which::upper) && !pair.finite(Which::lower))
    throw CaseError("rhs_surface_integral: both graphs are infinite along this direction");
  if (check_vertical) {
    const auto samples = sample_boundary(body, budget.boundary_samples, seed ^ 0x5a5a5a5aull);
    const auto vm = vertical_mass(samples, pair.direction(), seed);
    if (vm.value > 0.01) {
      std::ostringstream os;
      os << "rhs_surface_integral: vertical mass " << vm.value
         << " along the chosen direction exceeds 0.01; choose a different direction";
      throw DirectionError(os.str());
    }
  }
  EstimateWithError out{0.0, 0.0, 0, seed, Method::closed_form};
  bool first = true;
  for (Which w : {Which::upper, Which::lower}) {
    if (!pair.finite(w)) continue;
    GraphIntegrand f;
    double sign = 1.0;
    if (route == RhsRoute::graph_normal) {
      f = [&](const GraphPoint& gp) { return psi(gp.x) * gp.normal.dot(k.vec()); };
      sign = w == Which::upper ? 1.0 : -1.0;
    } else {
      f = [&](const GraphPoint& gp) { return psi(gp.x) * outward_normal_fd(body, gp.x).dot(k.vec()); };
    }
    const auto e = area_formula_integral(pair, w, f, model, budget, seed);
    out.value += sign * e.value;
    out.std_error += e.std_error;
    out.n_samples += e.n_samples;
    if (first) out.method = e.method;
    first = false;
  }
  return out;
}

VerificationReport verify_ibp(const ConvexBody& body, const TestFunction& psi, const Direction& k,
                              const GaussianModel& model, const IbpConfig& config) {
  nlohmann::json meta;
  std::optional<Direction> h = config.pinned_h;
  if (h) {
    meta["h_source"] = "pinned";
  } else {
    const auto cands = config.candidates.empty() ? default_candidates(body.dim(), config.seed + 2) : config.candidates;
    const auto choice = choose_direction(body, cands, config.budget.boundary_samples, config.seed + 2);
    h = choice.direction;
    meta["h_source"] = "chosen";
    meta["h_vertical_mass"] = choice.vertical_mass.value;
  }
  const GraphPair pair = make_graph_pair(body, *h);
  const auto lhs = lhs_volume_integral(body, psi, k, model, config.samples, config.seed);
  const auto rhs = rhs_surface_integral(body, pair, psi, k, model, config.budget, config.seed + 1, config.route);
  auto report = make_report("ibp", lhs, rhs, config.fixed_tolerance);
  meta["psi"] = psi.id;
  meta["k"] = to_json(k.vec());
  meta["h"] = to_json(h->vec());
  meta["dim"] = body.dim();
  meta["case"] = std::string(case_tag_name(pair.case_tag()));
  meta["seeds"] = {{"lhs", config.seed}, {"rhs", config.seed + 1}};
  meta["rhs_method"] = std::string(method_name(rhs.method));
  meta["route"] = config.route == RhsRoute::graph_normal ? "graph_normal" : "gauge_gradient";
  report.metadata = std::move(meta);
  return report;
}

GradientCheck gradient_formula_check(const ConvexBody& body, const GraphPair& pair, const Vec& x, double tol) {
  GradientCheck out;
  out.cls = boundary_classify(body, pair, x, tol);
  if (out.cls == BoundaryClass::vertical)
    throw CaseError("gradient_formula_check: x lies on the vertical part of the boundary");
  const Direction& h = pair.direction();
  const Vec& hv = h.vec();
  const SplitPoint sp = split_along(x, h);
  const Which which = out.cls == BoundaryClass::upper_graph ? Which::upper : Which::lower;
  const GraphValue gv = graph_gradient_shrinking(pair, which, sp.y);
  const Vec& c = body.center();
  const double hc = h(c);
  const Vec yc = sp.y - (c - hc * hv);
  Vec nu = (hv - gv.gradient) / std::sqrt(1.0 + gv.gradient.squaredNorm());
  if (which == Which::upper) {
    out.denominator = -gv.gradient.dot(yc) + (gv.value - hc);
    out.formula = (hv - gv.gradient) / out.denominator;
  } else {
    out.denominator = gv.gradient.dot(yc) - (gv.value - hc);
    out.formula = (gv.gradient - hv) / out.denominator;
    nu = -nu;
  }
  if (!(out.denominator >= 1e-8)) {
    std::ostringstream os;
    os << "gradient_formula_check: denominator " << out.denominator << " is not positive";
    throw DegeneracyError(os.str());
  }
  const double step = std::max(std::cbrt(tol), 1e-4);
  out.fd = minkowski_gradient_fd(body, x, step, tol);
  out.relative_error = (out.formula - out.fd).norm() / out.fd.norm();
  out.normal_error = (out.formula / out.formula.norm() - nu).norm();
  return out;
}

VerificationReport vector_measure_check(const ConvexBody& body, const GraphPair& pair, const TestFunction& phi,
                                        const Direction& k, const GaussianModel& model, const Budget& budget,
                                        std::size_t samples, std::uint64_t seed) {
  const auto lhs = lhs_volume_integral(body, phi, k, model, samples, seed);
  // [D 1_Omega, k] integrated against phi: -U + L
  auto term = [&](Which w) {
    if (!pair.finite(w)) return EstimateWithError::exact(0.0);
    return area_formula_integral(
        pair, w, [&](const GraphPoint& gp) { return phi(gp.x) * gp.normal.dot(k.vec()); }, model, budget, seed + 1);
  };
  const auto upper = term(Which::upper);
  const auto lower = term(Which::lower);
  const double measure = -upper.value + lower.value;
  EstimateWithError rhs{0.0 - measure, upper.std_error + lower.std_error, upper.n_samples + lower.n_samples, seed + 1,
                        pair.finite(Which::upper) ? upper.method : lower.method};
  auto report = make_report("vector_measure", lhs, rhs);
  report.metadata = {{"psi", phi.id},
                     {"k", to_json(k.vec())},
                     {"h", to_json(pair.direction().vec())},
                     {"dim", body.dim()},
                     {"case", std::string(case_tag_name(pair.case_tag()))},
                     {"upper_term", upper.value},
                     {"lower_term", lower.value},
                     {"measure_on_k", measure}};
  return report;
}

}  // namespace wibp
