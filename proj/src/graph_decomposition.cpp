#include "wibp/graph_decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "wibp/parallel.hpp"

namespace wibp {

std::string_view case_tag_name(CaseTag tag) {
  switch (tag) {
    case CaseTag::both_infinite: return "both_infinite";
    case CaseTag::g_finite_only: return "g_finite_only";
    case CaseTag::f_finite_only: return "f_finite_only";
    case CaseTag::both_finite: return "both_finite";
  }
  return "unknown";
}

std::string_view boundary_class_name(BoundaryClass c) {
  switch (c) {
    case BoundaryClass::upper_graph: return "upper_graph";
    case BoundaryClass::lower_graph: return "lower_graph";
    case BoundaryClass::vertical: return "vertical";
  }
  return "unknown";
}

double Section::midpoint() const {
  const bool lf = std::isfinite(lower);
  const bool uf = std::isfinite(upper);
  if (lf && uf) return 0.5 * (lower + upper);
  if (uf) return upper - 1.0;
  if (lf) return lower + 1.0;
  return 0.0;
}

namespace {

// Central differences at steps h0 / 1.4^i, extrapolated to zero step.
template <class F>
double ridders(F&& central, double h0) {
  constexpr int kTab = 8;
  constexpr double kCon = 1.4, kCon2 = kCon * kCon;
  double a[kTab][kTab];
  double step = h0;
  a[0][0] = central(step);
  double best = a[0][0];
  double err = std::numeric_limits<double>::infinity();
  for (int i = 1; i < kTab; ++i) {
    step /= kCon;
    a[0][i] = central(step);
    double fac = kCon2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= kCon2;
      const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) break;
  }
  return best;
}

struct PlaneMax {
  double value = 0.0;
  double theta = 0.0;
};

// Maximizes q(theta) = min(rho, reach) cos(theta), rho the radial function in
// direction cos(theta) u + sin(theta) h: the extent along u of the body cut
// to the ball B(c, reach) within the plane c + span(u, h). The cut body is
// convex, so q is unimodal on (-pi/2, pi/2). Stops early once q exceeds
// `enough`.
PlaneMax plane_max(const ConvexBody& body, const Vec& u, const Vec& h, double tol, double enough) {
  auto q = [&](double theta) {
    const double ct = std::cos(theta);
    const Vec v = ct * u + std::sin(theta) * h;
    const double rho = body.radial(v, tol);
    return std::min(rho, body.reach()) * ct;
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = -0.5 * std::numbers::pi;
  double b = 0.5 * std::numbers::pi;
  PlaneMax best{q(0.0), 0.0};
  if (best.value > enough) return best;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = q(x1);
  double f2 = q(x2);
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
      if (f > best.value) best = {f, x};
    }
    if (best.value > enough) return best;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = q(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = q(x1);
    }
  }
  for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (f > best.value) best = {f, x};
  }
  return best;
}

double bisect_endpoint(const ConvexBody& body, const Vec& y, const Vec& h, double inside, double outside,
                       double tol) {
  while (std::abs(outside - inside) > tol) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    (body.contains(y + mid * h) ? inside : outside) = mid;
  }
  return 0.5 * (inside + outside);
}

}  // namespace

Section section_interval(const ConvexBody& body, const Direction& h, const Vec& y, double tol,
                         std::optional<double> hint) {
  require_same_dim(y, h.vec(), "section_interval");
  if (!(tol > 0.0)) throw ParameterError("section_interval: tol must be positive");
  if (std::abs(h(y)) > 1e-10 * std::max(1.0, y.norm()))
    throw PreconditionError("section_interval: y is not orthogonal to h");
  const Vec& hv = h.vec();
  const Vec& c = body.center();
  const double tc = h(c);

  std::optional<double> t_in;
  if (hint && std::isfinite(*hint) && body.contains(y + *hint * hv)) t_in = *hint;
  if (!t_in && body.contains(y + tc * hv)) t_in = tc;
  if (!t_in) {
    const Vec w = y - (c - tc * hv);
    const double s = w.norm();
    if (s > 0.0) {
      const Vec u = w / s;
      const PlaneMax pm = plane_max(body, u, hv, 1e-9, s * (1.0 + 1e-9));
      if (pm.value > s) {
        const double t = tc + s * std::tan(pm.theta);
        if (body.contains(y + t * hv)) {
          t_in = t;
        } else {
          // the crossing point sits within rounding of the boundary; nudge
          // toward the center along the segment
          const double t2 = tc + 0.5 * s * std::tan(pm.theta);
          if (body.contains(y + t2 * hv)) t_in = t2;
        }
      }
    }
  }
  if (!t_in) return {};

  Section sec;
  sec.empty = false;
  if (body.bounded()) {
    const double bound = body.line_bound(y);
    if (body.contains(y + bound * hv) || body.contains(y - bound * hv))
      throw OracleIntegrityError("section_interval: inside point beyond the certified outer radius");
    sec.upper = bisect_endpoint(body, y, hv, *t_in, bound, tol);
    sec.lower = bisect_endpoint(body, y, hv, *t_in, -bound, tol);
  } else {
    const double up = *t_in + body.reach();
    const double down = *t_in - body.reach();
    sec.upper = body.contains(y + up * hv) ? kInf : bisect_endpoint(body, y, hv, *t_in, up, tol);
    sec.lower = body.contains(y + down * hv) ? -kInf : bisect_endpoint(body, y, hv, *t_in, down, tol);
  }
  if (!(sec.lower <= *t_in && *t_in <= sec.upper))
    throw OracleIntegrityError("section_interval: inside point outside the reported interval");
  return sec;
}

CaseTag classify_case(const ConvexBody& body, const Direction& h, int probes, std::uint64_t seed,
                      double tol) {
  if (probes < 8) throw ParameterError("classify_case: at least 8 probes are required");
  if (h.dim() != body.dim()) throw DimensionError("classify_case: direction dimension mismatch");
  const int n = body.dim();
  const auto dirs = random_directions(n, static_cast<std::size_t>(probes), seed);
  std::optional<CaseTag> tag;
  for (int k = 0; k < probes; ++k) {
    const Vec& u = dirs[static_cast<std::size_t>(k)];
    // alternate between the interior ball and halfway to the boundary
    double r = 0.9 * body.margin();
    if (k % 2 == 1) {
      const double rho = body.radial(u, 1e-9);
      r = std::isfinite(rho) ? 0.5 * rho : 2.0 * body.margin();
      if (!std::isfinite(rho) && !body.contains(body.center() + r * u)) r = 0.9 * body.margin();
    }
    const Vec p = body.center() + r * u;
    const SplitPoint sp = split_along(p, h);
    const Section sec = section_interval(body, h, sp.y, tol, sp.t);
    if (sec.empty) throw OracleIntegrityError("classify_case: interior probe has an empty section");
    const bool uf = std::isfinite(sec.upper);
    const bool lf = std::isfinite(sec.lower);
    const CaseTag here = uf && lf ? CaseTag::both_finite
                         : uf     ? CaseTag::f_finite_only
                         : lf     ? CaseTag::g_finite_only
                                  : CaseTag::both_infinite;
    if (tag && *tag != here)
      throw OracleIntegrityError("classify_case: probes disagree on the case (" +
                                 std::string(case_tag_name(*tag)) + " vs " + std::string(case_tag_name(here)) + ")");
    tag = here;
  }
  return *tag;
}

GraphPair::GraphPair(ConvexBody body, Direction h, CaseTag tag, double tol)
    : body_(std::move(body)), h_(std::move(h)), tag_(tag), tol_(tol), basis_(complement_basis(h_)) {
  if (h_.dim() != body_.dim()) throw DimensionError("GraphPair: direction dimension mismatch");
}

bool GraphPair::finite(Which which) const {
  if (which == Which::upper) return tag_ == CaseTag::both_finite || tag_ == CaseTag::f_finite_only;
  return tag_ == CaseTag::both_finite || tag_ == CaseTag::g_finite_only;
}

Section GraphPair::section(const Vec& y, std::optional<double> hint) const {
  return section_interval(body_, h_, y, tol_, hint);
}

double GraphPair::value(Which which, const Vec& y) const {
  if (!finite(which)) throw CaseError("graph value requested for an infinite graph");
  const Section s = section(y);
  if (s.empty) throw PreconditionError("graph value requested outside the domain");
  return which == Which::upper ? s.upper : s.lower;
}

Vec GraphPair::domain_center() const {
  const Vec& c = body_.center();
  return c - h_(c) * h_.vec();
}

double GraphPair::domain_radial(const Vec& u) const {
  return plane_max(body_, u, h_.vec(), std::max(tol_, 1e-13), kInf).value;
}

GraphPair make_graph_pair(const ConvexBody& body, const Direction& h, double tol, int probes,
                          std::uint64_t seed) {
  return GraphPair(body, h, classify_case(body, h, probes, seed, tol), tol);
}

GraphValue graph_value_and_gradient(const GraphPair& pair, Which which, const Vec& y, double fd_step,
                                    std::optional<Section> at_y) {
  if (!(fd_step > 0.0)) throw ParameterError("graph_value_and_gradient: fd_step must be positive");
  if (!pair.finite(which)) throw CaseError("graph_value_and_gradient: the selected graph is infinite");
  const Section s = at_y ? *at_y : pair.section(y);
  if (s.empty) throw MarginError("graph_value_and_gradient: y is outside the domain");
  const double hint = s.midpoint();
  auto pick = [&](const Section& sec) { return which == Which::upper ? sec.upper : sec.lower; };
  GraphValue out{pick(s), Vec::Zero(y.size())};
  const Mat& basis = pair.basis();
  const double stencil_tol = std::min(pair.tol(), 1e-15);
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    const Vec e = basis.col(k);
    auto central = [&](double step) {
      const Section sp = section_interval(pair.body(), pair.direction(), y + step * e, stencil_tol, hint);
      const Section sm = section_interval(pair.body(), pair.direction(), y - step * e, stencil_tol, hint);
      if (sp.empty || sm.empty)
        throw MarginError("graph_value_and_gradient: stencil point left the domain; shrink fd_step or move y");
      return (pick(sp) - pick(sm)) / (2.0 * step);
    };
    out.gradient += ridders(central, fd_step) * e;
  }
  return out;
}

BoundaryClass boundary_classify(const ConvexBody& body, const GraphPair& pair, const Vec& x, double tol) {
  const double p = minkowski_functional(body, x, tol);
  if (std::abs(p - 1.0) > 10.0 * tol)
    throw PreconditionError("boundary_classify: x is not on the boundary (gauge " + std::to_string(p) + ")");
  const SplitPoint sp = split_along(x, pair.direction());
  const Section s = pair.section(sp.y);
  if (s.empty) return BoundaryClass::vertical;
  const double atol = 100.0 * tol;
  if (std::isfinite(s.upper) && std::abs(sp.t - s.upper) <= atol) return BoundaryClass::upper_graph;
  if (std::isfinite(s.lower) && std::abs(sp.t - s.lower) <= atol) return BoundaryClass::lower_graph;
  return BoundaryClass::vertical;
}

Vec outward_normal_fd(const ConvexBody& body, const Vec& x, double gauge_tol) {
  const Vec g = minkowski_gradient_fd(body, x, 2.0 * std::cbrt(gauge_tol), gauge_tol);
  const double n = g.norm();
  if (!(n > 0.0)) throw OracleIntegrityError("outward_normal_fd: vanishing gauge gradient");
  return g / n;
}

std::vector<BoundarySample> sample_boundary(const ConvexBody& body, std::size_t rays, std::uint64_t seed) {
  const int n = body.dim();
  const auto dirs = random_directions(n, rays, seed);
  std::vector<std::optional<BoundarySample>> slots(rays);
  constexpr std::size_t kRayChunk = 128;
  parallel_for_chunks(chunk_count(rays, kRayChunk), [&](std::size_t c) {
    const std::size_t end = std::min(rays, (c + 1) * kRayChunk);
    for (std::size_t j = c * kRayChunk; j < end; ++j) {
      const Vec& u = dirs[j];
      const double rho = body.radial(u, 1e-13);
      if (!std::isfinite(rho)) continue;
      const Vec b = body.center() + rho * u;
      const Vec nu = outward_normal_fd(body, b);
      const double cosine = nu.dot(u);
      if (!(cosine > 1e-12)) continue;
      const double w = gaussian_density(b) * std::pow(rho, n - 1) / cosine;
      slots[j] = BoundarySample{b, nu, w};
    }
  });
  std::vector<BoundarySample> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  return out;
}

EstimateWithError vertical_mass(const std::vector<BoundarySample>& samples, const Direction& h,
                                std::uint64_t seed) {
  const double limit = std::sin(kVerticalAngle);
  double sw = 0.0;
  double swv = 0.0;
  for (const auto& s : samples) {
    sw += s.weight;
    if (std::abs(s.normal.dot(h.vec())) <= limit) swv += s.weight;
  }
  if (!(sw > 0.0)) return {0.0, 0.0, samples.size(), seed, Method::monte_carlo};
  const double ratio = swv / sw;
  // delta-method standard error of the ratio estimator
  const double nn = static_cast<double>(samples.size());
  const double wbar = sw / nn;
  double acc = 0.0;
  for (const auto& s : samples) {
    const double v = std::abs(s.normal.dot(h.vec())) <= limit ? 1.0 : 0.0;
    const double r = s.weight * (v - ratio);
    acc += r * r;
  }
  const double se = nn > 1 ? std::sqrt(acc / (nn - 1.0) / nn) / wbar : 0.0;
  return {ratio, se, samples.size(), seed, Method::monte_carlo};
}

DirectionChoice choose_direction(const ConvexBody& body, const std::vector<Direction>& candidates,
                                 std::size_t boundary_samples, std::uint64_t seed) {
  if (candidates.empty()) throw ParameterError("choose_direction: candidate list is empty");
  const auto samples = sample_boundary(body, boundary_samples, seed);
  std::vector<EstimateWithError> est;
  std::size_t best = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k].dim() != body.dim()) throw DimensionError("choose_direction: candidate dimension mismatch");
    est.push_back(vertical_mass(samples, candidates[k], seed));
    if (est[k].value < est[best].value) best = k;
  }
  if (est[best].value > 0.5)
    throw DirectionError("choose_direction: every candidate carries vertical mass above 0.5; supply more candidates");
  return {candidates[best], est[best], est, best};
}

std::vector<Direction> default_candidates(int dim, std::uint64_t seed, int random_count) {
  std::vector<Direction> out;
  for (int i = 0; i < dim; ++i) out.push_back(Direction::axis(dim, i));
  for (const auto& u : random_directions(dim, static_cast<std::size_t>(random_count), seed))
    out.push_back(Direction::from(u));
  return out;
}

}  // namespace wibp
