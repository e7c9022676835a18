#include "wibp/surface_measure.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wibp/parallel.hpp"
#include "wibp/quadrature.hpp"

namespace wibp {
namespace {

using NodeFn = std::function<double(const Vec& y, double gap)>;

constexpr std::size_t kDirChunk = 8;

int tensor_order(int d, int order) { return d >= 3 ? std::max(order / 2, 8) : order; }

EstimateWithError integrate_full(const Mat& basis, int order, const NodeFn& fn) {
  const int d = static_cast<int>(basis.cols());
  const int q = tensor_order(d, order);
  const auto& rule = quad::gauss_hermite(q);
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(q);
  const auto parts = map_chunks<double>(chunk_count(total), [&](std::size_t c) {
    const std::size_t end = std::min(total, (c + 1) * kChunkSize);
    double acc = 0.0;
    Vec t(d);
    for (std::size_t idx = c * kChunkSize; idx < end; ++idx) {
      std::size_t rest = idx;
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        const std::size_t k = rest % static_cast<std::size_t>(q);
        rest /= static_cast<std::size_t>(q);
        t[i] = rule.nodes[k];
        w *= rule.weights[k];
      }
      acc += w * fn(basis * t, kInf);
    }
    return acc;
  });
  double sum = 0.0;
  for (double p : parts) sum += p;
  return EstimateWithError::exact(sum, Method::gauss_hermite, total);
}

EstimateWithError integrate_polar(const GraphPair& pair, int order, const NodeFn& fn) {
  const Mat& basis = pair.basis();
  const int d = static_cast<int>(basis.cols());
  const Vec yc = pair.domain_center();
  const double trunc = yc.norm() + kDomainTruncation;
  const quad::SphereRule sr = quad::sphere_rule(d, d == 3 ? order / 2 : order);
  const quad::Rule1D gl = quad::gauss_legendre(order, 0.0, 0.5 * std::numbers::pi);
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * d);
  const std::size_t dirs = sr.directions.size();
  std::vector<double> per_dir(dirs, 0.0);
  parallel_for_chunks(chunk_count(dirs, kDirChunk), [&](std::size_t c) {
    const std::size_t end = std::min(dirs, (c + 1) * kDirChunk);
    for (std::size_t k = c * kDirChunk; k < end; ++k) {
      const Vec u = basis * sr.directions[k];
      const double reach = pair.domain_radial(u);
      const double r_max = std::min(reach, trunc);
      double acc = 0.0;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double th = gl.nodes[i];
        const double r = r_max * std::sin(th);
        const Vec y = yc + r * u;
        const double jac = r_max * std::cos(th) * std::pow(r, d - 1);
        const double dens = norm * std::exp(-0.5 * y.squaredNorm());
        if (jac * dens == 0.0) continue;
        acc += gl.weights[i] * jac * dens * fn(y, reach - r);
      }
      per_dir[k] = sr.weights[k] * acc;
    }
  });
  double sum = 0.0;
  for (double v : per_dir) sum += v;
  return EstimateWithError::exact(sum, Method::polar_gauss, dirs * gl.nodes.size());
}

EstimateWithError integrate_mc(const GaussianModel& model, const Direction& h, std::size_t samples,
                               std::uint64_t seed, const NodeFn& fn) {
  if (samples < 2) throw ParameterError("Monte Carlo budget needs at least 2 samples");
  const Vec hv = h.vec();
  const auto ys = sample_gaussian(model, std::span<const Vec>(&hv, 1), samples, seed);
  const auto parts = map_chunks<SampleStats>(chunk_count(samples), [&](std::size_t c) {
    SampleStats s;
    const std::size_t end = std::min(samples, (c + 1) * kChunkSize);
    for (std::size_t j = c * kChunkSize; j < end; ++j) s.add(fn(ys[j], kInf));
    return s;
  });
  return merge_all(parts).estimate(seed);
}

bool domain_is_full(const GraphPair& pair) {
  const Vec yc = pair.domain_center();
  const double need = yc.norm() + kDomainTruncation;
  const Mat& b = pair.basis();
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    const Vec e = b.col(i);
    if (pair.domain_radial(e) < need || pair.domain_radial(-e) < need) return false;
  }
  return true;
}

double graph_node(const GraphPair& pair, Which which, const GraphIntegrand& integrand, const Vec& y, double gap,
                  double fd_step) {
  const Section s = pair.section(y);
  if (s.empty) return 0.0;
  const double t = which == Which::upper ? s.upper : s.lower;
  if (!std::isfinite(t)) return 0.0;
  double step = fd_step;
  if (std::isfinite(gap)) step = std::min(step, 0.2 * std::max(gap, 0.0));
  GraphValue gv;
  for (;;) {
    if (step < 1e-11) return 0.0;
    try {
      gv = graph_value_and_gradient(pair, which, y, step, s);
      break;
    } catch (const MarginError&) {
      step *= 0.25;
    }
  }
  const Vec& hv = pair.direction().vec();
  const double den = std::sqrt(1.0 + gv.gradient.squaredNorm());
  GraphPoint gp{y, t, y + t * hv, gv.gradient, (hv - gv.gradient) / den};
  return integrand(gp) * gauss1(t) * den;
}

void check_model(const GaussianModel& model, int dim, const char* what) {
  model.validate();
  if (model.dim != dim) throw DimensionError(std::string(what) + ": model dimension differs from the body");
}

}  // namespace

EstimateWithError area_formula_integral(const GraphPair& pair, Which which, const GraphIntegrand& integrand,
                                        const GaussianModel& model, const Budget& budget, std::uint64_t seed) {
  if (!pair.finite(which)) throw CaseError("area_formula_integral: the selected graph is infinite");
  check_model(model, pair.body().dim(), "area_formula_integral");
  if (budget.order < 2) throw ParameterError("area_formula_integral: quadrature order must be at least 2");
  const NodeFn fn = [&](const Vec& y, double gap) {
    return graph_node(pair, which, integrand, y, gap, budget.fd_step);
  };
  const int d = pair.complement_dim();
  if (d == 0) {
    return EstimateWithError::exact(fn(Vec::Zero(pair.body().dim()), kInf), Method::gauss_hermite, 1);
  }
  if (d <= 3) {
    if (domain_is_full(pair)) return integrate_full(pair.basis(), budget.order, fn);
    return integrate_polar(pair, budget.order, fn);
  }
  return integrate_mc(model, pair.direction(), budget.samples, seed, fn);
}

EstimateWithError epigraph_perimeter(const GraphPair& pair, Which which, const GaussianModel& model,
                                     const Budget& budget, std::uint64_t seed) {
  return area_formula_integral(
      pair, which, [](const GraphPoint&) { return 1.0; }, model, budget, seed);
}

EstimateWithError epigraph_perimeter(const GraphFunction& f, const Direction& h, const GaussianModel& model,
                                     const Budget& budget, std::uint64_t seed) {
  if (!f.value) throw ParameterError("epigraph_perimeter: function has no evaluator");
  check_model(model, h.dim(), "epigraph_perimeter");
  const Mat basis = complement_basis(h);
  const NodeFn fn = [&](const Vec& y, double) {
    if (f.domain && !f.domain(y)) return 0.0;
    const double t = f.value(y);
    Vec g;
    if (f.gradient) {
      g = f.gradient(y);
      g -= h(g) * h.vec();
    } else {
      g = Vec::Zero(y.size());
      for (Eigen::Index k = 0; k < basis.cols(); ++k) {
        const Vec e = basis.col(k);
        g += (f.value(y + budget.fd_step * e) - f.value(y - budget.fd_step * e)) / (2.0 * budget.fd_step) * e;
      }
    }
    return gauss1(t) * std::sqrt(1.0 + g.squaredNorm());
  };
  const int d = static_cast<int>(basis.cols());
  if (d == 0) return EstimateWithError::exact(fn(Vec::Zero(h.dim()), kInf), Method::gauss_hermite, 1);
  if (d <= 3) return integrate_full(basis, budget.order, fn);
  return integrate_mc(model, h, budget.samples, seed, fn);
}

namespace {

// Minimizes fn over R^m from x0; returns the best vertex.
Vec nelder_mead(const std::function<double(const Vec&)>& fn, const Vec& x0, double step, int iters) {
  const int m = static_cast<int>(x0.size());
  std::vector<Vec> pts{x0};
  for (int i = 0; i < m; ++i) pts.push_back(x0 + step * Vec::Unit(m, i));
  std::vector<double> val;
  for (const auto& p : pts) val.push_back(fn(p));
  std::vector<int> idx(static_cast<std::size_t>(m + 1));
  for (int it = 0; it < iters; ++it) {
    for (int i = 0; i <= m; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return val[static_cast<std::size_t>(a)] < val[static_cast<std::size_t>(b)]; });
    const auto best = static_cast<std::size_t>(idx.front());
    const auto worst = static_cast<std::size_t>(idx.back());
    const auto second = static_cast<std::size_t>(idx[static_cast<std::size_t>(m - 1)]);
    double spread = 0.0;
    for (const auto& p : pts) spread = std::max(spread, (p - pts[best]).norm());
    if (spread < 1e-9) break;
    Vec centroid = Vec::Zero(m);
    for (int i = 0; i <= m; ++i)
      if (static_cast<std::size_t>(i) != worst) centroid += pts[static_cast<std::size_t>(i)];
    centroid /= m;
    const Vec xr = centroid + (centroid - pts[worst]);
    const double fr = fn(xr);
    if (fr < val[best]) {
      const Vec xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = fn(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
    } else if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
    } else {
      const Vec xc = centroid + 0.5 * (pts[worst] - centroid);
      const double fc = fn(xc);
      if (fc < val[worst]) {
        pts[worst] = xc;
        val[worst] = fc;
      } else {
        for (int i = 0; i <= m; ++i) {
          const auto s = static_cast<std::size_t>(i);
          if (s == best) continue;
          pts[s] = pts[best] + 0.5 * (pts[s] - pts[best]);
          val[s] = fn(pts[s]);
        }
      }
    }
  }
  const auto it = std::min_element(val.begin(), val.end());
  return pts[static_cast<std::size_t>(it - val.begin())];
}

struct SectionGeometry {
  const ConvexBody& body;
  const Mat& F;
  const Vec& y;
  Vec z0;
  double limit;

  Vec ambient(const Vec& z) const { return y + F * z; }

  // distance from z0 to the section boundary along the unit vector v of R^m
  double radial(const Vec& v) const {
    const Vec dir = F * v;
    const Vec base = ambient(z0);
    if (body.contains(base + limit * dir)) return kInf;
    double lo = 0.0;
    double hi = limit;
    while (hi - lo > 1e-11 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      (body.contains(base + mid * dir) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

double section_boundary_measure(const ConvexBody& body, const Mat& F, const Vec& y,
                                const std::function<bool(const Vec&)>& region, const Budget& budget) {
  const int m = static_cast<int>(F.cols());
  auto in_region = [&](const Vec& x) { return !region || region(x); };
  if (m == 1) {
    const Direction d = Direction::from(F.col(0));
    const Section s = section_interval(body, d, y, 1e-12);
    if (s.empty) return 0.0;
    double acc = 0.0;
    for (double e : {s.lower, s.upper}) {
      if (std::isfinite(e) && in_region(y + e * d.vec())) acc += gauss1(e);
    }
    return acc;
  }
  const Vec start = F.transpose() * body.center();
  auto gauge = [&](const Vec& z) { return minkowski_functional(body, y + F * z, 1e-9); };
  Vec z0 = start;
  if (!body.contains(y + F * z0)) {
    z0 = nelder_mead(gauge, start, std::max(body.margin(), 0.5), 400 * m);
    if (!body.contains(y + F * z0)) return 0.0;
  }
  const double limit =
      body.bounded() ? 2.0 * (*body.outer_radius() + body.center().norm()) + y.norm() + z0.norm() + 1.0 : body.reach();
  const SectionGeometry geo{body, F, y, z0, limit};
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * m);
  auto dens = [&](const Vec& z) { return norm * std::exp(-0.5 * z.squaredNorm()); };

  if (m == 2) {
    const int na = budget.circle_angles;
    std::vector<std::optional<Vec>> pts(static_cast<std::size_t>(na));
    for (int k = 0; k < na; ++k) {
      const double a = 2.0 * std::numbers::pi * k / na;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      const double r = geo.radial(v);
      if (std::isfinite(r)) pts[static_cast<std::size_t>(k)] = Vec(z0 + r * v);
    }
    double acc = 0.0;
    for (int k = 0; k < na; ++k) {
      const auto& p = pts[static_cast<std::size_t>(k)];
      const auto& q = pts[static_cast<std::size_t>((k + 1) % na)];
      if (!p || !q) continue;
      const Vec mid = 0.5 * (*p + *q);
      if (in_region(geo.ambient(mid))) acc += (*q - *p).norm() * dens(mid);
    }
    return acc;
  }

  const int np = budget.sphere_polar;
  const int na = budget.sphere_azimuth;
  std::vector<std::optional<Vec>> pts(static_cast<std::size_t>((np + 1) * na));
  auto at = [&](int i, int j) -> std::optional<Vec>& {
    return pts[static_cast<std::size_t>(i * na + (j % na))];
  };
  for (int i = 0; i <= np; ++i) {
    const double th = std::numbers::pi * i / np;
    for (int j = 0; j < na; ++j) {
      const double ph = 2.0 * std::numbers::pi * j / na;
      Vec v(3);
      v << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
      const double r = geo.radial(v);
      if (std::isfinite(r)) at(i, j) = Vec(z0 + r * v);
    }
  }
  double acc = 0.0;
  auto triangle = [&](const std::optional<Vec>& a, const std::optional<Vec>& b, const std::optional<Vec>& c) {
    if (!a || !b || !c) return;
    const Eigen::Vector3d ab = *b - *a;
    const Eigen::Vector3d ac = *c - *a;
    const double area = 0.5 * ab.cross(ac).norm();
    if (area == 0.0) return;
    const Vec cen = (*a + *b + *c) / 3.0;
    if (in_region(geo.ambient(cen))) acc += area * dens(cen);
  };
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < na; ++j) {
      triangle(at(i, j), at(i + 1, j), at(i + 1, j + 1));
      triangle(at(i, j), at(i + 1, j + 1), at(i, j + 1));
    }
  }
  return acc;
}

}  // namespace

EstimateWithError subspace_hausdorff(const ConvexBody& body, const std::vector<Vec>& F,
                                     const std::function<bool(const Vec&)>& region, const GaussianModel& model,
                                     const Budget& budget, std::uint64_t seed) {
  const int n = body.dim();
  check_model(model, n, "subspace_hausdorff");
  const int m = static_cast<int>(F.size());
  if (m < 1 || m > 3) throw UnsupportedError("subspace_hausdorff: subspace dimension must be 1, 2 or 3");
  if (m > n) throw DimensionError("subspace_hausdorff: subspace dimension exceeds the ambient dimension");
  Mat Fm(n, m);
  for (int a = 0; a < m; ++a) {
    if (F[static_cast<std::size_t>(a)].size() != n) throw DimensionError("subspace_hausdorff: basis vector dimension");
    Fm.col(a) = F[static_cast<std::size_t>(a)];
  }
  if ((Fm.transpose() * Fm - Mat::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
    throw ParameterError("subspace_hausdorff: F must be orthonormal");
  if (budget.circle_angles < 8 || budget.sphere_polar < 4 || budget.sphere_azimuth < 8)
    throw ParameterError("subspace_hausdorff: angular grid too coarse");

  if (m == n) {
    const double v = section_boundary_measure(body, Fm, Vec::Zero(n), region, budget);
    const std::uint64_t nodes = m == 1 ? 2 : m == 2 ? static_cast<std::uint64_t>(budget.circle_angles)
                                                    : static_cast<std::uint64_t>((budget.sphere_polar + 1) * budget.sphere_azimuth);
    return EstimateWithError::exact(v, Method::polar_gauss, nodes);
  }
  if (budget.samples < 2) throw ParameterError("subspace_hausdorff: at least 2 samples are required");
  const auto ys = sample_gaussian(model, std::span<const Vec>(F), budget.samples, seed);
  const std::size_t chunk = m == 1 ? kChunkSize : 64;
  const auto parts = map_chunks<SampleStats>(chunk_count(budget.samples, chunk), [&](std::size_t c) {
    SampleStats s;
    const std::size_t end = std::min(budget.samples, (c + 1) * chunk);
    for (std::size_t j = c * chunk; j < end; ++j) s.add(section_boundary_measure(body, Fm, ys[j], region, budget));
    return s;
  });
  return merge_all(parts).estimate(seed);
}

EstimateWithError total_boundary_measure(const ConvexBody& body, const GraphPair& pair, const GaussianModel& model,
                                         const Budget& budget, std::uint64_t seed) {
  if (!pair.finite(Which::upper) && !pair.finite(Which::lower))
    throw CaseError("total_boundary_measure: both graphs are infinite along this direction");
  const auto samples = sample_boundary(body, budget.boundary_samples, seed ^ 0x5a5a5a5aull);
  const auto vm = vertical_mass(samples, pair.direction(), seed);
  if (vm.value > 0.01) {
    std::ostringstream os;
    os << "total_boundary_measure: vertical mass " << vm.value
       << " along the chosen direction exceeds 0.01; choose a different direction";
    throw DirectionError(os.str());
  }
  EstimateWithError out{0.0, 0.0, 0, seed, Method::closed_form};
  bool first = true;
  for (Which w : {Which::upper, Which::lower}) {
    if (!pair.finite(w)) continue;
    const auto e = epigraph_perimeter(pair, w, model, budget, seed);
    out.value += e.value;
    out.std_error += e.std_error;
    out.n_samples += e.n_samples;
    if (first) out.method = e.method;
    first = false;
  }
  return out;
}

namespace {

// r > rho with dist(center + r u, body) = eps, by Illinois iteration on the
// (convex, nondecreasing) distance along the ray; capped at reach.
double enlarged_radial(const ConvexBody& body, const Vec& u, double rho, double eps) {
  const Vec& c = body.center();
  auto phi = [&](double r) { return body.distance(c + r * u) - eps; };
  double lo = rho + eps;
  double flo = phi(lo);
  if (flo >= 0.0) return lo;
  double step = eps;
  double hi = lo + step;
  double fhi = phi(hi);
  while (fhi < 0.0) {
    if (hi >= body.reach()) return body.reach();
    lo = hi;
    flo = fhi;
    step *= 2.0;
    hi = std::min(lo + step, body.reach());
    fhi = phi(hi);
  }
  int side = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    double r = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(r > lo && r < hi)) r = 0.5 * (lo + hi);
    const double fr = phi(r);
    if (fr < 0.0) {
      lo = r;
      flo = fr;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = r;
      fhi = fr;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (fr == 0.0) return r;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MinkowskiContent minkowski_content_perimeter(const ConvexBody& body, const std::vector<double>& epsilons,
                                             std::size_t samples, std::uint64_t seed) {
  const std::size_t k = epsilons.size();
  if (k < 3) throw ParameterError("minkowski_content_perimeter: at least 3 epsilons are required");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] <= 0.1))
      throw ParameterError("minkowski_content_perimeter: epsilons must lie in (0, 0.1]");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw ParameterError("minkowski_content_perimeter: epsilons must be strictly decreasing");
  }
  if (samples < 2) throw ParameterError("minkowski_content_perimeter: at least 2 samples are required");
  const int n = body.dim();
  const auto dirs = random_directions(n, samples, seed);
  const auto& gl = quad::gauss_legendre(6);
  const double area = quad::sphere_area(n);
  const Vec& c = body.center();

  // extrapolation weights to eps = 0: all points, and all but the largest eps
  auto lagrange_at_zero = [&](std::size_t from) {
    std::vector<double> w(k, 0.0);
    for (std::size_t i = from; i < k; ++i) {
      double l = 1.0;
      for (std::size_t j = from; j < k; ++j)
        if (j != i) l *= epsilons[j] / (epsilons[j] - epsilons[i]);
      w[i] = l;
    }
    return w;
  };
  const auto w_all = lagrange_at_zero(0);
  const auto w_drop = lagrange_at_zero(1);

  struct Part {
    std::vector<SampleStats> q;
    SampleStats full;
    SampleStats drop;
  };
  const auto parts = map_chunks<Part>(chunk_count(samples), [&](std::size_t ch) {
    Part p;
    p.q.resize(k);
    std::vector<double> qv(k);
    const std::size_t end = std::min(samples, (ch + 1) * kChunkSize);
    for (std::size_t j = ch * kChunkSize; j < end; ++j) {
      const Vec& u = dirs[j];
      const double rho = body.radial(u, 1e-13);
      for (std::size_t i = 0; i < k; ++i) {
        qv[i] = 0.0;
        if (!std::isfinite(rho) || rho >= body.reach()) continue;
        const double re = enlarged_radial(body, u, rho, epsilons[i]);
        const double half = 0.5 * (re - rho);
        const double mid = 0.5 * (re + rho);
        double shell = 0.0;
        for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
          const double r = mid + half * gl.nodes[g];
          shell += gl.weights[g] * gaussian_density(Vec(c + r * u)) * std::pow(r, n - 1);
        }
        qv[i] = area * half * shell / epsilons[i];
      }
      double full = 0.0;
      double drop = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        p.q[i].add(qv[i]);
        full += w_all[i] * qv[i];
        drop += w_drop[i] * qv[i];
      }
      p.full.add(full);
      p.drop.add(drop);
    }
    return p;
  });

  std::vector<SampleStats> q(k);
  SampleStats full;
  SampleStats drop;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < k; ++i) q[i].merge(p.q[i]);
    full.merge(p.full);
    drop.merge(p.drop);
  }
  MinkowskiContent out;
  out.epsilons = epsilons;
  for (std::size_t i = 0; i < k; ++i) {
    out.quotients.push_back(q[i].mean());
    out.quotient_se.push_back(q[i].std_error());
  }
  out.statistical_se = full.std_error();
  out.extrapolation_error = std::abs(full.mean() - drop.mean());
  out.estimate = {full.mean(), out.statistical_se + out.extrapolation_error, samples, seed, Method::monte_carlo};

  int sign = 0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double d = out.quotients[i + 1] - out.quotients[i];
    if (std::abs(d) <= 3.0 * (out.quotient_se[i] + out.quotient_se[i + 1])) continue;
    const int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign) {
      out.warning = "extrapolation table is not monotone in epsilon beyond sampling noise";
      break;
    }
    sign = s;
  }
  return out;
}

}  // namespace wibp
