#include "wibp/convex_body.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "wibp/parallel.hpp"

namespace wibp {
namespace {

constexpr std::uint64_t kStructureSeed = 0x0b0d1e5ull;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_structure(const Shape& shape, const Certificate& cert) {
  const int n = shape.dim();
  if (!(cert.margin > 0.0)) throw SchemaError("body: empty interior (certified margin is not positive)");
  if (!shape.contains(cert.interior))
    throw SchemaError("body: certified interior point fails the membership test");
  auto rng = chunk_rng(kStructureSeed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec u(n);
  for (int k = 0; k < 12; ++k) {
    for (int i = 0; i < n; ++i) u[i] = normal(rng);
    u.normalize();
    const Vec p = cert.interior + 0.9 * cert.margin * std::pow(unif(rng), 1.0 / n) * u;
    if (!shape.contains(p)) throw SchemaError("body: a point of the certified interior ball is outside");
  }
  // midpoint convexity on random inside pairs
  const double spread = cert.outer_radius ? *cert.outer_radius : 4.0 * cert.margin + 4.0;
  std::vector<Vec> inside;
  for (int tries = 0; tries < 200000 && inside.size() < 2000; ++tries) {
    for (int i = 0; i < n; ++i) u[i] = normal(rng);
    const Vec p = cert.interior + spread * u;
    if (shape.contains(p)) inside.push_back(p);
  }
  for (std::size_t k = 0; k + 1 < inside.size(); k += 2) {
    const Vec mid = 0.5 * (inside[k] + inside[k + 1]);
    if (!shape.contains(mid))
      throw SchemaError("body: membership oracle is not convex (a midpoint of two inside points is outside)");
  }
}

}  // namespace

ConvexBody ConvexBody::make(ShapePtr shape, double reach) {
  if (!shape) throw SchemaError("body: null shape");
  if (!(reach > 0.0)) throw ParameterError("body: reach must be positive");
  const Certificate cert = shape->certify();
  check_structure(*shape, cert);
  ConvexBody body;
  body.shape_ = std::move(shape);
  body.outer_radius_ = cert.outer_radius;
  body.reach_ = reach;
  body.center_ = cert.interior;
  body.margin_ = cert.margin;

  const Vec origin = Vec::Zero(body.dim());
  if (body.shape_->contains(origin)) {
    double m0 = 0.0;
    if (auto m = body.shape_->margin_at(origin)) {
      m0 = *m;
    } else {
      // the gauge about the certified point is (1 / margin)-Lipschitz
      m0 = (1.0 - minkowski_functional(body, origin, 1e-12)) * cert.margin;
    }
    if (m0 > 1e-9) {
      body.center_ = origin;
      body.margin_ = m0;
    }
  }
  return body;
}

double ConvexBody::line_bound(const Vec& y) const {
  if (outer_radius_) return *outer_radius_ * (1.0 + 1e-9) + 1e-9;
  return reach_ + center_.norm() + y.norm();
}

double ConvexBody::radial(const Vec& u, double tol) const {
  require_same_dim(u, center_, "radial");
  double lo = 0.5 * margin_;
  double hi = 0.0;
  if (outer_radius_) {
    hi = 2.0 * (*outer_radius_ + center_.norm()) + margin_;
    if (shape_->contains(center_ + hi * u))
      throw OracleIntegrityError("radial: point beyond the certified outer radius is inside");
  } else {
    hi = reach_;
    if (shape_->contains(center_ + hi * u)) return kInf;
  }
  if (!shape_->contains(center_ + lo * u))
    throw OracleIntegrityError("radial: point of the certified interior ball is outside");
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (shape_->contains(center_ + mid * u) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double minkowski_functional(const ConvexBody& body, const Vec& x, double tol) {
  require_same_dim(x, body.center(), "minkowski_functional");
  if (!(tol > 0.0)) throw ParameterError("minkowski_functional: tol must be positive");
  const Vec d = x - body.center();
  const double r = d.norm();
  if (r == 0.0) return 0.0;
  const Vec& c = body.center();
  double hi = r / (0.5 * body.margin());
  if (!body.contains(c + d / hi))
    throw OracleIntegrityError("minkowski_functional: point of the certified interior ball is outside");
  double lo = 0.0;
  if (auto outer = body.outer_radius()) {
    lo = r / (2.0 * (*outer + c.norm()) + body.margin());
    if (body.contains(c + d / lo))
      throw OracleIntegrityError("minkowski_functional: point beyond the certified outer radius is inside");
  }
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (body.contains(c + d / mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

Vec minkowski_gradient_fd(const ConvexBody& body, const Vec& x, double step, double tol) {
  require_same_dim(x, body.center(), "minkowski_gradient_fd");
  const double min_step = std::cbrt(tol);
  if (!(step > 0.0) || step < min_step * (1.0 - 1e-9))
    throw ParameterError("minkowski_gradient_fd: step " + fmt(step) +
                         " is noise-dominated for gauge tolerance " + fmt(tol) + "; use step >= tol^(1/3) = " +
                         fmt(min_step));
  if ((x - body.center()).norm() == 0.0)
    throw PreconditionError("minkowski_gradient_fd: the gauge is not differentiable at the center");
  const int n = body.dim();
  Vec g(n);
  Vec xp = x;
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + step;
    const double fp = minkowski_functional(body, xp, tol);
    xp[i] = x[i] - step;
    const double fm = minkowski_functional(body, xp, tol);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

std::vector<Vec> random_directions(int dim, std::size_t count, std::uint64_t seed) {
  std::vector<Vec> out(count);
  parallel_for_chunks(chunk_count(count), [&](std::size_t c) {
    auto rng = chunk_rng(seed, c);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t begin = c * kChunkSize;
    const std::size_t end = std::min(count, begin + kChunkSize);
    for (std::size_t j = begin; j < end; ++j) {
      Vec u(dim);
      do {
        for (int i = 0; i < dim; ++i) u[i] = normal(rng);
      } while (u.norm() == 0.0);
      out[j] = u.normalized();
    }
  });
  return out;
}

EstimateWithError lebesgue_density(const ConvexBody& body, const Vec& x, double radius,
                                   std::size_t samples, std::uint64_t seed) {
  require_same_dim(x, body.center(), "lebesgue_density");
  if (!(radius > 0.0)) throw ParameterError("lebesgue_density: radius must be positive");
  if (samples < 1000) throw ParameterError("lebesgue_density: at least 1000 samples are required");
  const int n = body.dim();
  auto parts = map_chunks<SampleStats>(chunk_count(samples), [&](std::size_t c) {
    auto rng = chunk_rng(seed, c);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t begin = c * kChunkSize;
    const std::size_t end = std::min(samples, begin + kChunkSize);
    SampleStats s;
    Vec u(n);
    for (std::size_t j = begin; j < end; ++j) {
      for (int i = 0; i < n; ++i) u[i] = normal(rng);
      const double r = radius * std::pow(unif(rng), 1.0 / n);
      s.add(body.contains(x + (r / u.norm()) * u) ? 1.0 : 0.0);
    }
    return s;
  });
  return merge_all(parts).estimate(seed);
}

std::optional<Vec> boundary_point(const ConvexBody& body, const Vec& u, double tol) {
  const double s = body.radial(u, tol);
  if (!std::isfinite(s)) return std::nullopt;
  return Vec(body.center() + s * u);
}

std::vector<Vec> ray_cast_boundary(const ConvexBody& body, std::size_t count, std::uint64_t seed,
                                   double tol) {
  const auto dirs = random_directions(body.dim(), count, seed);
  std::vector<std::optional<Vec>> hits(count);
  parallel_for_chunks(chunk_count(count, 256), [&](std::size_t c) {
    const std::size_t end = std::min(count, (c + 1) * 256);
    for (std::size_t j = c * 256; j < end; ++j) hits[j] = boundary_point(body, dirs[j], tol);
  });
  std::vector<Vec> out;
  for (auto& h : hits)
    if (h) out.push_back(std::move(*h));
  return out;
}

}  // namespace wibp
