#pragma once

// Open convex sets given by membership oracles, with the Minkowski
// functional (gauge) computed by bisection.

#include <cstdint>
#include <optional>
#include <vector>

#include "wibp/estimate.hpp"
#include "wibp/shapes.hpp"
#include "wibp/types.hpp"

namespace wibp {

inline constexpr double kDefaultGaugeTol = 1e-10;
inline constexpr double kDefaultReach = 50.0;

class ConvexBody {
 public:
  /// Certifies the shape (interior ball, outer radius) and checks interior
  /// membership plus midpoint convexity on samples; throws SchemaError for
  /// shapes that fail. The gauge is taken about `center()`: the origin when
  /// the origin is interior, otherwise the shape's certified interior point.
  static ConvexBody make(ShapePtr shape, double reach = kDefaultReach);

  int dim() const { return shape_->dim(); }
  ShapeTag tag() const { return shape_->tag(); }
  const Shape& shape() const { return *shape_; }
  const ShapePtr& shape_ptr() const { return shape_; }

  bool contains(const Vec& x) const { return shape_->contains(x); }
  void contains_batch(const double* block, std::size_t count, std::uint8_t* mask) const {
    shape_->contains_batch(block, count, nullptr, mask);
  }
  double distance(const Vec& x) const { return shape_->distance(x); }

  const Vec& center() const { return center_; }
  double margin() const { return margin_; }
  std::optional<double> outer_radius() const { return outer_radius_; }
  bool bounded() const { return outer_radius_.has_value(); }
  /// Per-direction reach bound for unbounded bodies: points further than this
  /// from the center along a ray are treated as at infinity.
  double reach() const { return reach_; }

  /// sup{s : center + s u in Omega} for a unit vector u, to relative
  /// tolerance tol; +inf when the ray stays inside beyond reach().
  double radial(const Vec& u, double tol = kDefaultGaugeTol) const;

  /// Upper bound on |t| for inside points of a line y + t h, |y| <= |y|.
  double line_bound(const Vec& y) const;

 private:
  ConvexBody() = default;
  ShapePtr shape_;
  Vec center_;
  double margin_ = 0.0;
  std::optional<double> outer_radius_;
  double reach_ = kDefaultReach;
};

/// p(x) = inf{lambda > 0 : x - c in lambda (Omega - c)} with c = body.center(),
/// by bisection on lambda; |error| <= tol * max(1, p).
double minkowski_functional(const ConvexBody& body, const Vec& x, double tol = kDefaultGaugeTol);

/// Central-difference gradient of the gauge. Requires step >= cbrt(tol).
Vec minkowski_gradient_fd(const ConvexBody& body, const Vec& x, double step, double tol);

/// Fraction of B(x, radius) inside the body, by uniform sampling.
EstimateWithError lebesgue_density(const ConvexBody& body, const Vec& x, double radius,
                                   std::size_t samples, std::uint64_t seed);

/// center + radial(u) u; nullopt for rays that do not exit within reach.
std::optional<Vec> boundary_point(const ConvexBody& body, const Vec& u, double tol = kDefaultGaugeTol);

/// Boundary points hit by rays from the center in uniformly random
/// directions. Rays that never exit are skipped, so fewer than `count`
/// points may be returned for unbounded bodies.
std::vector<Vec> ray_cast_boundary(const ConvexBody& body, std::size_t count, std::uint64_t seed,
                                   double tol = kDefaultGaugeTol);

/// Uniform random unit vector stream (chunked, deterministic).
std::vector<Vec> random_directions(int dim, std::size_t count, std::uint64_t seed);

}  // namespace wibp
