#pragma once

// Membership-oracle shapes. Each shape is an open convex set in R^n that can
// also report the Euclidean distance of a point to its closure and certify an
// interior ball and (when bounded) an enclosing radius.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wibp/types.hpp"

namespace wibp {

enum class ShapeTag { ball, ellipsoid, halfspace, polytope, cylinder, translate, quadric };

std::string_view shape_tag_name(ShapeTag tag);

struct Certificate {
  Vec interior;                       // B(interior, margin) lies inside
  double margin = 0.0;
  std::optional<double> outer_radius;  // Omega within B(0, R); nullopt = unbounded
};

class Shape {
 public:
  virtual ~Shape() = default;

  virtual int dim() const = 0;
  virtual ShapeTag tag() const = 0;
  virtual bool contains(const Vec& x) const = 0;
  /// Euclidean distance from x to the closure of the set (0 inside).
  virtual double distance(const Vec& x) const = 0;
  virtual Certificate certify() const = 0;
  /// A radius r with B(x, r) inside, when cheaply known for an inside point x.
  virtual std::optional<double> margin_at(const Vec& x) const;

  /// mask[j] = contains(block[:, j] - offset) for a coordinate-major block
  /// with stride == count. offset may be null.
  virtual void contains_batch(const double* block, std::size_t count, const double* offset,
                              std::uint8_t* mask) const;
};

using ShapePtr = std::shared_ptr<const Shape>;

struct Face {
  Vec normal;
  double offset = 0.0;  // {x : <normal, x> < offset}
};

ShapePtr make_ball(const Vec& center, double radius);
ShapePtr make_ellipsoid(const Vec& center, const Vec& semiaxes);
/// {x : <a, x> < c}
ShapePtr make_halfspace(const Vec& normal, double offset);
ShapePtr make_polytope(std::vector<Face> faces);
/// {x : x - <a, x> a in base}, a the unit axis. The distance is exact when the
/// base is symmetric under reflection through the hyperplane orthogonal to a.
ShapePtr make_cylinder(ShapePtr base, const Vec& axis);
ShapePtr make_translate(ShapePtr inner, const Vec& shift);
/// Level set {x : x^T A x + b^T x + c < 0} for symmetric positive definite A.
ShapePtr make_quadric(const Mat& a, const Vec& b, double c);

}  // namespace wibp
