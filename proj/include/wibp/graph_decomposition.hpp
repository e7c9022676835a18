#pragma once

// Graph decomposition of a convex body along a unit direction h: for y in the
// orthogonal complement X_h^perp, the line y + R h meets the body in the
// interval (g(y), f(y)); f is concave, g convex, and the boundary splits into
// the graph of f, the graph of g and a vertical remainder.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wibp/convex_body.hpp"
#include "wibp/estimate.hpp"
#include "wibp/gaussian_space.hpp"

namespace wibp {

inline constexpr double kDefaultGraphTol = 1e-12;

enum class CaseTag { both_infinite, g_finite_only, f_finite_only, both_finite };
enum class Which { upper, lower };
enum class BoundaryClass { upper_graph, lower_graph, vertical };

std::string_view case_tag_name(CaseTag tag);
std::string_view boundary_class_name(BoundaryClass c);

struct Section {
  bool empty = true;
  double lower = 0.0;  // g(y), may be -inf
  double upper = 0.0;  // f(y), may be +inf
  double midpoint() const;  // an inside abscissa
};

/// The section {t : y + t h in Omega} with endpoints located to absolute
/// tolerance tol; endpoints beyond the body's reach are reported as +-inf.
/// `hint` is an abscissa to try first as an inside point.
Section section_interval(const ConvexBody& body, const Direction& h, const Vec& y, double tol,
                         std::optional<double> hint = std::nullopt);

/// Consistent case tag over `probes` points of the domain; disagreement is
/// an OracleIntegrityError.
CaseTag classify_case(const ConvexBody& body, const Direction& h, int probes, std::uint64_t seed,
                      double tol = kDefaultGraphTol);

class GraphPair {
 public:
  GraphPair(ConvexBody body, Direction h, CaseTag tag, double tol = kDefaultGraphTol);

  const ConvexBody& body() const { return body_; }
  const Direction& direction() const { return h_; }
  CaseTag case_tag() const { return tag_; }
  double tol() const { return tol_; }
  /// Orthonormal basis of X_h^perp as columns (n x (n - 1)).
  const Mat& basis() const { return basis_; }
  int complement_dim() const { return static_cast<int>(basis_.cols()); }

  bool finite(Which which) const;
  Section section(const Vec& y, std::optional<double> hint = std::nullopt) const;
  bool in_domain(const Vec& y) const { return !section(y).empty; }
  /// f(y) (upper) or g(y) (lower); CaseError when infinite, PreconditionError
  /// when y is outside the domain.
  double value(Which which, const Vec& y) const;

  /// Projection of the body's center onto X_h^perp; interior to the domain.
  Vec domain_center() const;
  /// sup{r : domain_center + r u in the domain} for a unit u in X_h^perp,
  /// counting only section points within reach() of the body's center (so
  /// unbounded domains report a finite extent of order reach()).
  double domain_radial(const Vec& u) const;

 private:
  ConvexBody body_;
  Direction h_;
  CaseTag tag_;
  double tol_;
  Mat basis_;
};

GraphPair make_graph_pair(const ConvexBody& body, const Direction& h, double tol = kDefaultGraphTol,
                          int probes = 16, std::uint64_t seed = 7);

struct GraphValue {
  double value = 0.0;
  Vec gradient;  // ambient coordinates, orthogonal to h
};

/// Value and gradient of f (upper) or g (lower) at y: central differences
/// from fd_step downward, extrapolated to zero step.
/// MarginError when a stencil point leaves the domain.
GraphValue graph_value_and_gradient(const GraphPair& pair, Which which, const Vec& y, double fd_step,
                                    std::optional<Section> at_y = std::nullopt);

/// Classifies a boundary point x = y + t h by comparing t with f(y), g(y) at
/// absolute tolerance 100 tol.
BoundaryClass boundary_classify(const ConvexBody& body, const GraphPair& pair, const Vec& x, double tol);

/// Outward unit normal at a boundary point from the finite-difference gauge
/// gradient.
Vec outward_normal_fd(const ConvexBody& body, const Vec& x, double gauge_tol = 1e-12);

/// Boundary points sampled by ray casting with their surface weights
/// G_n(b) rho^{n-1} / <nu, u> (expectation over uniform u times |S^{n-1}| is
/// the Gaussian surface measure) and their outward normals.
struct BoundarySample {
  Vec point;
  Vec normal;
  double weight = 0.0;
};
std::vector<BoundarySample> sample_boundary(const ConvexBody& body, std::size_t rays, std::uint64_t seed);

/// Fraction of Gaussian surface measure whose normal is within 1e-3 rad of
/// orthogonal to h (ratio estimate over the given samples).
EstimateWithError vertical_mass(const std::vector<BoundarySample>& samples, const Direction& h,
                                std::uint64_t seed = 0);

struct DirectionChoice {
  Direction direction;
  EstimateWithError vertical_mass;
  std::vector<EstimateWithError> per_candidate;
  std::size_t index = 0;
};

/// Candidate with the smallest estimated vertical mass (first on ties).
/// DirectionError when every candidate exceeds 0.5.
DirectionChoice choose_direction(const ConvexBody& body, const std::vector<Direction>& candidates,
                                 std::size_t boundary_samples, std::uint64_t seed);

/// Coordinate axes followed by `random_count` random unit vectors.
std::vector<Direction> default_candidates(int dim, std::uint64_t seed, int random_count = 8);

inline constexpr double kVerticalAngle = 1e-3;

}  // namespace wibp
