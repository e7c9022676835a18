#pragma once

// Gaussian surface integrals: the area formula over graphs, epigraph
// perimeters, section measures over finite-dimensional subspaces, the total
// boundary measure and a Minkowski-content oracle.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wibp/convex_body.hpp"
#include "wibp/estimate.hpp"
#include "wibp/gaussian_space.hpp"
#include "wibp/graph_decomposition.hpp"

namespace wibp {

struct Budget {
  std::size_t samples = 100000;  // Monte Carlo draws
  int order = 64;                // quadrature order
  int circle_angles = 4096;      // boundary polygon of planar sections
  int sphere_polar = 128;        // boundary triangulation of 3-D sections
  int sphere_azimuth = 256;
  std::size_t boundary_samples = 4000;  // vertical-mass estimate
  double fd_step = kDefaultFdStep;
};

/// Truncation radius (about the domain center) for graph integrals.
inline constexpr double kDomainTruncation = 12.0;

/// A point of a graph with its data: x = y + t h, t = f(y).
struct GraphPoint {
  Vec y;
  double t = 0.0;
  Vec x;
  Vec gradient;  // of the graph function, orthogonal to h
  Vec normal;    // (-grad + h) / sqrt(1 + |grad|^2)
};
using GraphIntegrand = std::function<double(const GraphPoint&)>;

/// int_{X_h^perp} integrand(x) G_1(f(y)) sqrt(1 + |grad f(y)|^2) dgamma_h^perp(y)
/// over the domain of the selected graph. For dim X_h^perp <= 3 the rule is
/// deterministic: tensor Gauss-Hermite when the domain is the whole
/// complement, otherwise a polar Gauss-Legendre rule about domain_center()
/// with radial substitution r = R sin(theta). Monte Carlo otherwise.
/// CaseError for an infinite graph.
EstimateWithError area_formula_integral(const GraphPair& pair, Which which, const GraphIntegrand& integrand,
                                        const GaussianModel& model, const Budget& budget, std::uint64_t seed);

EstimateWithError epigraph_perimeter(const GraphPair& pair, Which which, const GaussianModel& model,
                                     const Budget& budget, std::uint64_t seed);

/// A function on X_h^perp given directly. Points are ambient vectors
/// orthogonal to h.
struct GraphFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;  // empty: central differences
  std::function<bool(const Vec&)> domain;   // empty: all of X_h^perp
};

/// Gaussian perimeter of the epigraph of f within the cylinder over its domain.
EstimateWithError epigraph_perimeter(const GraphFunction& f, const Direction& h, const GaussianModel& model,
                                     const Budget& budget, std::uint64_t seed);

/// S_F(region intersect boundary): Monte Carlo over y ~ gamma_F^perp of the
/// G_m-weighted (m-1)-measure of the boundary of the section
/// {z in F : y + z in body}. F must be orthonormal with 1 <= m <= 3
/// (UnsupportedError otherwise). When F spans the whole space the outer
/// integral is a single point and the result is deterministic. Samples
/// derive from one stream projected onto each complement, so chains of
/// nested subspaces share random numbers.
EstimateWithError subspace_hausdorff(const ConvexBody& body, const std::vector<Vec>& F,
                                     const std::function<bool(const Vec&)>& region, const GaussianModel& model,
                                     const Budget& budget, std::uint64_t seed);

/// Sum of the area-formula perimeters of the finite graphs. DirectionError
/// when the estimated vertical mass along the pair's direction exceeds 0.01.
EstimateWithError total_boundary_measure(const ConvexBody& body, const GraphPair& pair, const GaussianModel& model,
                                         const Budget& budget, std::uint64_t seed);

struct MinkowskiContent {
  EstimateWithError estimate;  // std_error: statistical plus extrapolation
  double statistical_se = 0.0;
  double extrapolation_error = 0.0;
  std::vector<double> epsilons;
  std::vector<double> quotients;  // (gamma(Omega_eps) - gamma(Omega)) / eps
  std::vector<double> quotient_se;
  std::optional<std::string> warning;
};

/// Gaussian Minkowski content by radial shells: for directions u from the
/// center, integrates G_n over the segment between the boundary and the
/// boundary of the eps-enlargement, with the same directions for every eps,
/// then extrapolates the quotients polynomially to eps = 0.
MinkowskiContent minkowski_content_perimeter(const ConvexBody& body, const std::vector<double>& epsilons,
                                             std::size_t samples, std::uint64_t seed);

}  // namespace wibp
