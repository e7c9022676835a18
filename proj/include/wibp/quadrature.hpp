#pragma once

#include <vector>

#include "wibp/types.hpp"

namespace wibp::quad {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal weight: sum w_i f(t_i)
/// approximates E[f(T)], T ~ N(0, 1). Weights sum to 1.
const Rule1D& gauss_hermite(int order);

/// Gauss-Legendre rule on [-1, 1]. Weights sum to 2.
const Rule1D& gauss_legendre(int order);

/// Gauss-Legendre rule mapped to [a, b].
Rule1D gauss_legendre(int order, double a, double b);

/// Directions with weights for integrating over the unit sphere S^{d-1}
/// (d = 1: the two points +-1 with unit weights; d = 2: uniform angle grid;
/// d = 3: Gauss-Legendre in the polar cosine times a uniform azimuth grid).
/// Weights sum to the sphere's surface measure.
struct SphereRule {
  std::vector<Vec> directions;
  std::vector<double> weights;
};
SphereRule sphere_rule(int d, int order);

/// Surface measure of S^{d-1}.
double sphere_area(int d);

}  // namespace wibp::quad
