#pragma once

// Bounded Lipschitz test functions with analytic gradients.

#include "wibp/gaussian_space.hpp"

namespace wibp {

TestFunction psi_constant(double c);

/// x -> x_index (Lipschitz, unbounded; its Gaussian moments are all finite).
TestFunction psi_coordinate(int dim, int index);

/// x -> tanh(<w, x> + b).
TestFunction psi_tanh(const Vec& w, double b);

/// x -> min(|x - p|, cap).
TestFunction psi_dist_clamp(const Vec& p, double cap);

}  // namespace wibp
