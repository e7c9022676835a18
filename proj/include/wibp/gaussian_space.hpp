#pragma once

// The ambient Gaussian space in whitened coordinates: gamma = N(0, I_n), the
// Cameron-Martin norm is the Euclidean norm and h^(x) = <h, x>.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wibp/types.hpp"

namespace wibp {

struct GaussianModel {
  int dim = 1;
  /// Karhunen-Loeve eigenvalues, used only to label and scale demo bodies.
  std::optional<std::vector<double>> spectral_profile;

  static GaussianModel standard(int n);
  /// Brownian motion on [0, 1]: lambda_k = ((k - 1/2) pi)^-2.
  static GaussianModel brownian(int n);

  void validate() const;
};

/// Unit vector of the Cameron-Martin space.
class Direction {
 public:
  /// Normalizes v; throws ParameterError for a zero or non-finite vector.
  static Direction from(const Vec& v);
  static Direction axis(int dim, int index);

  const Vec& vec() const { return h_; }
  int dim() const { return static_cast<int>(h_.size()); }
  double operator()(const Vec& x) const { return h_.dot(x); }

 private:
  explicit Direction(Vec h) : h_(std::move(h)) {}
  Vec h_;
};

/// A bounded Lipschitz test function with an optional analytic gradient.
struct TestFunction {
  std::string id;
  std::function<double(const Vec&)> value;
  double lipschitz_bound = 1.0;
  std::function<Vec(const Vec&)> gradient;  // empty: finite differences

  double operator()(const Vec& x) const { return value(x); }
};

/// Checks |psi(x) - psi(y)| <= L |x - y| (1 + 1e-9) on random pairs drawn
/// from N(0, scale^2 I). Returns the largest observed ratio |dpsi| / |dx|.
double observed_lipschitz(const TestFunction& psi, int dim, int pairs, std::uint64_t seed,
                          double scale = 2.0);

/// Standard normal density on R^m evaluated at z (m = z.size()).
double gaussian_density(int m, const Vec& z);
inline double gaussian_density(const Vec& z) { return gaussian_density(static_cast<int>(z.size()), z); }

/// One-dimensional standard normal density G_1(t).
double gauss1(double t);
/// Standard normal CDF.
double normal_cdf(double t);

struct SplitPoint {
  Vec y;     // component in the orthogonal complement of h
  double t;  // coordinate along h
};

/// x = y + t h with <h, y> = 0.
SplitPoint split_along(const Vec& x, const Direction& h);

inline constexpr double kDefaultFdStep = 1e-5;

/// d/ds psi(x + s h) at s = 0: analytic gradient when available, otherwise a
/// central difference with step fd_step.
double directional_derivative(const TestFunction& psi, const Vec& h, const Vec& x,
                              double fd_step = kDefaultFdStep);

/// d*_h psi(x) = d_h psi(x) - psi(x) <h, x>.
double adjoint_derivative(const TestFunction& psi, const Direction& h, const Vec& x,
                          double fd_step = kDefaultFdStep);

/// count i.i.d. N(0, I) points, projected onto the orthogonal complement of
/// span(subspace) when it is non-empty (subspace must be orthonormal).
/// Point j is produced by chunk j / kChunkSize with generator
/// chunk_rng(seed, chunk), so output is identical for any thread count.
std::vector<Vec> sample_gaussian(const GaussianModel& model, std::span<const Vec> subspace,
                                 std::size_t count, std::uint64_t seed);

/// Fills a coordinate-major block (dim x count, stride = count) with N(0, 1)
/// draws, point by point.
template <class Rng>
void fill_gaussian_block(Rng& rng, std::size_t dim, std::size_t count, double* block);

/// Orthonormal basis (columns, n x (n-1)) of the orthogonal complement of h.
Mat complement_basis(const Direction& h);

/// Orthonormal basis of the complement of span(vectors) (which need not be orthonormal).
Mat complement_basis(std::span<const Vec> vectors, int dim);

}  // namespace wibp

#include <random>

namespace wibp {

template <class Rng>
void fill_gaussian_block(Rng& rng, std::size_t dim, std::size_t count, double* block) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < dim; ++i) block[i * count + j] = normal(rng);
}

}  // namespace wibp
