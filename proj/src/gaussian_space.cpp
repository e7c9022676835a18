#include "wibp/gaussian_space.hpp"

#include <cmath>
#include <numbers>

#include "wibp/kernels/kernels.hpp"
#include "wibp/parallel.hpp"

namespace wibp {

GaussianModel GaussianModel::standard(int n) {
  GaussianModel m;
  m.dim = n;
  m.validate();
  return m;
}

GaussianModel GaussianModel::brownian(int n) {
  GaussianModel m;
  m.dim = n;
  std::vector<double> lambda(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 1; k <= n; ++k) {
    const double w = (k - 0.5) * std::numbers::pi;
    lambda[static_cast<std::size_t>(k - 1)] = 1.0 / (w * w);
  }
  m.spectral_profile = std::move(lambda);
  m.validate();
  return m;
}

void GaussianModel::validate() const {
  if (dim < 1) throw ParameterError("GaussianModel: dim must be >= 1, got " + std::to_string(dim));
  if (!spectral_profile) return;
  const auto& s = *spectral_profile;
  if (static_cast<int>(s.size()) != dim)
    throw ParameterError("GaussianModel: spectral_profile length " + std::to_string(s.size()) +
                         " does not match dim " + std::to_string(dim));
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!(s[k] > 0.0) || !std::isfinite(s[k]))
      throw ParameterError("GaussianModel: spectral_profile entries must be positive");
    if (k > 0 && s[k] > s[k - 1])
      throw ParameterError("GaussianModel: spectral_profile must be non-increasing");
  }
}

Direction Direction::from(const Vec& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ParameterError("Direction: vector must be non-zero and finite");
  return Direction(v / n);
}

Direction Direction::axis(int dim, int index) {
  if (index < 0 || index >= dim)
    throw ParameterError("Direction::axis: index " + std::to_string(index) + " out of range");
  return Direction(Vec::Unit(dim, index));
}

double gaussian_density(int m, const Vec& z) {
  if (m < 1) throw DomainError("gaussian_density: m must be >= 1");
  if (z.size() != m) throw DimensionError("gaussian_density: z has wrong dimension");
  if (!z.allFinite()) throw DomainError("gaussian_density: non-finite input");
  return std::exp(-0.5 * z.squaredNorm()) / std::pow(2.0 * std::numbers::pi, 0.5 * m);
}

double gauss1(double t) { return std::exp(-0.5 * t * t) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

SplitPoint split_along(const Vec& x, const Direction& h) {
  require_same_dim(x, h.vec(), "split_along");
  const double t = h(x);
  return {x - t * h.vec(), t};
}

double directional_derivative(const TestFunction& psi, const Vec& h, const Vec& x, double fd_step) {
  if (!(fd_step > 0.0)) throw ParameterError("finite-difference step must be positive");
  if (psi.gradient) return psi.gradient(x).dot(h);
  return (psi(x + fd_step * h) - psi(x - fd_step * h)) / (2.0 * fd_step);
}

double adjoint_derivative(const TestFunction& psi, const Direction& h, const Vec& x, double fd_step) {
  require_same_dim(x, h.vec(), "adjoint_derivative");
  return directional_derivative(psi, h.vec(), x, fd_step) - psi(x) * h(x);
}

double observed_lipschitz(const TestFunction& psi, int dim, int pairs, std::uint64_t seed, double scale) {
  auto rng = chunk_rng(seed, 0);
  std::normal_distribution<double> normal(0.0, scale);
  double worst = 0.0;
  Vec a(dim), b(dim);
  for (int p = 0; p < pairs; ++p) {
    for (int i = 0; i < dim; ++i) a[i] = normal(rng);
    for (int i = 0; i < dim; ++i) b[i] = a[i] + 0.1 * normal(rng);
    const double dx = (a - b).norm();
    if (dx == 0.0) continue;
    worst = std::max(worst, std::abs(psi(a) - psi(b)) / dx);
  }
  return worst;
}

std::vector<Vec> sample_gaussian(const GaussianModel& model, std::span<const Vec> subspace,
                                 std::size_t count, std::uint64_t seed) {
  model.validate();
  const auto n = static_cast<std::size_t>(model.dim);
  for (const auto& u : subspace) {
    if (u.size() != model.dim) throw DimensionError("sample_gaussian: subspace vector has wrong dimension");
  }
  for (std::size_t a = 0; a < subspace.size(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double expect = a == b ? 1.0 : 0.0;
      if (std::abs(subspace[a].dot(subspace[b]) - expect) > 1e-10)
        throw ParameterError("sample_gaussian: subspace must be orthonormal");
    }
  }
  std::vector<Vec> out(count);
  const auto& k = kernels::active();
  parallel_for_chunks(chunk_count(count), [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize;
    const std::size_t m = std::min(kChunkSize, count - begin);
    std::vector<double> block(n * m);
    auto rng = chunk_rng(seed, c);
    fill_gaussian_block(rng, n, m, block.data());
    for (const auto& u : subspace) k.reject_direction(block.data(), m, n, m, u.data());
    for (std::size_t j = 0; j < m; ++j) {
      Vec& x = out[begin + j];
      x.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = block[i * m + j];
    }
  });
  return out;
}

Mat complement_basis(std::span<const Vec> vectors, int dim) {
  std::vector<Vec> basis;
  auto orthogonalize = [&](Vec v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b.dot(v) * b;
    return v;
  };
  for (const auto& v : vectors) {
    if (v.size() != dim) throw DimensionError("complement_basis: wrong dimension");
    Vec r = orthogonalize(v);
    if (r.norm() > 1e-10) basis.push_back(r / r.norm());
  }
  const std::size_t given = basis.size();
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  while (static_cast<int>(basis.size()) < dim) {
    int best = -1;
    double best_norm = -1.0;
    Vec best_r;
    for (int i = 0; i < dim; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      Vec r = orthogonalize(Vec::Unit(dim, i));
      if (r.norm() > best_norm + 1e-12) {
        best_norm = r.norm();
        best = i;
        best_r = r;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    basis.push_back(best_r / best_norm);
  }
  Mat out(dim, dim - static_cast<int>(given));
  for (int c = 0; c < out.cols(); ++c) out.col(c) = basis[given + static_cast<std::size_t>(c)];
  return out;
}

Mat complement_basis(const Direction& h) {
  const Vec v = h.vec();
  return complement_basis(std::span<const Vec>(&v, 1), h.dim());
}

}  // namespace wibp
