#include "wibp/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace wibp::quad {
namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix,
// weights mu0 times the squared first eigenvector components.
Rule1D golub_welsch(int order, const std::vector<double>& offdiag, double mu0) {
  Mat jacobi = Mat::Zero(order, order);
  for (int k = 0; k + 1 < order; ++k) {
    jacobi(k, k + 1) = offdiag[static_cast<std::size_t>(k)];
    jacobi(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  Rule1D r;
  r.nodes.resize(static_cast<std::size_t>(order));
  r.weights.resize(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    r.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()[k];
    r.weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0;
  }
  // symmetrize to kill eigen-solver asymmetry
  for (int k = 0; k < order / 2; ++k) {
    const auto a = static_cast<std::size_t>(k);
    const auto b = static_cast<std::size_t>(order - 1 - k);
    const double x = 0.5 * (r.nodes[b] - r.nodes[a]);
    const double w = 0.5 * (r.weights[a] + r.weights[b]);
    r.nodes[a] = -x;
    r.nodes[b] = x;
    r.weights[a] = w;
    r.weights[b] = w;
  }
  if (order % 2 == 1) r.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return r;
}

template <class Build>
const Rule1D& cached(std::map<int, Rule1D>& cache, std::mutex& mu, int order, Build build) {
  if (order < 1) throw ParameterError("quadrature order must be >= 1");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build(order)).first;
  return it->second;
}

}  // namespace

const Rule1D& gauss_hermite(int order) {
  static std::map<int, Rule1D> cache;
  static std::mutex mu;
  return cached(cache, mu, order, [](int n) {
    std::vector<double> off(static_cast<std::size_t>(std::max(n - 1, 0)));
    for (int k = 1; k < n; ++k) off[static_cast<std::size_t>(k - 1)] = std::sqrt(static_cast<double>(k));
    return golub_welsch(n, off, 1.0);
  });
}

const Rule1D& gauss_legendre(int order) {
  static std::map<int, Rule1D> cache;
  static std::mutex mu;
  return cached(cache, mu, order, [](int n) {
    std::vector<double> off(static_cast<std::size_t>(std::max(n - 1, 0)));
    for (int k = 1; k < n; ++k) {
      const double kk = static_cast<double>(k);
      off[static_cast<std::size_t>(k - 1)] = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    return golub_welsch(n, off, 2.0);
  });
}

Rule1D gauss_legendre(int order, double a, double b) {
  Rule1D r = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    r.nodes[k] = mid + half * r.nodes[k];
    r.weights[k] *= half;
  }
  return r;
}

double sphere_area(int d) {
  if (d < 1) throw ParameterError("sphere_area: d must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

SphereRule sphere_rule(int d, int order) {
  SphereRule s;
  if (d == 1) {
    s.directions = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
    s.weights = {1.0, 1.0};
  } else if (d == 2) {
    const int m = std::max(order, 4);
    const double dphi = 2.0 * std::numbers::pi / m;
    for (int k = 0; k < m; ++k) {
      const double phi = (k + 0.5) * dphi;
      Vec u(2);
      u << std::cos(phi), std::sin(phi);
      s.directions.push_back(u);
      s.weights.push_back(dphi);
    }
  } else if (d == 3) {
    const int nt = std::max(order / 2, 2);
    const int np = std::max(order, 4);
    const auto& gl = gauss_legendre(nt);
    const double dphi = 2.0 * std::numbers::pi / np;
    for (int a = 0; a < nt; ++a) {
      const double z = gl.nodes[static_cast<std::size_t>(a)];
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int k = 0; k < np; ++k) {
        const double phi = (k + 0.5) * dphi;
        Vec u(3);
        u << rho * std::cos(phi), rho * std::sin(phi), z;
        s.directions.push_back(u);
        s.weights.push_back(gl.weights[static_cast<std::size_t>(a)] * dphi);
      }
    }
  } else {
    throw UnsupportedError("sphere_rule: only d <= 3 is supported");
  }
  return s;
}

}  // namespace wibp::quad
