#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "wibp/estimate.hpp"
#include "wibp/gaussian_space.hpp"
#include "wibp/parallel.hpp"
#include "wibp/quadrature.hpp"
#include "wibp/test_functions.hpp"

using namespace wibp;
using doctest::Approx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_SUITE("gaussian_space") {
  TEST_CASE("density examples") {
    CHECK(gaussian_density(1, Vec::Zero(1)) == Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(gaussian_density(1, Vec::Ones(1)) == Approx(std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
    CHECK(gaussian_density(1, Vec::Ones(1)) == Approx(0.2419707).epsilon(1e-7));
    CHECK(gaussian_density(2, Vec::Zero(2)) == Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-15));
    CHECK(gauss1(1.0) == Approx(gaussian_density(Vec::Ones(1))).epsilon(1e-15));
  }

  TEST_CASE("density rejects bad input") {
    Vec z(1);
    z << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(gaussian_density(1, z), DomainError);
    CHECK_THROWS_AS(gaussian_density(0, Vec::Zero(0)), DomainError);
    CHECK_THROWS_AS(gaussian_density(2, Vec::Zero(3)), DimensionError);
  }

  TEST_CASE("model validation") {
    CHECK_NOTHROW(GaussianModel::standard(3).validate());
    CHECK_NOTHROW(GaussianModel::brownian(5).validate());
    const auto b = GaussianModel::brownian(3);
    REQUIRE(b.spectral_profile);
    CHECK((*b.spectral_profile)[0] == Approx(1.0 / (0.25 * std::numbers::pi * std::numbers::pi)));
    CHECK((*b.spectral_profile)[1] == Approx(1.0 / (2.25 * std::numbers::pi * std::numbers::pi)));
    GaussianModel bad{0, std::nullopt};
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    GaussianModel increasing{2, std::vector<double>{1.0, 2.0}};
    CHECK_THROWS_AS(increasing.validate(), ParameterError);
    GaussianModel negative{2, std::vector<double>{1.0, -1.0}};
    CHECK_THROWS_AS(negative.validate(), ParameterError);
  }

  TEST_CASE("directions are unit vectors") {
    const auto h = Direction::from(v3(3, 4, 12));
    CHECK(std::abs(h.vec().norm() - 1.0) <= 1e-12);
    CHECK_THROWS_AS(Direction::from(Vec::Zero(3)), ParameterError);
    CHECK_THROWS_AS(Direction::axis(2, 2), ParameterError);
  }

  TEST_CASE("split_along examples") {
    auto s = split_along(v2(3, 4), Direction::axis(2, 0));
    CHECK(s.y.isApprox(v2(0, 4)));
    CHECK(s.t == 3.0);
    const auto h = Direction::from(v2(1, 2));
    s = split_along(h.vec(), h);
    CHECK(s.y.norm() <= 1e-12);
    CHECK(s.t == Approx(1.0).epsilon(1e-12));
    s = split_along(v2(1, 1), Direction::from(v2(1, 1)));
    CHECK(s.y.norm() <= 1e-12);
    CHECK(s.t == Approx(std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("split_along is an isometric decomposition") {
    const auto pts = sample_gaussian(GaussianModel::standard(4), {}, 200, 9);
    const auto h = Direction::from(Vec::LinSpaced(4, 1.0, 2.5));
    for (const auto& x : pts) {
      const auto s = split_along(x, h);
      CHECK(std::abs(h.vec().dot(s.y)) <= 1e-12);
      CHECK((s.y + s.t * h.vec() - x).norm() <= 1e-12);
      CHECK(std::abs(x.squaredNorm() - s.y.squaredNorm() - s.t * s.t) <= 1e-10);
    }
  }

  TEST_CASE("adjoint derivative examples") {
    const auto e1 = Direction::axis(3, 0);
    CHECK(adjoint_derivative(psi_constant(1.0), e1, v3(0.7, 1, 2)) == Approx(-0.7));
    const auto h = Direction::from(v3(1, 2, 2));
    TestFunction lin{"linear", [&](const Vec& x) { return h(x); }, 1.0, {}};
    const Vec x = v3(0.3, -1.0, 2.0);
    const double t = h(x);
    CHECK(adjoint_derivative(lin, h, x) == Approx(1.0 - t * t).epsilon(1e-9));
    TestFunction th{"tanh_x1", [](const Vec& x) { return std::tanh(x[0]); }, 1.0, {}};
    CHECK(adjoint_derivative(th, e1, Vec::Zero(3)) == Approx(1.0).epsilon(1e-9));
    const auto analytic = psi_tanh(Vec::Unit(3, 0), 0.0);
    CHECK(adjoint_derivative(analytic, e1, Vec::Zero(3)) == Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(adjoint_derivative(th, e1, x, 0.0), ParameterError);
    CHECK_THROWS_AS(adjoint_derivative(th, e1, x, -1e-5), ParameterError);
  }

  TEST_CASE("analytic gradients of the test functions match finite differences") {
    const Vec x = v3(0.4, -0.3, 1.1);
    const std::vector<TestFunction> fns{psi_constant(2.0), psi_coordinate(3, 1), psi_tanh(v3(1, -2, 0.5), 0.3),
                                        psi_dist_clamp(v3(0, 0, 1), 0.8), psi_dist_clamp(v3(0, 0, 1), 0.2)};
    for (const auto& f : fns) {
      CAPTURE(f.id);
      REQUIRE(f.gradient);
      const Vec g = f.gradient(x);
      for (int i = 0; i < 3; ++i) {
        const Vec e = Vec::Unit(3, i);
        const double fd = (f(x + 1e-6 * e) - f(x - 1e-6 * e)) / 2e-6;
        CHECK(g[i] == Approx(fd).epsilon(1e-6).scale(1.0));
      }
      CHECK(observed_lipschitz(f, 3, 2000, 5) <= f.lipschitz_bound * (1.0 + 1e-9));
    }
  }

  TEST_CASE("sample mean within the CLT bound") {
    const auto pts = sample_gaussian(GaussianModel::standard(3), {}, 1000000, 21);
    REQUIRE(pts.size() == 1000000);
    Vec mean = Vec::Zero(3);
    for (const auto& p : pts) mean += p;
    mean /= 1e6;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i]) <= 4.0 / 1000.0);
  }

  TEST_CASE("samples projected onto a complement") {
    const std::vector<Vec> sub{Vec::Unit(3, 0)};
    const auto pts = sample_gaussian(GaussianModel::standard(3), sub, 5000, 22);
    for (const auto& p : pts) CHECK(std::abs(p[0]) <= 1e-12);
    const std::vector<Vec> skew{v3(1, 1, 0) / std::sqrt(2.0)};
    for (const auto& p : sample_gaussian(GaussianModel::standard(3), skew, 500, 23))
      CHECK(std::abs(p.dot(skew[0])) <= 1e-12);
    const std::vector<Vec> not_unit{v3(1, 1, 0)};
    CHECK_THROWS_AS(sample_gaussian(GaussianModel::standard(3), not_unit, 10, 1), ParameterError);
  }

  TEST_CASE("sampling is deterministic and thread-count invariant") {
    const unsigned saved = thread_count();
    set_thread_count(1);
    const auto a = sample_gaussian(GaussianModel::standard(3), {}, 20000, 31);
    const auto b = sample_gaussian(GaussianModel::standard(3), {}, 20000, 31);
    set_thread_count(4);
    const auto c = sample_gaussian(GaussianModel::standard(3), {}, 20000, 31);
    set_thread_count(saved);
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == b[i] && a[i] == c[i];
    CHECK(same);
    const auto d = sample_gaussian(GaussianModel::standard(3), {}, 20000, 32);
    CHECK(a[0] != d[0]);
  }

  TEST_CASE("Gauss-Hermite integrates the density to one") {
    for (int m = 1; m <= 3; ++m) {
      const auto& r = quad::gauss_hermite(m == 3 ? 32 : 64);
      const std::size_t q = r.nodes.size();
      std::size_t total = 1;
      for (int i = 0; i < m; ++i) total *= q;
      double sum = 0.0;
      Vec z(m);
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        double w = 1.0;
        double base = 1.0;
        for (int i = 0; i < m; ++i) {
          const std::size_t j = rest % q;
          rest /= q;
          z[i] = r.nodes[j];
          w *= r.weights[j];
          base *= gauss1(r.nodes[j]);
        }
        // The rule integrates against the normal weight; divide it out.
        sum += w * gaussian_density(m, z) / base;
      }
      CAPTURE(m);
      CHECK(std::abs(sum - 1.0) <= 1e-10);
    }
  }

  TEST_CASE("Gauss-Hermite moments") {
    const auto& r = quad::gauss_hermite(64);
    double m2 = 0.0, m4 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double t = r.nodes[i];
      m1 += r.weights[i] * t;
      m2 += r.weights[i] * t * t;
      m4 += r.weights[i] * t * t * t * t;
    }
    CHECK(std::abs(m1) <= 1e-13);
    CHECK(m2 == Approx(1.0).epsilon(1e-12));
    CHECK(m4 == Approx(3.0).epsilon(1e-12));
    const auto gl = quad::gauss_legendre(20, 0.0, 2.0);
    double cube = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) cube += gl.weights[i] * std::pow(gl.nodes[i], 3);
    CHECK(cube == Approx(4.0).epsilon(1e-13));
  }

  TEST_CASE("integration by parts on the whole space") {
    // int phi d_h psi dgamma = -int psi d*_h phi dgamma
    const auto h = Direction::from(v3(1, 0.5, -0.2));
    const TestFunction phi = psi_tanh(v3(0.8, -0.3, 0.4), 0.5);
    const TestFunction psi = psi_tanh(v3(-0.2, 1.0, 0.6), -0.1);
    const auto pts = sample_gaussian(GaussianModel::standard(3), {}, 400000, 41);
    SampleStats a, b;
    for (const auto& x : pts) {
      a.add(phi(x) * directional_derivative(psi, h.vec(), x));
      b.add(-psi(x) * adjoint_derivative(phi, h, x));
    }
    const auto ea = a.estimate(41);
    const auto eb = b.estimate(41);
    CHECK(std::abs(ea.value - eb.value) <= 3.0 * combined_se(ea, eb));
    CHECK(std::abs(ea.value) > 10.0 * ea.std_error);
  }

  TEST_CASE("complement bases are orthonormal and orthogonal to h") {
    const auto h = Direction::from(v3(1, 2, 3));
    const Mat b = complement_basis(h);
    CHECK(b.cols() == 2);
    CHECK((b.transpose() * b - Mat::Identity(2, 2)).norm() <= 1e-12);
    CHECK((b.transpose() * h.vec()).norm() <= 1e-12);
  }
}
