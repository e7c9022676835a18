#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "wibp/body_spec.hpp"
#include "wibp/quadrature.hpp"
#include "wibp/surface_measure.hpp"

using namespace wibp;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

double phi(double t) { return std::exp(-0.5 * t * t) * kInvSqrt2Pi; }

double integrate_line(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

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

ConvexBody slab(int n) {
  return ConvexBody::make(make_polytope({{Vec::Unit(n, 0), 1.0}, {-Vec::Unit(n, 0), 1.0}}));
}

// Gaussian perimeter of the ball of radius r about 0 in R^n.
double ball_perimeter(int n, double r) {
  return quad::sphere_area(n) * std::pow(r, n - 1) * std::exp(-0.5 * r * r) / std::pow(2.0 * kPi, 0.5 * n);
}

}  // namespace

TEST_SUITE("surface_measure") {
  TEST_CASE("area formula over a flat graph through the origin") {
    for (int n : {2, 3, 4}) {
      const auto body = ConvexBody::make(make_halfspace(Vec::Unit(n, n - 1), 0.0));
      const GraphPair pair = make_graph_pair(body, Direction::axis(n, n - 1));
      const auto e = area_formula_integral(pair, Which::upper, [](const GraphPoint&) { return 1.0; },
                                           GaussianModel::standard(n), Budget{}, 1);
      CAPTURE(n);
      CHECK(e.method == Method::gauss_hermite);
      CHECK(e.std_error == 0.0);
      CHECK(e.value == Approx(kInvSqrt2Pi).epsilon(1e-10));
    }
  }

  TEST_CASE("area formula over tilted hyperplanes through the origin") {
    for (double a : {0.5, 1.0, 3.0}) {
      const auto body = ConvexBody::make(make_halfspace(v2(-a, 1.0), 0.0));
      const GraphPair pair = make_graph_pair(body, Direction::axis(2, 1));
      const auto e = area_formula_integral(pair, Which::upper, [](const GraphPoint&) { return 1.0; },
                                           GaussianModel::standard(2), Budget{}, 1);
      const double oracle = std::sqrt(1.0 + a * a) *
                            integrate_line([a](double s) { return phi(a * s) * phi(s); }, -kInf, kInf);
      CAPTURE(a);
      CHECK(oracle == Approx(kInvSqrt2Pi).epsilon(1e-12));
      CHECK(e.value == Approx(oracle).epsilon(1e-5));
      Budget fine;
      fine.order = 160;
      const auto ef = area_formula_integral(pair, Which::upper, [](const GraphPoint&) { return 1.0; },
                                            GaussianModel::standard(2), fine, 1);
      CHECK(ef.value == Approx(oracle).epsilon(1e-9));
    }
  }

  TEST_CASE("area formula over the upper half circle") {
    const auto body = ConvexBody::make(make_ball(Vec::Zero(2), 1.0));
    const GraphPair pair = make_graph_pair(body, Direction::axis(2, 1));
    const auto e = area_formula_integral(pair, Which::upper, [](const GraphPoint&) { return 1.0; },
                                         GaussianModel::standard(2), Budget{}, 1);
    boost::math::quadrature::tanh_sinh<double> ts;
    const double oracle = ts.integrate(
        [](double y, double yc) {
          const double d = std::abs(yc);
          const double f = std::sqrt(d * (2.0 - d));
          return phi(f) / f * phi(y);
        },
        -1.0, 1.0, 1e-14);
    CHECK(oracle == Approx(std::exp(-0.5) / 2.0).epsilon(1e-10));
    CHECK(e.method == Method::polar_gauss);
    CHECK(e.value == Approx(oracle).epsilon(1e-3));
  }

  TEST_CASE("graph points carry unit normals") {
    const auto body = ConvexBody::make(make_ellipsoid(Vec::Zero(3), v3(1.0, 0.7, 0.5)));
    const GraphPair pair = make_graph_pair(body, Direction::from(v3(0.2, 0.1, 1.0)));
    double worst = 0.0;
    Budget b;
    b.order = 16;
    area_formula_integral(
        pair, Which::upper,
        [&](const GraphPoint& gp) {
          worst = std::max(worst, std::abs(gp.normal.norm() - 1.0));
          return 1.0;
        },
        GaussianModel::standard(3), b, 1);
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("epigraph perimeter examples") {
    const Direction h = Direction::axis(2, 1);
    const auto model = GaussianModel::standard(2);
    for (double c : {-0.5, 0.0, 1.0}) {
      GraphFunction f{[c](const Vec&) { return c; }, {}, {}};
      CHECK(epigraph_perimeter(f, h, model, Budget{}, 1).value == Approx(phi(c)).epsilon(1e-10));
    }
    for (double a : {0.0, 1.0, 3.0}) {
      GraphFunction f{[a](const Vec& y) { return a * y[0]; }, {}, {}};
      CHECK(epigraph_perimeter(f, h, model, Budget{}, 1).value == Approx(kInvSqrt2Pi).epsilon(1e-5));
    }
  }

  TEST_CASE("epigraph perimeter of the absolute value") {
    // f(y) = |y| on the line: two half-lines through the origin
    const double oracle = 2.0 * integrate_line([](double y) { return phi(y) * std::sqrt(2.0) * phi(y); }, 0.0, kInf);
    CHECK(oracle == Approx(kInvSqrt2Pi).epsilon(1e-12));
    GraphFunction f;
    f.value = [](const Vec& y) { return std::abs(y[0]); };
    f.gradient = [](const Vec& y) {
      Vec g = Vec::Zero(2);
      g[0] = y[0] >= 0.0 ? 1.0 : -1.0;
      return g;
    };
    Budget b;
    b.order = 64;
    const auto e = epigraph_perimeter(f, Direction::axis(2, 1), GaussianModel::standard(2), b, 1);
    CHECK(e.value == Approx(oracle).epsilon(1e-8));
  }

  TEST_CASE("epigraph restricted to a domain") {
    // f = 0 on {y > 0}: half of the flat perimeter
    GraphFunction f{[](const Vec&) { return 0.0; }, {}, [](const Vec& y) { return y[0] > 0.0; }};
    const auto e = epigraph_perimeter(f, Direction::axis(2, 1), GaussianModel::standard(2), Budget{}, 1);
    CHECK(e.value == Approx(0.5 * kInvSqrt2Pi).epsilon(1e-3));
  }

  TEST_CASE("section measure examples") {
    const auto model3 = GaussianModel::standard(3);
    Budget b;
    b.samples = 500;
    const auto half = ConvexBody::make(make_halfspace(Vec::Unit(3, 0), 1.0));
    const auto e = subspace_hausdorff(half, {Vec::Unit(3, 0)}, {}, model3, b, 1);
    CHECK(e.value == Approx(phi(1.0)).epsilon(1e-9));

    const auto disc = ConvexBody::make(make_ball(Vec::Zero(2), 1.0));
    const auto full = subspace_hausdorff(disc, {Vec::Unit(2, 0), Vec::Unit(2, 1)}, {}, GaussianModel::standard(2), b, 1);
    CHECK(full.std_error == 0.0);
    CHECK(full.value == Approx(std::exp(-0.5)).epsilon(1e-6));

    const auto ball = ConvexBody::make(make_ball(Vec::Zero(3), 1.0));
    const auto sphere = subspace_hausdorff(ball, {Vec::Unit(3, 0), Vec::Unit(3, 1), Vec::Unit(3, 2)}, {}, model3, b, 1);
    CHECK(sphere.value == Approx(ball_perimeter(3, 1.0)).epsilon(1e-4));

    const auto ell = ConvexBody::make(make_ellipsoid(Vec::Zero(3), v3(1.0, 0.7, 0.5)));
    const auto f1 = subspace_hausdorff(ell, {Vec::Unit(3, 0)}, {}, model3, b, 2);
    const auto f2 = subspace_hausdorff(ell, {Vec::Unit(3, 0), Vec::Unit(3, 1)}, {}, model3, b, 2);
    CHECK(f1.value <= f2.value + 3.0 * combined_se(f1, f2));
    CHECK(f1.value < f2.value);

    // a region keeps only the part of the circle with x1 > 0
    const auto halfc = subspace_hausdorff(disc, {Vec::Unit(2, 0), Vec::Unit(2, 1)},
                                          [](const Vec& x) { return x[0] > 0.0; }, GaussianModel::standard(2), b, 1);
    CHECK(halfc.value == Approx(0.5 * std::exp(-0.5)).epsilon(1e-3));

    CHECK_THROWS_AS(subspace_hausdorff(ell, {}, {}, model3, b, 1), UnsupportedError);
    const auto ball5 = ConvexBody::make(make_ball(Vec::Zero(5), 1.0));
    std::vector<Vec> four;
    for (int i = 0; i < 4; ++i) four.push_back(Vec::Unit(5, i));
    CHECK_THROWS_AS(subspace_hausdorff(ball5, four, {}, GaussianModel::standard(5), b, 1), UnsupportedError);
  }

  TEST_CASE("total boundary measure examples") {
    const auto model2 = GaussianModel::standard(2);
    const auto disc = ConvexBody::make(make_ball(Vec::Zero(2), 1.0));
    const GraphPair dp = make_graph_pair(disc, Direction::axis(2, 1));
    CHECK(total_boundary_measure(disc, dp, model2, Budget{}, 1).value == Approx(std::exp(-0.5)).epsilon(1e-3));

    const auto half = ConvexBody::make(make_halfspace(Vec::Unit(2, 0), 1.0));
    const GraphPair hp = make_graph_pair(half, Direction::axis(2, 0));
    CHECK(total_boundary_measure(half, hp, model2, Budget{}, 1).value == Approx(phi(1.0)).epsilon(1e-10));

    const auto sl = slab(2);
    const GraphPair sp = make_graph_pair(sl, Direction::axis(2, 0));
    CHECK(total_boundary_measure(sl, sp, model2, Budget{}, 1).value == Approx(2.0 * phi(1.0)).epsilon(1e-10));

    const auto cyl = ConvexBody::make(make_cylinder(make_ball(Vec::Zero(3), 1.0), Vec::Unit(3, 2)));
    const GraphPair cp = make_graph_pair(cyl, Direction::axis(3, 0));
    CHECK(total_boundary_measure(cyl, cp, GaussianModel::standard(3), Budget{}, 1).value ==
          Approx(std::exp(-0.5)).epsilon(1e-3));
    const GraphPair vertical = make_graph_pair(cyl, Direction::from(v3(1, 0, 0.01)));
    CHECK_THROWS_AS(total_boundary_measure(cyl, make_graph_pair(cyl, Direction::axis(3, 2)), GaussianModel::standard(3),
                                           Budget{}, 1),
                    CaseError);
    CHECK_NOTHROW(total_boundary_measure(cyl, vertical, GaussianModel::standard(3), Budget{}, 1));
  }

  TEST_CASE("vertical-dominated direction is rejected") {
    // a tall box: four of its six faces are parallel to e3
    std::vector<Face> faces;
    for (int i = 0; i < 3; ++i) {
      faces.push_back({Vec::Unit(3, i), i == 2 ? 3.0 : 1.0});
      faces.push_back({-Vec::Unit(3, i), i == 2 ? 3.0 : 1.0});
    }
    const auto box = ConvexBody::make(make_polytope(faces));
    const GraphPair pair = make_graph_pair(box, Direction::axis(3, 2));
    CHECK_THROWS_AS(total_boundary_measure(box, pair, GaussianModel::standard(3), Budget{}, 1), DirectionError);
  }

  TEST_CASE("Monte Carlo path in higher dimension") {
    const int n = 5;
    const auto ball = ConvexBody::make(make_ball(Vec::Zero(n), 1.2));
    const GraphPair pair = make_graph_pair(ball, Direction::axis(n, 0));
    const auto e = total_boundary_measure(ball, pair, GaussianModel::standard(n), Budget{}, 3);
    CHECK(e.method == Method::monte_carlo);
    CHECK(e.std_error > 0.0);
    CHECK(std::abs(e.value - ball_perimeter(n, 1.2)) <= 3.0 * e.std_error);
  }

  TEST_CASE("Minkowski content examples") {
    const std::vector<double> eps{0.04, 0.02, 0.01};
    struct Case {
      std::string name;
      ConvexBody body;
      double target;
    };
    const std::vector<Case> cases{
        {"halfspace", ConvexBody::make(make_halfspace(Vec::Unit(2, 0), 1.0)), phi(1.0)},
        {"disc", ConvexBody::make(make_ball(Vec::Zero(2), 1.0)), std::exp(-0.5)},
        {"slab", slab(2), 2.0 * phi(1.0)},
    };
    for (const auto& c : cases) {
      CAPTURE(c.name);
      const auto mk = minkowski_content_perimeter(c.body, eps, 50000, 5);
      CHECK(mk.quotients.size() == 3);
      CHECK(std::abs(mk.estimate.value - c.target) <= 3.0 * mk.estimate.std_error + 1e-9);
      CHECK(std::abs(mk.estimate.value - c.target) <= 0.02 * c.target);
      // the quotient at eps matches the exact shell mass for the halfspace
      if (c.name == "halfspace")
        CHECK(mk.quotients[2] == Approx((normal_cdf(1.01) - normal_cdf(1.0)) / 0.01).epsilon(1e-2));
    }
    const auto disc = ConvexBody::make(make_ball(Vec::Zero(2), 1.0));
    CHECK_THROWS_AS(minkowski_content_perimeter(disc, {0.02, 0.01}, 1000, 1), ParameterError);
    CHECK_THROWS_AS(minkowski_content_perimeter(disc, {0.2, 0.1, 0.05}, 1000, 1), ParameterError);
    CHECK_THROWS_AS(minkowski_content_perimeter(disc, {0.01, 0.02, 0.04}, 1000, 1), ParameterError);
  }

  TEST_CASE("upper and lower contributions agree on symmetric bodies") {
    std::vector<std::pair<std::string, ConvexBody>> bodies{
        {"ball3", ConvexBody::make(make_ball(Vec::Zero(3), 1.0))},
        {"ellipsoid3", ConvexBody::make(make_ellipsoid(Vec::Zero(3), v3(1.0, 0.7, 0.5)))},
        {"slab4", slab(4)},
        {"ball5", ConvexBody::make(make_ball(Vec::Zero(5), 1.0))}};
    for (const auto& [name, body] : bodies) {
      CAPTURE(name);
      const int n = body.dim();
      const GraphPair pair = make_graph_pair(body, Direction::from(Vec::LinSpaced(n, 1.0, 2.0)));
      const auto up = epigraph_perimeter(pair, Which::upper, GaussianModel::standard(n), Budget{}, 7);
      const auto lo = epigraph_perimeter(pair, Which::lower, GaussianModel::standard(n), Budget{}, 7);
      CHECK(std::abs(up.value - lo.value) <= std::max(3.0 * combined_se(up, lo), 1e-9 * up.value));
    }
  }

  TEST_CASE("graph integrals are finite") {
    for (int n = 2; n <= 5; ++n) {
      const auto body = ConvexBody::make(random_polytope(n, 2 * n + 2, 40 + static_cast<std::uint64_t>(n)));
      const GraphPair pair = make_graph_pair(body, Direction::from(Vec::LinSpaced(n, 0.5, 1.5)));
      for (Which w : {Which::upper, Which::lower}) {
        const auto e = epigraph_perimeter(pair, w, GaussianModel::standard(n), Budget{}, 8);
        CAPTURE(n);
        CHECK(std::isfinite(e.value));
        CHECK(std::isfinite(e.std_error));
        CHECK(e.value > 0.0);
      }
    }
  }
}
