#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "wibp/body_spec.hpp"
#include "wibp/graph_decomposition.hpp"

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

ConvexBody unit_disc() { return ConvexBody::make(make_ball(Vec::Zero(2), 1.0)); }

ConvexBody z_cylinder() {
  return ConvexBody::make(make_cylinder(make_ball(Vec::Zero(3), 1.0), Vec::Unit(3, 2)));
}

ConvexBody cube() {
  std::vector<Face> faces;
  for (int i = 0; i < 3; ++i) {
    faces.push_back({Vec::Unit(3, i), 1.0});
    faces.push_back({-Vec::Unit(3, i), 1.0});
  }
  return ConvexBody::make(make_polytope(std::move(faces)));
}

// Points y of the domain, drawn around the domain centre.
std::vector<Vec> domain_points(const GraphPair& pair, std::size_t count, std::uint64_t seed, double scale) {
  std::vector<Vec> out;
  const auto raw = sample_gaussian(GaussianModel::standard(pair.body().dim()),
                                   std::vector<Vec>{pair.direction().vec()}, 4 * count, seed);
  for (const auto& r : raw) {
    const Vec y = pair.domain_center() + scale * r;
    if (pair.in_domain(y)) out.push_back(y);
    if (out.size() == count) break;
  }
  return out;
}

}  // namespace

TEST_SUITE("graph_decomposition") {
  TEST_CASE("section examples") {
    auto s = section_interval(unit_disc(), Direction::axis(2, 1), v2(0.6, 0), 1e-12);
    REQUIRE_FALSE(s.empty);
    CHECK(s.lower == Approx(-0.8).epsilon(1e-11));
    CHECK(s.upper == Approx(0.8).epsilon(1e-11));
    CHECK(section_interval(unit_disc(), Direction::axis(2, 1), v2(1.2, 0), 1e-12).empty);

    const auto half = ConvexBody::make(make_halfspace(Vec::Unit(2, 0), 1.0));
    s = section_interval(half, Direction::axis(2, 0), Vec::Zero(2), 1e-12);
    CHECK(s.lower == -kInf);
    CHECK(s.upper == Approx(1.0).epsilon(1e-11));

    s = section_interval(z_cylinder(), Direction::axis(3, 2), v3(0.5, 0, 0), 1e-12);
    CHECK(s.lower == -kInf);
    CHECK(s.upper == kInf);

    CHECK_THROWS_AS(section_interval(unit_disc(), Direction::axis(2, 1), v2(0.6, 0.1), 1e-12), PreconditionError);
  }

  TEST_CASE("case classification") {
    CHECK(classify_case(unit_disc(), Direction::axis(2, 1), 16, 1) == CaseTag::both_finite);
    const auto half = ConvexBody::make(make_halfspace(Vec::Unit(2, 0), 1.0));
    CHECK(classify_case(half, Direction::axis(2, 0), 16, 1) == CaseTag::f_finite_only);
    CHECK(classify_case(half, Direction::from(v2(-1, 0)), 16, 1) == CaseTag::g_finite_only);
    CHECK(classify_case(z_cylinder(), Direction::axis(3, 2), 16, 1) == CaseTag::both_infinite);
    CHECK(classify_case(z_cylinder(), Direction::axis(3, 0), 16, 1) == CaseTag::both_finite);
    CHECK_THROWS_AS(classify_case(unit_disc(), Direction::axis(2, 1), 4, 1), ParameterError);
    CHECK(case_tag_name(CaseTag::g_finite_only) == "g_finite_only");
  }

  TEST_CASE("graph values and gradients") {
    const GraphPair disc = make_graph_pair(unit_disc(), Direction::axis(2, 1));
    auto g = graph_value_and_gradient(disc, Which::upper, Vec::Zero(2), 1e-5);
    CHECK(g.value == Approx(1.0).epsilon(1e-11));
    CHECK(g.gradient.norm() <= 1e-6);
    g = graph_value_and_gradient(disc, Which::upper, v2(0.6, 0), 1e-5);
    CHECK(g.value == Approx(0.8).epsilon(1e-11));
    CHECK(g.gradient[0] == Approx(-0.75).epsilon(1e-6));
    CHECK(std::abs(g.gradient[1]) <= 1e-10);
    g = graph_value_and_gradient(disc, Which::lower, v2(0.6, 0), 1e-5);
    CHECK(g.value == Approx(-0.8).epsilon(1e-11));
    CHECK(g.gradient[0] == Approx(0.75).epsilon(1e-6));
    CHECK_THROWS_AS(graph_value_and_gradient(disc, Which::upper, v2(1.0 - 1e-7, 0), 1e-5), MarginError);

    const double a = 0.7, c = 0.4;
    // {x2 < a x1 + c}
    const auto tilted = ConvexBody::make(make_halfspace(v2(-a, 1.0), c));
    const GraphPair tp = make_graph_pair(tilted, Direction::axis(2, 1));
    CHECK(tp.case_tag() == CaseTag::f_finite_only);
    for (double y : {-2.0, 0.0, 1.3}) {
      g = graph_value_and_gradient(tp, Which::upper, v2(y, 0), 1e-5);
      CHECK(g.value == Approx(a * y + c).epsilon(1e-10));
      CHECK(g.gradient[0] == Approx(a).epsilon(1e-7));
    }
    CHECK_THROWS_AS(graph_value_and_gradient(tp, Which::lower, Vec::Zero(2), 1e-5), CaseError);
    CHECK_THROWS_AS(tp.value(Which::lower, Vec::Zero(2)), CaseError);
  }

  TEST_CASE("gradients are orthogonal to h") {
    const auto body = ConvexBody::make(make_ellipsoid(Vec::Zero(3), v3(1.0, 0.7, 0.5)));
    const GraphPair pair = make_graph_pair(body, Direction::from(v3(0.3, 0.4, 1.0)));
    for (const auto& y : domain_points(pair, 50, 2, 0.3)) {
      const auto g = graph_value_and_gradient(pair, Which::upper, y, 1e-5);
      CHECK(std::abs(g.gradient.dot(pair.direction().vec())) <= 1e-10);
    }
  }

  TEST_CASE("boundary classification examples") {
    const auto disc = unit_disc();
    const GraphPair pair = make_graph_pair(disc, Direction::axis(2, 1));
    CHECK(boundary_classify(disc, pair, v2(0.6, 0.8), 1e-12) == BoundaryClass::upper_graph);
    CHECK(boundary_classify(disc, pair, v2(0.6, -0.8), 1e-12) == BoundaryClass::lower_graph);
    CHECK_THROWS_AS(boundary_classify(disc, pair, v2(0.3, 0.1), 1e-12), PreconditionError);
    const auto cyl = z_cylinder();
    const GraphPair cp = make_graph_pair(cyl, Direction::axis(3, 2));
    CHECK(boundary_classify(cyl, cp, v3(1, 0, 5), 1e-12) == BoundaryClass::vertical);
  }

  TEST_CASE("direction choice") {
    const auto ball = ConvexBody::make(make_ball(Vec::Zero(3), 1.0));
    std::vector<Direction> axes{Direction::axis(3, 0), Direction::axis(3, 1), Direction::axis(3, 2)};
    auto choice = choose_direction(ball, axes, 4000, 1);
    CHECK(choice.vertical_mass.value <= 3.0 * choice.vertical_mass.std_error + 2e-3);

    const auto cyl = z_cylinder();
    choice = choose_direction(cyl, {Direction::axis(3, 2), Direction::axis(3, 0)}, 4000, 2);
    CHECK(choice.index == 1);
    CHECK(choice.per_candidate[0].value > 0.99);
    // direct classification counts agree with the vertical-mass estimate
    const GraphPair cp = make_graph_pair(cyl, Direction::axis(3, 2));
    int vertical = 0;
    const auto pts = ray_cast_boundary(cyl, 500, 3, 1e-13);
    for (const auto& x : pts)
      if (boundary_classify(cyl, cp, x, 1e-12) == BoundaryClass::vertical) ++vertical;
    CHECK(vertical == static_cast<int>(pts.size()));
    CHECK_THROWS_AS(choose_direction(cyl, {Direction::axis(3, 2)}, 1000, 4), DirectionError);
    CHECK_THROWS_AS(choose_direction(cyl, {}, 1000, 4), ParameterError);

    const auto box = cube();
    const Direction diag = Direction::from(v3(1, 1, 1));
    choice = choose_direction(box, {Direction::axis(3, 0), diag}, 4000, 5);
    CHECK(choice.index == 1);
    // four of the six faces have normals orthogonal to e1
    CHECK(choice.per_candidate[0].value == Approx(4.0 / 6.0).epsilon(0.05));
    CHECK(choice.per_candidate[1].value == 0.0);

    const auto cands = default_candidates(4, 9);
    CHECK(cands.size() == 12);
    CHECK(cands[2].vec() == Vec::Unit(4, 2));
  }

  TEST_CASE("sections scale with the body") {
    const double tol = 1e-12;
    const Vec axes = v3(1.0, 0.7, 0.5);
    const Direction h = Direction::from(v3(0.2, -0.4, 1.0));
    const auto body = ConvexBody::make(make_ellipsoid(Vec::Zero(3), axes));
    const GraphPair pair = make_graph_pair(body, h);
    for (double lambda : {0.5, 2.0}) {
      const auto scaled = ConvexBody::make(make_ellipsoid(Vec::Zero(3), lambda * axes));
      for (const auto& y : domain_points(pair, 30, 6, 0.3)) {
        const Section s = section_interval(body, h, y, tol);
        const Section t = section_interval(scaled, h, lambda * y, tol);
        REQUIRE_FALSE(t.empty);
        CHECK(std::abs(t.lower - lambda * s.lower) <= 2.0 * lambda * tol + 1e-12);
        CHECK(std::abs(t.upper - lambda * s.upper) <= 2.0 * lambda * tol + 1e-12);
      }
    }
  }

  TEST_CASE("graph points have unit gauge") {
    std::vector<ConvexBody> bodies{ConvexBody::make(make_ellipsoid(v3(0.1, 0.0, -0.1), v3(1.0, 0.7, 0.5))),
                                   ConvexBody::make(random_polytope(3, 8, 42)),
                                   ConvexBody::make(make_halfspace(v3(1, 2, -1), 0.7))};
    for (const auto& body : bodies) {
      const GraphPair pair = make_graph_pair(body, Direction::from(v3(0.1, 0.2, 1.0)));
      for (const auto& y : domain_points(pair, 100, 7, 0.4)) {
        for (Which w : {Which::upper, Which::lower}) {
          if (!pair.finite(w)) continue;
          const Vec x = y + pair.value(w, y) * pair.direction().vec();
          CHECK(std::abs(minkowski_functional(body, x) - 1.0) <= 10.0 * kDefaultGaugeTol + 1e-9);
        }
      }
    }
  }

  TEST_CASE("upper graph concave and lower graph convex") {
    std::vector<ConvexBody> bodies{ConvexBody::make(make_ball(Vec::Zero(3), 1.0)),
                                   ConvexBody::make(make_ellipsoid(Vec::Zero(3), v3(1.0, 0.7, 0.5))),
                                   ConvexBody::make(random_polytope(3, 8, 42))};
    for (const auto& body : bodies) {
      const GraphPair pair = make_graph_pair(body, Direction::from(v3(0.3, 0.1, 1.0)));
      const auto ys = domain_points(pair, 2000, 8, 0.5);
      REQUIRE(ys.size() >= 2000);
      int violations = 0;
      for (std::size_t i = 0; i + 1 < ys.size(); i += 2) {
        const Vec m = 0.5 * (ys[i] + ys[i + 1]);
        const double slack = 4.0 * pair.tol() + 1e-11;
        if (pair.value(Which::upper, m) < 0.5 * (pair.value(Which::upper, ys[i]) + pair.value(Which::upper, ys[i + 1])) - slack)
          ++violations;
        if (pair.value(Which::lower, m) > 0.5 * (pair.value(Which::lower, ys[i]) + pair.value(Which::lower, ys[i + 1])) + slack)
          ++violations;
        CHECK(pair.value(Which::lower, ys[i]) < pair.value(Which::upper, ys[i]) - 2.0 * pair.tol());
      }
      CHECK(violations == 0);
    }
  }

  TEST_CASE("classification coverage on bounded shapes") {
    std::vector<std::pair<std::string, ConvexBody>> bodies{
        {"ball", ConvexBody::make(make_ball(Vec::Zero(3), 1.0))},
        {"ellipsoid", ConvexBody::make(make_ellipsoid(Vec::Zero(3), v3(1.0, 0.7, 0.5)))},
        {"polytope", ConvexBody::make(random_polytope(3, 8, 42))},
        {"translate", ConvexBody::make(make_translate(make_ball(Vec::Zero(3), 1.0), v3(2, 0, 0)))}};
    const Direction h = Direction::from(v3(0.31, -0.17, 0.93));
    for (const auto& [name, body] : bodies) {
      CAPTURE(name);
      const GraphPair pair = make_graph_pair(body, h);
      const auto pts = ray_cast_boundary(body, 1000, 10, 1e-13);
      int graph = 0;
      for (const auto& x : pts)
        if (boundary_classify(body, pair, x, 1e-12) != BoundaryClass::vertical) ++graph;
      CHECK(static_cast<double>(graph) / static_cast<double>(pts.size()) >= 0.99);
    }
  }

  TEST_CASE("vertical mass of boundary samples") {
    const auto body = ConvexBody::make(make_ball(Vec::Zero(2), 1.0));
    const auto samples = sample_boundary(body, 20000, 11);
    double total = 0.0;
    for (const auto& s : samples) {
      CHECK(std::abs(s.normal.norm() - 1.0) <= 1e-6);
      total += s.weight;
    }
    // mean weight is the Gaussian perimeter over the sphere area
    CHECK(total / static_cast<double>(samples.size()) * 2.0 * 3.141592653589793 == Approx(std::exp(-0.5)).epsilon(1e-6));
    const auto vm = vertical_mass(samples, Direction::axis(2, 0));
    CHECK(vm.value <= 3.0 * vm.std_error + 1e-3);
  }
}
