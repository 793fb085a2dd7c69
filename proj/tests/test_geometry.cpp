#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "qm/geometry.hpp"

using namespace qm;

namespace {

std::string reason_of(auto&& fn) {
  try {
    fn();
  } catch (const GeometryError& e) {
    return e.reason();
  }
  return "";
}

const std::vector<Point> kSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("unit square validates with area 1") {
    const Polygon p = validate_polygon(kSquare);
    CHECK(p.size() == 4);
    CHECK(polygon_area(p) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("invalid loops are rejected with a reason") {
    CHECK(reason_of([] { validate_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}); }) == "self-intersection");
    CHECK(reason_of([] { validate_polygon({{0, 0}, {1, 0}}); }) == "too-few-vertices");
    CHECK(reason_of([] { validate_polygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}); }) == "repeated-vertex");
    // a flat triangle folds back onto itself
    CHECK(reason_of([] { validate_polygon({{0, 0}, {1, 0}, {2, 0}}); }) != "");
    CHECK(reason_of([] { validate_polygon({{0, 0}, {NAN, 0}, {0, 1}}); }) == "non-finite");
  }

  TEST_CASE("clockwise loop is reversed keeping vertex 0") {
    const Polygon p = validate_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(p[0] == Point{0, 0});
    CHECK(signed_area(p.vertices()) > 0.0);
    CHECK(p == validate_polygon(kSquare));
  }

  TEST_CASE("validation is idempotent") {
    const Polygon p = validate_polygon({{0, 0}, {3, 0}, {2, 1}, {3, 3}, {0, 2}});
    CHECK(validate_polygon(p.vertices()) == p);
  }

  TEST_CASE("triangle area") { CHECK(polygon_area(validate_polygon({{0, 0}, {1, 0}, {0, 1}})) == 0.5); }

  TEST_CASE("collinear marked point is allowed") {
    const Polygon p = validate_polygon({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(polygon_area(p) == doctest::Approx(1.0));
  }

  TEST_CASE("quad_from_points") {
    const Quadrilateral q = quad_from_points({1, 2}, {0, 2}, {0, 0}, {1, 0});
    CHECK(q.marked() == std::array<std::size_t, 4>{0, 1, 2, 3});
    CHECK(q.corner(0) == Point{1, 2});
    CHECK(polygon_area(q.domain()) == doctest::Approx(2.0));
    // (1, 0, 1+i, i) runs clockwise
    CHECK(reason_of([] { quad_from_points({1, 0}, {0, 0}, {1, 1}, {0, 1}); }) != "");
    CHECK(reason_of([] { quad_from_points({1, 0}, {0, 0}, {0, 1}, {1, 1}); }) == "wrong-orientation");
    CHECK(reason_of([] { quad_from_points({0, 0}, {0, 0}, {1, 1}, {0, 1}); }) == "repeated-vertex");
    // Q1 of the equal-area experiment with r = s = 1/2, alpha = pi/4, beta = 3pi/4
    const double a = std::numbers::pi / 4.0;
    const double b = 3.0 * std::numbers::pi / 4.0;
    CHECK_NOTHROW(quad_from_points({1 + std::cos(a), std::sin(a)}, {std::cos(b), std::sin(b)}, {0, 0}, {1, 0}));
  }

  TEST_CASE("arcs partition the edges") {
    const Quadrilateral q =
        make_quadrilateral({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1.5, 2}, {1, 2}, {0, 2}, {0, 1}}, {1, 3, 5, 6});
    std::multiset<std::size_t> seen;
    for (int arc = 0; arc < 4; ++arc) {
      const auto v = q.arc_vertices(arc);
      REQUIRE(v.size() >= 2);
      CHECK(v.front() == q.marked()[arc]);
      CHECK(v.back() == q.marked()[(arc + 1) % 4]);
      for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        CHECK(q.arc_of_edge(v[k]) == arc);
        seen.insert(v[k]);
      }
    }
    CHECK(seen.size() == q.domain().size());
    CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == q.domain().size());
  }

  TEST_CASE("marked indices must be cyclic and distinct") {
    CHECK(reason_of([] { make_quadrilateral(kSquare, {0, 2, 1, 3}); }) == "bad-marked");
    CHECK(reason_of([] { make_quadrilateral(kSquare, {0, 0, 1, 3}); }) == "bad-marked");
    CHECK(reason_of([] { make_quadrilateral(kSquare, {0, 1, 2, 7}); }) == "bad-marked");
    CHECK_NOTHROW(make_quadrilateral(kSquare, {2, 3, 0, 1}));
  }

  TEST_CASE("reversal keeps the Dirichlet arcs") {
    // Clockwise loop, marked in loop order: z2 -> z3 is the top side and
    // z4 -> z1 the bottom side.
    const Quadrilateral q = make_quadrilateral({{0, 0}, {0, 2}, {1, 2}, {1, 0}}, {0, 1, 2, 3});
    CHECK(signed_area(q.domain().vertices()) > 0.0);
    using Pair = std::set<std::pair<double, double>>;
    auto side = [&](int a, int b) { return Pair{{q.corner(a).x, q.corner(a).y}, {q.corner(b).x, q.corner(b).y}}; };
    const std::set<Pair> dirichlet{side(1, 2), side(3, 0)};
    const std::set<Pair> expected{Pair{{0, 2}, {1, 2}}, Pair{{1, 0}, {0, 0}}};
    CHECK(dirichlet == expected);
    // marked order against the loop direction is rejected
    CHECK(reason_of([] { make_quadrilateral({{0, 0}, {0, 2}, {1, 2}, {1, 0}}, {3, 2, 1, 0}); }) == "bad-marked");
  }

  TEST_CASE("similarity") {
    const Polygon sq = validate_polygon(kSquare);
    const Polygon big = similarity(sq, 2.0, 0.0, {0, 0});
    CHECK(big[2] == Point{2, 2});
    const Polygon turned = similarity(sq, 1.0, std::numbers::pi / 2.0, {5, 0});
    CHECK(polygon_area(turned) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(turned[1].x == doctest::Approx(5.0));
    CHECK(turned[1].y == doctest::Approx(1.0));
    CHECK(similarity(sq, 1.0, 0.0, {0, 0}) == sq);
    CHECK_THROWS_AS(similarity(sq, 0.0, 0.0, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(similarity(sq, -1.0, 0.0, {0, 0}), std::invalid_argument);
  }

  TEST_CASE("similarity scales area by k^2 (random)") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 50; ++trial) {
      // star-shaped polygon from sorted angles
      std::vector<double> angles;
      for (int k = 0; k < 7; ++k) angles.push_back(ang(rng));
      std::sort(angles.begin(), angles.end());
      std::vector<Point> pts;
      for (double a : angles) {
        const double r = u(rng);
        pts.push_back({r * std::cos(a), r * std::sin(a)});
      }
      Polygon p = [&] {
        try {
          return validate_polygon(pts);
        } catch (const GeometryError&) {
          return validate_polygon(kSquare);
        }
      }();
      const double k = u(rng);
      const Polygon q = similarity(p, k, ang(rng), {u(rng), -u(rng)});
      CHECK(polygon_area(q) == doctest::Approx(k * k * polygon_area(p)).epsilon(1e-12));
    }
  }

  TEST_CASE("ring condenser") {
    const Polygon outer = regular_polygon(8, 2.0);
    const Polygon inner = regular_polygon(8, 1.0);
    CHECK_NOTHROW(RingCondenser(outer, inner));
    CHECK(reason_of([&] { RingCondenser(inner, outer); }) == "inner-not-inside");
    const Polygon shifted = regular_polygon(8, 1.0, {1.5, 0});
    CHECK(reason_of([&] { RingCondenser(outer, shifted); }) == "inner-not-inside");
    CHECK(reason_of([] { regular_polygon(8, -1.0); }) == "bad-radius");
  }

  TEST_CASE("equal_area_t") {
    const double half_pi = std::numbers::pi / 2.0;
    CHECK(equal_area_t(0.5, 0.5, half_pi, half_pi) == doctest::Approx(1.0).epsilon(1e-14));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> rs(0.05, 1.95);
    std::uniform_real_distribution<double> a(0.01, half_pi - 0.01);
    std::uniform_real_distribution<double> b(half_pi + 0.01, std::numbers::pi - 0.01);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const double r = rs(rng), s = rs(rng), al = a(rng), be = b(rng);
      const std::complex<double> z1 = 1.0 + 2.0 * r * std::polar(1.0, al);
      const std::complex<double> z2 = 2.0 * s * std::polar(1.0, be);
      std::vector<Point> q1{to_point(z1), to_point(z2), {0, 0}, {1, 0}};
      double area1 = 0;
      try {
        area1 = polygon_area(validate_polygon(q1));
      } catch (const GeometryError&) {
        continue;
      }
      const double t = equal_area_t(r, s, al, be);
      const double area2 = polygon_area(validate_polygon({{t, r}, {0, s}, {0, -s}, {t, -r}}));
      CHECK(std::abs(area2 - area1) <= 1e-12 * area1);
      ++checked;
    }
    CHECK(checked > 100);
  }
}
