#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "qm/mesh.hpp"

using namespace qm;

namespace {

double dist_to_segment(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy);
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

long euler(const Mesh& m) {
  return static_cast<long>(m.num_nodes()) - static_cast<long>(count_edges(m)) + static_cast<long>(m.num_triangles());
}

Quadrilateral trapezoid(double h) { return quad_from_points({1, h}, {0, h - 1}, {0, 0}, {1, 0}); }

RingCondenser squares(double outer, double inner) {
  auto sq = [](double s) { return validate_polygon({{-s / 2, -s / 2}, {s / 2, -s / 2}, {s / 2, s / 2}, {-s / 2, s / 2}}); };
  return RingCondenser(sq(outer), sq(inner));
}

}  // namespace

TEST_SUITE("mesh") {
  TEST_CASE("unit square conserves area") {
    const Mesh m = triangulate(quad_from_points({1, 1}, {0, 1}, {0, 0}, {1, 0}), 0.5);
    CHECK(m.num_triangles() >= 2);
    CHECK(mesh_area(m) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(check_mesh(m));
    CHECK(euler(m) == 1);
  }

  TEST_CASE("ring of squares conserves area and has an empty hole") {
    const Mesh m = triangulate(squares(4.0, 1.0), 0.1);
    CHECK(std::abs(mesh_area(m) - 15.0) <= 1e-12);
    CHECK_NOTHROW(check_mesh(m));
    CHECK(euler(m) == 0);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      const auto& tri = m.triangles[t];
      const Point c{(m.nodes[tri[0]].x + m.nodes[tri[1]].x + m.nodes[tri[2]].x) / 3,
                    (m.nodes[tri[0]].y + m.nodes[tri[1]].y + m.nodes[tri[2]].y) / 3};
      CHECK_FALSE((std::abs(c.x) < 0.5 && std::abs(c.y) < 0.5));
    }
  }

  TEST_CASE("triangles positive, bounded area, angle bound") {
    const Quadrilateral q = trapezoid(3.0);
    const double max_area = 0.05;
    const Mesh m = triangulate(q, max_area);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
      CHECK(triangle_area(m, t) > 0.0);
      CHECK(triangle_area(m, t) <= max_area * (1 + 1e-12));
    }
    // the trapezoid's acute corner is 45 degrees, so 25 is attainable everywhere
    CHECK(min_angle_deg(m) >= 25.0 - 1e-9);
  }

  TEST_CASE("boundary tags reconstruct the arcs") {
    const Quadrilateral q =
        make_quadrilateral({{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1.5, 2}, {1, 2}, {0, 2}, {0, 1}}, {1, 3, 5, 6});
    const Mesh m = triangulate(q, 0.02);
    CHECK_NOTHROW(check_mesh(m));
    for (int arc = 0; arc < 4; ++arc) {
      const auto verts = q.arc_vertices(arc);
      const auto tag = static_cast<BoundaryTag>(arc);
      double length = 0.0;
      std::set<std::pair<double, double>> mesh_pts;
      for (const auto& e : m.boundary) {
        if (e.tag != tag) continue;
        const Point a = m.nodes[e.a], b = m.nodes[e.b];
        length += std::hypot(b.x - a.x, b.y - a.y);
        double best = INFINITY;
        for (std::size_t k = 0; k + 1 < verts.size(); ++k) {
          const Point p{(a.x + b.x) / 2, (a.y + b.y) / 2};
          best = std::min(best, dist_to_segment(p, q.domain()[verts[k]], q.domain()[verts[k + 1]]));
        }
        CHECK(best <= 1e-12);
        mesh_pts.insert({a.x, a.y});
        mesh_pts.insert({b.x, b.y});
      }
      double arc_length = 0.0;
      for (std::size_t k = 0; k + 1 < verts.size(); ++k) {
        const Point a = q.domain()[verts[k]], b = q.domain()[verts[k + 1]];
        arc_length += std::hypot(b.x - a.x, b.y - a.y);
        CHECK(mesh_pts.contains({a.x, a.y}));
      }
      CHECK(length == doctest::Approx(arc_length).epsilon(1e-12));
    }
    // marked points are mesh nodes
    for (int j = 0; j < 4; ++j) {
      bool found = false;
      for (const Point& p : m.nodes) found = found || p == q.corner(j);
      CHECK(found);
    }
  }

  TEST_CASE("every Gamma2 edge lies on z2 -> z3") {
    const Quadrilateral q = trapezoid(2.0);
    const Mesh m = triangulate(q, 0.01);
    for (const auto& e : m.boundary) {
      if (e.tag != BoundaryTag::Gamma2) continue;
      CHECK(dist_to_segment(m.nodes[e.a], q.corner(1), q.corner(2)) <= 1e-12);
      CHECK(dist_to_segment(m.nodes[e.b], q.corner(1), q.corner(2)) <= 1e-12);
    }
  }

  TEST_CASE("refine all doubles triangles and keeps area") {
    const Mesh m = triangulate(trapezoid(2.0), 0.05);
    std::vector<int> all(m.num_triangles());
    for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<int>(t);
    const RefineResult r = refine_with_history(m, all);
    CHECK(r.mesh.num_triangles() >= 2 * m.num_triangles());
    CHECK(mesh_area(r.mesh) == doctest::Approx(mesh_area(m)).epsilon(1e-12));
    CHECK_NOTHROW(check_mesh(r.mesh));
    CHECK(euler(r.mesh) == 1);
  }

  TEST_CASE("refine with nothing marked is the identity") {
    const Mesh m = triangulate(trapezoid(2.0), 0.05);
    const RefinementMarking none = dorfler_mark(std::vector<double>(m.num_triangles(), 0.0));
    CHECK(none.marked.empty());
    const Mesh r = refine(m, none);
    CHECK(r.num_triangles() == m.num_triangles());
    CHECK(r.num_nodes() == m.num_nodes());
  }

  TEST_CASE("children tile their parents") {
    const Mesh m = triangulate(trapezoid(3.0), 0.1);
    std::vector<int> marked;
    for (std::size_t t = 0; t < m.num_triangles(); t += 3) marked.push_back(static_cast<int>(t));
    const RefineResult r = refine_with_history(m, marked);
    std::map<int, double> child_area;
    for (std::size_t t = 0; t < r.mesh.num_triangles(); ++t) child_area[r.parent_triangle[t]] += triangle_area(r.mesh, t);
    REQUIRE(child_area.size() == m.num_triangles());
    for (const auto& [parent, area] : child_area) {
      CHECK(std::abs(area - triangle_area(m, static_cast<std::size_t>(parent))) <= 1e-12);
    }
  }

  TEST_CASE("repeated local refinement keeps half the initial angle") {
    Mesh m = triangulate(trapezoid(3.0), 0.1);
    const double initial = min_angle_deg(m);
    for (int level = 0; level < 12; ++level) {
      // refine the triangles touching the reentrant-ish corner (0, 2)
      std::vector<double> ind(m.num_triangles(), 0.0);
      for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        for (int v : m.triangles[t]) {
          const Point p = m.nodes[v];
          ind[t] = std::max(ind[t], 1.0 / (1e-9 + std::hypot(p.x, p.y - 2.0)));
        }
      }
      m = refine(m, dorfler_mark(ind, 0.3));
      CHECK_NOTHROW(check_mesh(m));
    }
    CHECK(min_angle_deg(m) >= initial / 2.0);
    CHECK(euler(m) == 1);
  }

  TEST_CASE("ring refinement stays conforming") {
    Mesh m = triangulate(squares(4.0, 1.0), 0.5);
    std::vector<int> all(m.num_triangles());
    for (std::size_t t = 0; t < all.size(); ++t) all[t] = static_cast<int>(t);
    m = refine_with_history(m, all).mesh;
    CHECK_NOTHROW(check_mesh(m));
    CHECK(euler(m) == 0);
    CHECK(std::abs(mesh_area(m) - 15.0) <= 1e-12);
  }

  TEST_CASE("dorfler marking picks the minimal heavy set") {
    const RefinementMarking mk = dorfler_mark({1.0, 5.0, 0.5, 3.0}, 0.5);
    // total 9.5; 5 alone is >= 4.75
    REQUIRE(mk.marked.size() == 1);
    CHECK(mk.marked[0] == 1);
    const RefinementMarking mk2 = dorfler_mark({1.0, 1.0, 1.0, 1.0}, 0.6);
    CHECK(mk2.marked.size() == 3);
  }

  TEST_CASE("tag names round trip") {
    for (auto tag : {BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma3, BoundaryTag::Gamma4,
                     BoundaryTag::PlateE, BoundaryTag::PlateF}) {
      CHECK(parse_boundary_tag(to_string(tag)) == tag);
    }
    CHECK_FALSE(parse_boundary_tag("Gamma5").has_value());
  }

  TEST_CASE("many-sided ring meshes") {
    const RingCondenser ring(regular_polygon(96, 2.0), regular_polygon(96, 1.0));
    const Mesh m = triangulate(ring, TriangulateOptions{});
    CHECK_NOTHROW(check_mesh(m));
    const double expected = polygon_area(ring.outer()) - polygon_area(ring.inner());
    CHECK(mesh_area(m) == doctest::Approx(expected).epsilon(1e-12));
  }
}
