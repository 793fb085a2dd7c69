#include "qm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qm {

namespace {

// Error-free transformations for the exact orientation fallback.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  e = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

// Adds `b` into a nonoverlapping expansion sorted by increasing magnitude.
void grow_expansion(std::vector<double>& e, double b) {
  double q = b;
  std::vector<double> h;
  h.reserve(e.size() + 1);
  for (double ei : e) {
    double s = 0.0;
    double err = 0.0;
    two_sum(q, ei, s, err);
    if (err != 0.0) h.push_back(err);
    q = s;
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  e.swap(h);
}

double orient2d_exact(Point a, Point b, Point c) {
  // ax*by - ax*cy - cx*by - ay*bx + ay*cx + cy*bx, every product split exactly.
  const double terms[6][2] = {{a.x, b.y},  {-a.x, c.y}, {-c.x, b.y},
                              {-a.y, b.x}, {a.y, c.x},  {c.y, b.x}};
  std::vector<double> expansion;
  for (const auto& t : terms) {
    double p = 0.0;
    double e = 0.0;
    two_product(t[0], t[1], p, e);
    grow_expansion(expansion, e);
    grow_expansion(expansion, p);
  }
  for (auto it = expansion.rbegin(); it != expansion.rend(); ++it) {
    if (*it != 0.0) return *it;
  }
  return 0.0;
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

double orient2d(Point a, Point b, Point c) {
  const double left = (a.x - c.x) * (b.y - c.y);
  const double right = (a.y - c.y) * (b.x - c.x);
  const double det = left - right;
  const double bound = 3.3306690738754716e-16 * (std::abs(left) + std::abs(right));
  if (det > bound || -det > bound) return det;
  return orient2d_exact(a, b, c);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int d1 = sign(orient2d(c, d, a));
  const int d2 = sign(orient2d(c, d, b));
  const int d3 = sign(orient2d(a, b, c));
  const int d4 = sign(orient2d(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

double signed_area(const std::vector<Point>& v) {
  double twice = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

bool is_clockwise(const std::vector<Point>& vertices) { return signed_area(vertices) < 0.0; }

Polygon validate_polygon(std::vector<Point> v) {
  const std::size_t n = v.size();
  if (n < 3) {
    throw GeometryError("too-few-vertices",
                        "polygon needs at least 3 vertices, got " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!finite(v[i])) {
      throw GeometryError("non-finite", "vertex " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == v[(i + 1) % n]) {
      throw GeometryError("repeated-vertex",
                          "vertices " + std::to_string(i) + " and " +
                              std::to_string((i + 1) % n) + " coincide");
    }
  }
  // Nonadjacent edges must be disjoint; adjacent edges may only share
  // their common vertex (a collinear fold-back is an overlap).
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = v[i];
    const Point b = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = v[j];
      const Point d = v[(j + 1) % n];
      const bool next = j == i + 1;
      const bool prev = (j + 1) % n == i;
      if (next || prev) {
        const Point shared = next ? b : a;
        const Point far_ab = next ? a : b;
        const Point far_cd = next ? d : c;
        if (orient2d(far_ab, shared, far_cd) == 0.0) {
          const Point u = far_ab - shared;
          const Point w = far_cd - shared;
          if (u.x * w.x + u.y * w.y > 0.0) {
            throw GeometryError("self-intersection", "edges " + std::to_string(i) + " and " +
                                                         std::to_string(j) + " overlap");
          }
        }
        continue;
      }
      if (segments_intersect(a, b, c, d)) {
        throw GeometryError("self-intersection", "edges " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " intersect");
      }
    }
  }
  const double area = signed_area(v);
  if (area == 0.0) throw GeometryError("zero-area", "polygon has zero area");
  if (area < 0.0) std::reverse(v.begin() + 1, v.end());
  return Polygon(std::move(v));
}

double polygon_area(const Polygon& p) { return signed_area(p.vertices()); }

bool point_in_polygon(Point p, const Polygon& poly) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % n];
    const double o = orient2d(a, b, p);
    if (o == 0.0 && on_segment(p, a, b)) return false;
    if ((a.y > p.y) != (b.y > p.y)) {
      // Upward edge: p is left of it when o > 0; downward edge mirrored.
      if ((b.y > a.y) == (o > 0.0)) inside = !inside;
    }
  }
  return inside;
}

Quadrilateral::Quadrilateral(Polygon domain, std::array<std::size_t, 4> marked)
    : domain_(std::move(domain)), marked_(marked) {
  const std::size_t n = domain_.size();
  for (std::size_t m : marked_) {
    if (m >= n) throw GeometryError("bad-marked", "marked index out of range");
  }
  std::size_t prev = 0;
  for (int k = 1; k < 4; ++k) {
    const std::size_t offset = (marked_[k] + n - marked_[0]) % n;
    if (offset <= prev) {
      throw GeometryError("bad-marked",
                          "marked indices must be distinct and in counterclockwise order");
    }
    prev = offset;
  }
}

int Quadrilateral::arc_of_edge(std::size_t edge) const {
  const std::size_t n = domain_.size();
  const std::size_t offset = (edge + n - marked_[0]) % n;
  for (int j = 3; j >= 1; --j) {
    if (offset >= (marked_[j] + n - marked_[0]) % n) return j;
  }
  return 0;
}

std::vector<std::size_t> Quadrilateral::arc_vertices(int arc) const {
  const std::size_t n = domain_.size();
  const std::size_t start = marked_[arc];
  const std::size_t stop = marked_[(arc + 1) % 4];
  std::vector<std::size_t> out{start};
  for (std::size_t i = (start + 1) % n;; i = (i + 1) % n) {
    out.push_back(i);
    if (i == stop) break;
  }
  return out;
}

Quadrilateral quad_from_points(Point z1, Point z2, Point z3, Point z4) {
  std::vector<Point> v{z1, z2, z3, z4};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      if (v[i] == v[j]) throw GeometryError("repeated-vertex", "quadrilateral points coincide");
    }
  }
  if (is_clockwise(v)) {
    throw GeometryError("wrong-orientation",
                        "points must be given in counterclockwise order z1, z2, z3, z4");
  }
  return Quadrilateral(validate_polygon(std::move(v)), {0, 1, 2, 3});
}

Quadrilateral make_quadrilateral(std::vector<Point> vertices, std::array<std::size_t, 4> marked) {
  const std::size_t n = vertices.size();
  const bool reversed = n >= 3 && is_clockwise(vertices);
  Polygon poly = validate_polygon(std::move(vertices));
  if (reversed) {
    for (auto& m : marked) {
      if (m >= n) throw GeometryError("bad-marked", "marked index out of range");
      m = (n - m) % n;
    }
    // Reversal visits z1..z4 as z1, z4, z3, z2; starting from z2 keeps
    // {arc 2, arc 4} as the Dirichlet pair, so the modulus is unchanged.
    marked = {marked[1], marked[0], marked[3], marked[2]};
  }
  return Quadrilateral(std::move(poly), marked);
}

RingCondenser::RingCondenser(Polygon outer, Polygon inner)
    : outer_(std::move(outer)), inner_(std::move(inner)) {
  for (const Point& p : inner_.vertices()) {
    if (!point_in_polygon(p, outer_)) {
      throw GeometryError("inner-not-inside", "inner plate is not strictly inside the outer one");
    }
  }
  const std::size_t n = outer_.size();
  const std::size_t m = inner_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (segments_intersect(outer_[i], outer_.vertex(i + 1), inner_[j], inner_.vertex(j + 1))) {
        throw GeometryError("inner-not-inside", "inner and outer boundaries intersect");
      }
    }
  }
}

Polygon similarity(const Polygon& p, double scale, double rotation, Point translation) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("similarity scale must be positive");
  }
  const std::complex<double> factor = std::polar(scale, rotation);
  const std::complex<double> shift = to_complex(translation);
  std::vector<Point> out;
  out.reserve(p.size());
  for (const Point& v : p.vertices()) out.push_back(to_point(factor * to_complex(v) + shift));
  return validate_polygon(std::move(out));
}

Quadrilateral similarity(const Quadrilateral& q, double scale, double rotation, Point translation) {
  return Quadrilateral(similarity(q.domain(), scale, rotation, translation), q.marked());
}

RingCondenser similarity(const RingCondenser& r, double scale, double rotation, Point translation) {
  return RingCondenser(similarity(r.outer(), scale, rotation, translation),
                       similarity(r.inner(), scale, rotation, translation));
}

Polygon regular_polygon(std::size_t sides, double circumradius, Point center, double phase) {
  if (sides < 3) throw GeometryError("too-few-vertices", "regular polygon needs >= 3 sides");
  if (!(circumradius > 0.0)) throw GeometryError("bad-radius", "circumradius must be positive");
  std::vector<Point> v;
  v.reserve(sides);
  for (std::size_t k = 0; k < sides; ++k) {
    const double theta = phase + 2.0 * std::numbers::pi * static_cast<double>(k) /
                                     static_cast<double>(sides);
    v.push_back({center.x + circumradius * std::cos(theta),
                 center.y + circumradius * std::sin(theta)});
  }
  return validate_polygon(std::move(v));
}

double equal_area_t(double r, double s, double alpha, double beta) {
  if (!(r > 0.0) || !(s > 0.0)) throw GeometryError("bad-parameter", "r and s must be positive");
  const Quadrilateral q1 = quad_from_points(to_point(1.0 + 2.0 * r * std::polar(1.0, alpha)),
                                            to_point(2.0 * s * std::polar(1.0, beta)),
                                            {0.0, 0.0}, {1.0, 0.0});
  const double area = polygon_area(q1.domain());
  if (!(area > 0.0)) throw GeometryError("zero-area", "Q1 is degenerate");
  // (t+ir, is, -is, t-ir) is a trapezoid with vertical sides 2s and 2r a distance t apart.
  return area / (r + s);
}

}  // namespace qm
