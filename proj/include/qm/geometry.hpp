#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qm {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }

inline Point to_point(std::complex<double> z) { return {z.real(), z.imag()}; }
inline std::complex<double> to_complex(Point p) { return {p.x, p.y}; }

/// Twice the signed area of (a, b, c); positive for a left turn.
double orient2d(Point a, Point b, Point c);

bool segments_intersect(Point a, Point b, Point c, Point d);

/// Thrown for any invalid geometric input. `reason()` is a short stable
/// token ("too-few-vertices", "self-intersection", ...) suitable for API
/// payloads; what() carries the human-readable message.
class GeometryError : public std::invalid_argument {
 public:
  GeometryError(std::string reason, const std::string& message)
      : std::invalid_argument(message), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

/// Simple, counterclockwise closed vertex loop. Only constructible through
/// validate_polygon, so every instance satisfies the invariants.
class Polygon {
 public:
  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }
  const Point& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  friend Polygon validate_polygon(std::vector<Point> vertices);
  explicit Polygon(std::vector<Point> v) : vertices_(std::move(v)) {}
  std::vector<Point> vertices_;
};

/// Validates a vertex loop and returns it as a Polygon. A clockwise loop is
/// reversed in place (vertex 0 stays first). Throws GeometryError.
Polygon validate_polygon(std::vector<Point> vertices);

/// True if validate_polygon would have to reverse the loop.
bool is_clockwise(const std::vector<Point>& vertices);

double signed_area(const std::vector<Point>& vertices);
double polygon_area(const Polygon& p);

/// Strict interior test; points on the boundary count as outside.
bool point_in_polygon(Point p, const Polygon& poly);

/// Polygon with four marked boundary vertices z1..z4 in counterclockwise
/// order. Arc j runs from z_j to z_{j+1} (indices mod 4).
class Quadrilateral {
 public:
  Quadrilateral(Polygon domain, std::array<std::size_t, 4> marked);

  const Polygon& domain() const { return domain_; }
  const std::array<std::size_t, 4>& marked() const { return marked_; }
  Point corner(int j) const { return domain_[marked_[static_cast<std::size_t>(j)]]; }

  /// Arc (0-based, 0..3) that owns polygon edge (i, i+1).
  int arc_of_edge(std::size_t edge) const;

  /// Vertex indices of arc j, from z_j to z_{j+1} inclusive.
  std::vector<std::size_t> arc_vertices(int arc) const;

  friend bool operator==(const Quadrilateral&, const Quadrilateral&) = default;

 private:
  Polygon domain_;
  std::array<std::size_t, 4> marked_;
};

/// Builds the quadrilateral with the four points as its only vertices.
/// The order must already be counterclockwise; a clockwise order is an
/// error here because it changes which arcs are which.
Quadrilateral quad_from_points(Point z1, Point z2, Point z3, Point z4);

/// Builds a quadrilateral from an arbitrary loop plus marked indices. A
/// clockwise loop is reversed and the marked indices re-sorted into the
/// new cyclic order starting from the image of the first marked index.
Quadrilateral make_quadrilateral(std::vector<Point> vertices, std::array<std::size_t, 4> marked);

/// Condenser between an outer plate boundary (u = 0) and an inner plate (u = 1).
class RingCondenser {
 public:
  RingCondenser(Polygon outer, Polygon inner);

  const Polygon& outer() const { return outer_; }
  const Polygon& inner() const { return inner_; }

 private:
  Polygon outer_;
  Polygon inner_;
};

Polygon similarity(const Polygon& p, double scale, double rotation, Point translation);
Quadrilateral similarity(const Quadrilateral& q, double scale, double rotation, Point translation);
RingCondenser similarity(const RingCondenser& r, double scale, double rotation, Point translation);

Polygon regular_polygon(std::size_t sides, double circumradius, Point center = {}, double phase = 0.0);

/// Width t of the trapezoid (t+ir, is, -is, t-ir) whose area matches
/// (1 + 2r e^{i alpha}, 2s e^{i beta}, 0, 1).
double equal_area_t(double r, double s, double alpha, double beta);

}  // namespace qm
