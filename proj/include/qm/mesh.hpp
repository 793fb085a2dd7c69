#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qm/geometry.hpp"

namespace qm {

enum class BoundaryTag : std::uint8_t { Gamma1, Gamma2, Gamma3, Gamma4, PlateE, PlateF };

std::string_view to_string(BoundaryTag tag);
std::optional<BoundaryTag> parse_boundary_tag(std::string_view name);

struct BoundaryEdge {
  int a;
  int b;
  BoundaryTag tag;
};

/// Conforming triangulation. Triangles are counterclockwise; vertex 0 of
/// each triangle is its newest vertex and edge (1,2) its refinement edge.
/// Boundary edges are oriented with the domain on their left.
struct Mesh {
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary;
  /// For nodes created by bisection, the endpoints of the split edge;
  /// {-1, -1} for nodes of the initial triangulation.
  std::vector<std::array<int, 2>> parents;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
};

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TriangulateOptions {
  double max_area = 0.0;          // <= 0 selects domain area / 64
  double min_angle_deg = 25.0;
  std::size_t max_points = 200000;  // hard cap on Steiner insertions
};

Mesh triangulate(const Quadrilateral& quad, double max_area);
Mesh triangulate(const RingCondenser& ring, double max_area);
Mesh triangulate(const Quadrilateral& quad, const TriangulateOptions& options);
Mesh triangulate(const RingCondenser& ring, const TriangulateOptions& options);

struct RefinementMarking {
  std::vector<double> indicators;  // per triangle, nonnegative
  std::vector<int> marked;         // triangle indices
};

/// Smallest set of triangles (largest indicators first) whose indicator
/// mass reaches theta of the total.
RefinementMarking dorfler_mark(std::vector<double> indicators, double theta = 0.5);

struct RefineResult {
  Mesh mesh;
  std::vector<int> parent_triangle;  // per child triangle: index in the input mesh
};

/// Newest-vertex bisection of the marked triangles plus the closure needed
/// to keep the mesh conforming.
Mesh refine(const Mesh& mesh, const RefinementMarking& marking);
RefineResult refine_with_history(const Mesh& mesh, const std::vector<int>& marked);

/// Maps every node by z -> scale e^{i rotation} z + translation.
Mesh similarity(const Mesh& mesh, double scale, double rotation, Point translation);

double triangle_area(const Mesh& mesh, std::size_t t);
double mesh_area(const Mesh& mesh);
/// Smallest interior angle over all triangles, in degrees.
double min_angle_deg(const Mesh& mesh);
std::size_t count_edges(const Mesh& mesh);

/// Throws MeshError describing the first violated invariant.
void check_mesh(const Mesh& mesh);

}  // namespace qm
