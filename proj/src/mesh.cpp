#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <numbers>
#include <unordered_map>

#include "qm/mesh.hpp"

namespace qm {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

const Point& node(const Mesh& m, int i) { return m.nodes[static_cast<std::size_t>(i)]; }

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Gamma1: return "Gamma1";
    case BoundaryTag::Gamma2: return "Gamma2";
    case BoundaryTag::Gamma3: return "Gamma3";
    case BoundaryTag::Gamma4: return "Gamma4";
    case BoundaryTag::PlateE: return "PlateE";
    case BoundaryTag::PlateF: return "PlateF";
  }
  return "?";
}

std::optional<BoundaryTag> parse_boundary_tag(std::string_view name) {
  for (auto tag : {BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma3,
                   BoundaryTag::Gamma4, BoundaryTag::PlateE, BoundaryTag::PlateF}) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

RefinementMarking dorfler_mark(std::vector<double> indicators, double theta) {
  RefinementMarking marking;
  const double total = std::accumulate(indicators.begin(), indicators.end(), 0.0);
  if (total > 0.0) {
    std::vector<int> order(indicators.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return indicators[static_cast<std::size_t>(a)] > indicators[static_cast<std::size_t>(b)];
    });
    double mass = 0.0;
    for (int t : order) {
      if (mass >= theta * total) break;
      marking.marked.push_back(t);
      mass += indicators[static_cast<std::size_t>(t)];
    }
    std::sort(marking.marked.begin(), marking.marked.end());
  }
  marking.indicators = std::move(indicators);
  return marking;
}

RefineResult refine_with_history(const Mesh& mesh, const std::vector<int>& marked) {
  const std::size_t nt = mesh.triangles.size();
  std::unordered_map<std::uint64_t, int> edge_id;
  edge_id.reserve(3 * nt);
  std::vector<std::array<int, 3>> tri_edges(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const auto key = edge_key(v[(i + 1) % 3], v[(i + 2) % 3]);
      auto [it, inserted] = edge_id.try_emplace(key, static_cast<int>(edge_id.size()));
      tri_edges[t][i] = it->second;
    }
  }
  std::vector<char> cut(edge_id.size(), 0);
  for (int t : marked) {
    if (t < 0 || static_cast<std::size_t>(t) >= nt) throw std::out_of_range("refine: bad triangle index");
    cut[static_cast<std::size_t>(tri_edges[static_cast<std::size_t>(t)][0])] = 1;
  }
  // Closure: any triangle with a cut edge must also have its refinement edge cut.
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : tri_edges) {
      if (!cut[static_cast<std::size_t>(e[0])] &&
          (cut[static_cast<std::size_t>(e[1])] || cut[static_cast<std::size_t>(e[2])])) {
        cut[static_cast<std::size_t>(e[0])] = 1;
        changed = true;
      }
    }
  }

  RefineResult out;
  Mesh& fine = out.mesh;
  fine.nodes = mesh.nodes;
  fine.parents = mesh.parents;
  if (fine.parents.size() != fine.nodes.size()) fine.parents.assign(fine.nodes.size(), {-1, -1});
  std::unordered_map<std::uint64_t, int> midpoint;
  // Deterministic node numbering: walk triangles in order.
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      if (!cut[static_cast<std::size_t>(tri_edges[t][i])]) continue;
      const int a = v[(i + 1) % 3];
      const int b = v[(i + 2) % 3];
      const auto key = edge_key(a, b);
      if (midpoint.contains(key)) continue;
      midpoint[key] = static_cast<int>(fine.nodes.size());
      fine.nodes.push_back(0.5 * (node(mesh, a) + node(mesh, b)));
      fine.parents.push_back({std::min(a, b), std::max(a, b)});
    }
  }

  auto bisect = [&](auto&& self, std::array<int, 3> tri, int parent) -> void {
    auto it = midpoint.find(edge_key(tri[1], tri[2]));
    if (it == midpoint.end()) {
      fine.triangles.push_back(tri);
      out.parent_triangle.push_back(parent);
      return;
    }
    const int m = it->second;
    self(self, {m, tri[0], tri[1]}, parent);
    self(self, {m, tri[2], tri[0]}, parent);
  };
  for (std::size_t t = 0; t < nt; ++t) bisect(bisect, mesh.triangles[t], static_cast<int>(t));

  for (const BoundaryEdge& e : mesh.boundary) {
    auto it = midpoint.find(edge_key(e.a, e.b));
    if (it == midpoint.end()) {
      fine.boundary.push_back(e);
    } else {
      fine.boundary.push_back({e.a, it->second, e.tag});
      fine.boundary.push_back({it->second, e.b, e.tag});
    }
  }
  return out;
}

Mesh refine(const Mesh& mesh, const RefinementMarking& marking) {
  return refine_with_history(mesh, marking.marked).mesh;
}

Mesh similarity(const Mesh& mesh, double scale, double rotation, Point translation) {
  if (!(scale > 0.0)) throw std::invalid_argument("similarity scale must be positive");
  Mesh out = mesh;
  const std::complex<double> factor = std::polar(scale, rotation);
  for (Point& p : out.nodes) p = to_point(factor * to_complex(p) + to_complex(translation));
  return out;
}

double triangle_area(const Mesh& mesh, std::size_t t) {
  const auto& v = mesh.triangles[t];
  return 0.5 * orient2d(node(mesh, v[0]), node(mesh, v[1]), node(mesh, v[2]));
}

double mesh_area(const Mesh& mesh) {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) sum += triangle_area(mesh, t);
  return sum;
}

double min_angle_deg(const Mesh& mesh) {
  double best = 180.0;
  for (const auto& v : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      const Point p = node(mesh, v[i]);
      const Point a = node(mesh, v[(i + 1) % 3]) - p;
      const Point b = node(mesh, v[(i + 2) % 3]) - p;
      const double ang = std::atan2(std::abs(a.x * b.y - a.y * b.x), a.x * b.x + a.y * b.y);
      best = std::min(best, ang * 180.0 / std::numbers::pi);
    }
  }
  return best;
}

std::size_t count_edges(const Mesh& mesh) {
  std::unordered_map<std::uint64_t, int> edges;
  for (const auto& v : mesh.triangles) {
    for (int i = 0; i < 3; ++i) edges[edge_key(v[i], v[(i + 1) % 3])] = 1;
  }
  return edges.size();
}

void check_mesh(const Mesh& mesh) {
  const auto n = static_cast<int>(mesh.nodes.size());
  for (const Point& p : mesh.nodes) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw MeshError("non-finite node");
  }
  // Directed edge counts: interior edges appear once in each direction.
  std::unordered_map<std::uint64_t, int> directed;
  auto dkey = [](int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& v = mesh.triangles[t];
    for (int k : v) {
      if (k < 0 || k >= n) throw MeshError("triangle references a missing node");
    }
    if (!(triangle_area(mesh, t) > 0.0)) {
      throw MeshError("triangle " + std::to_string(t) + " is not positively oriented");
    }
    for (int i = 0; i < 3; ++i) {
      if (++directed[dkey(v[i], v[(i + 1) % 3])] > 1) throw MeshError("edge used twice in one direction");
    }
  }
  std::unordered_map<std::uint64_t, int> boundary;
  for (const BoundaryEdge& e : mesh.boundary) {
    if (!directed.contains(dkey(e.a, e.b)) || directed.contains(dkey(e.b, e.a))) {
      throw MeshError("boundary edge is not a boundary edge of the triangulation");
    }
    boundary[dkey(e.a, e.b)] = 1;
  }
  for (const auto& [key, count] : directed) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    if (!directed.contains(dkey(b, a)) && !boundary.contains(key)) {
      throw MeshError("untagged boundary edge or hanging node");
    }
  }
}

}  // namespace qm
