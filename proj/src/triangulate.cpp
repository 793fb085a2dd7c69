// Constrained Delaunay triangulation of polygonal domains with Ruppert-style
// quality refinement. Points are inserted by Bowyer-Watson; cavities never
// cross constrained edges, so the triangulation stays constrained Delaunay.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

#include "qm/mesh.hpp"

namespace qm {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double incircle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  return alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
         clift * (adx * bdy - ady * bdx);
}

Point circumcenter(Point a, Point b, Point c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

double dist2(Point a, Point b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Smallest angle of a triangle in radians.
double smallest_angle(Point a, Point b, Point c) {
  const double la = std::sqrt(dist2(b, c));
  const double lb = std::sqrt(dist2(c, a));
  const double lc = std::sqrt(dist2(a, b));
  auto angle = [](double opp, double s1, double s2) {
    const double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0);
    return std::acos(cosv);
  };
  return std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
}

struct Loop {
  std::vector<Point> points;
  std::vector<BoundaryTag> edge_tags;  // edge i joins point i and i+1
  bool hole = false;
};

class Builder {
 public:
  Builder(std::vector<Loop> loops, const TriangulateOptions& options)
      : loops_(std::move(loops)), options_(options) {}

  Mesh run();

 private:
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  // nb[i] is across the edge opposite v[i]
    bool inside = false;
    bool alive = true;
  };
  struct InputSeg {
    int va;
    int vb;
    BoundaryTag tag;
    bool hole;
  };
  struct Subseg {
    int a;  // in loop orientation
    int b;
    int seg;
    bool alive = true;
  };

  const Point& P(int v) const { return points_[static_cast<std::size_t>(v)]; }
  Tri& T(int t) { return tris_[static_cast<std::size_t>(t)]; }

  int add_point(Point p, int seg);
  int new_tri();
  int locate(Point p);
  int insert(Point p, int seg, std::vector<int>* created);
  bool edge_exists(int a, int b);
  std::vector<int> triangles_on_edge(int a, int b);
  void constrain(int a, int b, int seg);
  void split_subseg(int s, std::vector<int>* created);
  bool encroached(int s);
  bool is_bad(int t, bool* area_bad);
  bool angle_exempt(int t);
  void classify_regions();
  Mesh extract();

  std::vector<Loop> loops_;
  TriangulateOptions options_;

  std::vector<Point> points_;
  std::vector<int> point_seg_;               // input segment a Steiner point lies on, else -1
  std::vector<std::array<int, 2>> input_segs_of_;  // for input vertices: the two incident segments
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> vert_tri_;
  std::vector<InputSeg> input_segs_;
  std::vector<double> input_angle_;  // domain-side angle at each input vertex
  std::vector<Subseg> subsegs_;
  std::unordered_map<std::uint64_t, int> subseg_of_edge_;
  std::vector<int> stamp_;
  int stamp_value_ = 0;
  int last_ = 0;
  std::size_t num_input_ = 0;
  double max_area_ = 0.0;
  double min_angle_ = 0.0;
};

int Builder::add_point(Point p, int seg) {
  points_.push_back(p);
  point_seg_.push_back(seg);
  input_segs_of_.push_back({-1, -1});
  vert_tri_.push_back(-1);
  return static_cast<int>(points_.size()) - 1;
}

int Builder::new_tri() {
  if (!free_.empty()) {
    const int t = free_.back();
    free_.pop_back();
    T(t) = Tri{};
    return t;
  }
  tris_.push_back(Tri{});
  stamp_.push_back(0);
  return static_cast<int>(tris_.size()) - 1;
}

int Builder::locate(Point p) {
  int t = last_;
  if (t < 0 || t >= static_cast<int>(tris_.size()) || !T(t).alive) {
    t = 0;
    while (!T(t).alive) ++t;
  }
  const std::size_t max_steps = 4 * tris_.size() + 16;
  unsigned rot = 0;
  for (std::size_t step = 0; step < max_steps; ++step) {
    bool moved = false;
    ++rot;
    for (int k = 0; k < 3; ++k) {
      const int i = static_cast<int>((k + rot) % 3);
      const Tri& tri = T(t);
      if (orient2d(P(tri.v[(i + 1) % 3]), P(tri.v[(i + 2) % 3]), p) < 0.0 && tri.nb[i] >= 0) {
        t = tri.nb[i];
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }
  for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
    const Tri& tri = T(s);
    if (!tri.alive) continue;
    if (orient2d(P(tri.v[0]), P(tri.v[1]), p) >= 0.0 &&
        orient2d(P(tri.v[1]), P(tri.v[2]), p) >= 0.0 &&
        orient2d(P(tri.v[2]), P(tri.v[0]), p) >= 0.0) {
      return s;
    }
  }
  return -1;
}

int Builder::insert(Point p, int seg, std::vector<int>* created) {
  const int t0 = locate(p);
  if (t0 < 0) return -1;
  for (int v : T(t0).v) {
    if (P(v) == p) return v;
  }

  struct Rim {
    int a;
    int b;
    int outside;
    int from;
  };
  std::vector<int> cavity;
  std::vector<Rim> rim;
  std::unordered_set<int> banned;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 64) return -1;
    ++stamp_value_;
    cavity.assign(1, t0);
    stamp_[static_cast<std::size_t>(t0)] = stamp_value_;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri& tri = T(cavity[k]);
      for (int i = 0; i < 3; ++i) {
        const int n = tri.nb[i];
        if (n < 0 || stamp_[static_cast<std::size_t>(n)] == stamp_value_ || banned.contains(n)) continue;
        const int a = tri.v[(i + 1) % 3];
        const int b = tri.v[(i + 2) % 3];
        if (subseg_of_edge_.contains(edge_key(a, b))) continue;
        const Tri& nt = T(n);
        const bool on_edge = cavity[k] == t0 && orient2d(P(a), P(b), p) == 0.0;
        if (on_edge || incircle(P(nt.v[0]), P(nt.v[1]), P(nt.v[2]), p) > 0.0) {
          stamp_[static_cast<std::size_t>(n)] = stamp_value_;
          cavity.push_back(n);
        }
      }
    }
    rim.clear();
    int offender = -1;
    for (int c : cavity) {
      const Tri& tri = T(c);
      for (int i = 0; i < 3; ++i) {
        const int n = tri.nb[i];
        if (n >= 0 && stamp_[static_cast<std::size_t>(n)] == stamp_value_) continue;
        const int a = tri.v[(i + 1) % 3];
        const int b = tri.v[(i + 2) % 3];
        if (orient2d(P(a), P(b), p) <= 0.0) {
          offender = c;
          break;
        }
        rim.push_back({a, b, n, c});
      }
      if (offender >= 0) break;
    }
    if (offender < 0) {
      // Every cavity vertex must stay on the rim; an enclosed vertex would be lost.
      std::unordered_set<int> on_rim;
      for (const Rim& r : rim) on_rim.insert(r.a);
      for (int c : cavity) {
        for (int w : T(c).v) {
          if (!on_rim.contains(w)) offender = c;
        }
        if (offender >= 0) break;
      }
      if (offender < 0) break;
    }
    if (offender == t0) return -1;
    banned.insert(offender);
  }

  const int v = add_point(p, seg);
  std::vector<bool> inside_of;
  for (const Rim& r : rim) inside_of.push_back(T(r.from).inside);
  for (int c : cavity) {
    T(c).alive = false;
    free_.push_back(c);
  }

  std::unordered_map<int, int> by_a;
  std::unordered_map<int, int> by_b;
  std::vector<int> fresh;
  fresh.reserve(rim.size());
  for (std::size_t k = 0; k < rim.size(); ++k) {
    const Rim& r = rim[k];
    const int t = new_tri();
    Tri& tri = T(t);
    tri.v = {v, r.a, r.b};
    tri.nb[0] = r.outside;
    tri.inside = inside_of[k];
    if (r.outside >= 0) {
      Tri& out = T(r.outside);
      for (int j = 0; j < 3; ++j) {
        if (out.nb[j] == r.from) {
          const int oa = out.v[(j + 1) % 3];
          const int ob = out.v[(j + 2) % 3];
          if (edge_key(oa, ob) == edge_key(r.a, r.b)) out.nb[j] = t;
        }
      }
    }
    by_a[r.a] = t;
    by_b[r.b] = t;
    vert_tri_[static_cast<std::size_t>(r.a)] = t;
    vert_tri_[static_cast<std::size_t>(r.b)] = t;
    fresh.push_back(t);
  }
  for (int t : fresh) {
    Tri& tri = T(t);
    tri.nb[1] = by_a.at(tri.v[2]);
    tri.nb[2] = by_b.at(tri.v[1]);
  }
  vert_tri_[static_cast<std::size_t>(v)] = fresh.front();
  last_ = fresh.front();
  if (created != nullptr) created->insert(created->end(), fresh.begin(), fresh.end());
  return v;
}

std::vector<int> Builder::triangles_on_edge(int a, int b) {
  std::vector<int> out;
  const int start = vert_tri_[static_cast<std::size_t>(a)];
  if (start < 0) return out;
  // Walk the star of a.
  std::vector<int> stack{start};
  ++stamp_value_;
  stamp_[static_cast<std::size_t>(start)] = stamp_value_;
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    const Tri& tri = T(t);
    const bool has_b = tri.v[0] == b || tri.v[1] == b || tri.v[2] == b;
    if (has_b) out.push_back(t);
    for (int i = 0; i < 3; ++i) {
      const int n = tri.nb[i];
      if (n < 0 || stamp_[static_cast<std::size_t>(n)] == stamp_value_) continue;
      if (tri.v[i] == a) continue;  // edge opposite a does not touch a
      const Tri& nt = T(n);
      if (nt.v[0] == a || nt.v[1] == a || nt.v[2] == a) {
        stamp_[static_cast<std::size_t>(n)] = stamp_value_;
        stack.push_back(n);
      }
    }
  }
  return out;
}

bool Builder::edge_exists(int a, int b) { return !triangles_on_edge(a, b).empty(); }

void Builder::constrain(int a, int b, int seg) {
  subsegs_.push_back({a, b, seg});
  subseg_of_edge_[edge_key(a, b)] = static_cast<int>(subsegs_.size()) - 1;
}

void Builder::split_subseg(int s, std::vector<int>* created) {
  const Subseg sub = subsegs_[static_cast<std::size_t>(s)];
  const Point pa = P(sub.a);
  const Point pb = P(sub.b);
  const double len = std::sqrt(dist2(pa, pb));
  double frac = 0.5;
  // Concentric shells around input vertices keep splits near small input
  // angles from cascading.
  const bool a_input = static_cast<std::size_t>(sub.a) < num_input_ + 3 && sub.a >= 3;
  const bool b_input = static_cast<std::size_t>(sub.b) < num_input_ + 3 && sub.b >= 3;
  if (a_input != b_input) {
    const double shell = std::exp2(std::round(std::log2(0.5 * len)));
    frac = a_input ? shell / len : 1.0 - shell / len;
  }
  const Point m{pa.x + frac * (pb.x - pa.x), pa.y + frac * (pb.y - pa.y)};
  subsegs_[static_cast<std::size_t>(s)].alive = false;
  subseg_of_edge_.erase(edge_key(sub.a, sub.b));
  const int v = insert(m, sub.seg, created);
  if (v < 0 || v == sub.a || v == sub.b) {
    throw MeshError("meshing failed: could not split a boundary segment");
  }
  constrain(sub.a, v, sub.seg);
  constrain(v, sub.b, sub.seg);
}

bool Builder::encroached(int s) {
  const Subseg& sub = subsegs_[static_cast<std::size_t>(s)];
  const Point pa = P(sub.a);
  const Point pb = P(sub.b);
  for (int t : triangles_on_edge(sub.a, sub.b)) {
    const Tri& tri = T(t);
    if (!tri.inside) continue;
    for (int w : tri.v) {
      if (w == sub.a || w == sub.b) continue;
      const Point pw = P(w);
      const double dot = (pa.x - pw.x) * (pb.x - pw.x) + (pa.y - pw.y) * (pb.y - pw.y);
      if (dot < 0.0) return true;
    }
  }
  return false;
}

bool Builder::angle_exempt(int t) {
  // A skinny triangle whose shortest edge joins two different segments that
  // meet at a small input angle cannot be improved; leave it.
  const Tri& tri = T(t);
  int su = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double l = dist2(P(tri.v[(i + 1) % 3]), P(tri.v[(i + 2) % 3]));
    if (l < best) {
      best = l;
      su = i;
    }
  }
  const int u = tri.v[(su + 1) % 3];
  const int w = tri.v[(su + 2) % 3];
  auto segs = [this](int node) -> std::array<int, 2> {
    const auto& inc = input_segs_of_[static_cast<std::size_t>(node)];
    if (inc[0] >= 0) return inc;
    return {point_seg_[static_cast<std::size_t>(node)], -1};
  };
  const auto su_segs = segs(u);
  const auto sw_segs = segs(w);
  for (int s1 : su_segs) {
    for (int s2 : sw_segs) {
      if (s1 < 0 || s2 < 0 || s1 == s2) continue;
      const InputSeg& a = input_segs_[static_cast<std::size_t>(s1)];
      const InputSeg& b = input_segs_[static_cast<std::size_t>(s2)];
      for (int x : {a.va, a.vb}) {
        if (x == b.va || x == b.vb) {
          if (input_angle_[static_cast<std::size_t>(x - 3)] < kPi / 3.0 + 1e-12) return true;
        }
      }
    }
  }
  // Triangles with a vertex at a small input corner are also forced.
  for (int x : tri.v) {
    if (x >= 3 && static_cast<std::size_t>(x) < num_input_ + 3 &&
        input_angle_[static_cast<std::size_t>(x - 3)] < min_angle_) {
      return true;
    }
  }
  return false;
}

bool Builder::is_bad(int t, bool* area_bad) {
  const Tri& tri = T(t);
  const Point a = P(tri.v[0]);
  const Point b = P(tri.v[1]);
  const Point c = P(tri.v[2]);
  *area_bad = 0.5 * orient2d(a, b, c) > max_area_;
  if (*area_bad) return true;
  return smallest_angle(a, b, c) < min_angle_ && !angle_exempt(t);
}

void Builder::classify_regions() {
  std::vector<int> comp(tris_.size(), -1);
  for (int s = 0; s < static_cast<int>(tris_.size()); ++s) {
    if (!T(s).alive || comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> members{s};
    comp[static_cast<std::size_t>(s)] = s;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Tri& tri = T(members[k]);
      for (int i = 0; i < 3; ++i) {
        const int n = tri.nb[i];
        if (n < 0 || comp[static_cast<std::size_t>(n)] >= 0) continue;
        if (subseg_of_edge_.contains(edge_key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]))) continue;
        comp[static_cast<std::size_t>(n)] = s;
        members.push_back(n);
      }
    }
    const Tri& first = T(s);
    bool inside = first.v[0] >= 3 && first.v[1] >= 3 && first.v[2] >= 3;
    if (inside) {
      const Point g{(P(first.v[0]).x + P(first.v[1]).x + P(first.v[2]).x) / 3.0,
                    (P(first.v[0]).y + P(first.v[1]).y + P(first.v[2]).y) / 3.0};
      for (const Loop& loop : loops_) {
        std::vector<Point> pts = loop.points;
        const bool in = point_in_polygon(g, validate_polygon(std::move(pts)));
        inside = inside && (loop.hole ? !in : in);
      }
    }
    for (int m : members) T(m).inside = inside;
  }
}

Mesh Builder::run() {
  // Super triangle.
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  double domain_area = 0.0;
  for (const Loop& loop : loops_) {
    for (const Point& p : loop.points) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    domain_area += (loop.hole ? -1.0 : 1.0) * std::abs(signed_area(loop.points));
  }
  max_area_ = options_.max_area > 0.0 ? options_.max_area : domain_area / 64.0;
  min_angle_ = options_.min_angle_deg * kPi / 180.0;
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-300}) * 16.0;
  add_point({cx - 2.0 * span, cy - span}, -1);
  add_point({cx + 2.0 * span, cy - span}, -1);
  add_point({cx, cy + 2.0 * span}, -1);
  const int t = new_tri();
  T(t).v = {0, 1, 2};
  for (int k = 0; k < 3; ++k) vert_tri_[static_cast<std::size_t>(k)] = t;

  // Input vertices and segments.
  for (const Loop& loop : loops_) {
    const int base = static_cast<int>(points_.size());
    const int n = static_cast<int>(loop.points.size());
    for (int i = 0; i < n; ++i) {
      const int v = insert(loop.points[static_cast<std::size_t>(i)], -1, nullptr);
      if (v != base + i) throw MeshError("meshing failed: duplicate or unplaceable input vertex");
    }
    for (int i = 0; i < n; ++i) {
      const int seg = static_cast<int>(input_segs_.size());
      input_segs_.push_back({base + i, base + (i + 1) % n, loop.edge_tags[static_cast<std::size_t>(i)], loop.hole});
      input_segs_of_[static_cast<std::size_t>(base + i)][1] = seg;
      input_segs_of_[static_cast<std::size_t>(base + (i + 1) % n)][0] = seg;
    }
    for (int i = 0; i < n; ++i) {
      const Point w = loop.points[static_cast<std::size_t>(i)];
      const Point prev = loop.points[static_cast<std::size_t>((i + n - 1) % n)];
      const Point next = loop.points[static_cast<std::size_t>((i + 1) % n)];
      const Point d1 = next - w;
      const Point d2 = prev - w;
      double ang = std::atan2(d1.x * d2.y - d1.y * d2.x, d1.x * d2.x + d1.y * d2.y);
      if (ang < 0.0) ang += 2.0 * kPi;
      input_angle_.push_back(loop.hole ? 2.0 * kPi - ang : ang);
    }
  }
  num_input_ = points_.size() - 3;

  // Recover segments by splitting until each piece is a Delaunay edge.
  std::deque<std::array<int, 3>> pending;
  for (int s = 0; s < static_cast<int>(input_segs_.size()); ++s) {
    pending.push_back({input_segs_[static_cast<std::size_t>(s)].va, input_segs_[static_cast<std::size_t>(s)].vb, s});
  }
  while (!pending.empty()) {
    const auto [a, b, s] = pending.front();
    pending.pop_front();
    if (edge_exists(a, b)) {
      constrain(a, b, s);
      continue;
    }
    if (points_.size() > options_.max_points) throw MeshError("meshing failed: segment recovery did not terminate");
    const Point m = 0.5 * (P(a) + P(b));
    const int v = insert(m, s, nullptr);
    if (v < 0 || v == a || v == b) throw MeshError("meshing failed: could not recover a boundary segment");
    pending.push_back({a, v, s});
    pending.push_back({v, b, s});
  }
  classify_regions();

  // Quality refinement.
  std::deque<int> seg_queue;
  std::deque<int> tri_queue;
  for (int s = 0; s < static_cast<int>(subsegs_.size()); ++s) seg_queue.push_back(s);
  for (int k = 0; k < static_cast<int>(tris_.size()); ++k) {
    if (T(k).alive && T(k).inside) tri_queue.push_back(k);
  }
  std::vector<int> created;
  auto enqueue_created = [&]() {
    for (int c : created) {
      tri_queue.push_back(c);
      const Tri& tri = T(c);
      for (int i = 0; i < 3; ++i) {
        auto it = subseg_of_edge_.find(edge_key(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]));
        if (it != subseg_of_edge_.end()) seg_queue.push_back(it->second);
      }
    }
    created.clear();
  };
  bool final_pass_done = false;
  while (true) {
    if (points_.size() > options_.max_points) {
      throw MeshError("meshing failed: refinement exceeded the point budget");
    }
    if (!seg_queue.empty()) {
      const int s = seg_queue.front();
      seg_queue.pop_front();
      if (!subsegs_[static_cast<std::size_t>(s)].alive || !encroached(s)) continue;
      split_subseg(s, &created);
      const auto n = static_cast<int>(subsegs_.size());
      seg_queue.push_back(n - 2);
      seg_queue.push_back(n - 1);
      enqueue_created();
      continue;
    }
    if (!tri_queue.empty()) {
      const int t = tri_queue.front();
      tri_queue.pop_front();
      if (!T(t).alive || !T(t).inside) continue;
      bool area_bad = false;
      if (!is_bad(t, &area_bad)) continue;
      const Tri& tri = T(t);
      const Point c = circumcenter(P(tri.v[0]), P(tri.v[1]), P(tri.v[2]));
      std::vector<int> hit;
      for (int s = 0; s < static_cast<int>(subsegs_.size()); ++s) {
        const Subseg& sub = subsegs_[static_cast<std::size_t>(s)];
        if (!sub.alive) continue;
        const Point pa = P(sub.a);
        const Point pb = P(sub.b);
        const Point mid = 0.5 * (pa + pb);
        if (dist2(c, mid) < 0.25 * dist2(pa, pb)) hit.push_back(s);
      }
      if (!hit.empty()) {
        for (int s : hit) {
          if (subsegs_[static_cast<std::size_t>(s)].alive) split_subseg(s, &created);
        }
        const auto n = static_cast<int>(subsegs_.size());
        for (int s = n - 2 * static_cast<int>(hit.size()); s < n; ++s) seg_queue.push_back(s);
        enqueue_created();
        tri_queue.push_back(t);
        continue;
      }
      const int where = locate(c);
      if (where < 0 || !T(where).inside) continue;
      const int v = insert(c, -1, &created);
      if (v < 0) continue;
      enqueue_created();
      continue;
    }
    if (final_pass_done) break;
    // Full sweep in case an encroachment was missed by the local checks.
    for (int s = 0; s < static_cast<int>(subsegs_.size()); ++s) {
      if (subsegs_[static_cast<std::size_t>(s)].alive) seg_queue.push_back(s);
    }
    for (int k = 0; k < static_cast<int>(tris_.size()); ++k) {
      if (T(k).alive && T(k).inside) tri_queue.push_back(k);
    }
    final_pass_done = true;
  }
  return extract();
}

Mesh Builder::extract() {
  Mesh mesh;
  std::vector<int> remap(points_.size(), -1);
  auto node = [&](int v) {
    int& r = remap[static_cast<std::size_t>(v)];
    if (r < 0) {
      r = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(P(v));
    }
    return r;
  };
  // Input vertices first so marked corners keep predictable indices.
  for (std::size_t v = 3; v < num_input_ + 3; ++v) node(static_cast<int>(v));
  for (const Tri& tri : tris_) {
    if (!tri.alive || !tri.inside) continue;
    std::array<int, 3> v{node(tri.v[0]), node(tri.v[1]), node(tri.v[2])};
    // Newest vertex opposite the longest edge.
    int best = 0;
    double best_len = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double l = dist2(mesh.nodes[static_cast<std::size_t>(v[(i + 1) % 3])],
                             mesh.nodes[static_cast<std::size_t>(v[(i + 2) % 3])]);
      if (l > best_len) {
        best_len = l;
        best = i;
      }
    }
    std::rotate(v.begin(), v.begin() + best, v.end());
    mesh.triangles.push_back(v);
  }
  for (const Subseg& sub : subsegs_) {
    if (!sub.alive) continue;
    const InputSeg& seg = input_segs_[static_cast<std::size_t>(sub.seg)];
    int a = node(sub.a);
    int b = node(sub.b);
    if (seg.hole) std::swap(a, b);
    mesh.boundary.push_back({a, b, seg.tag});
  }
  mesh.parents.assign(mesh.nodes.size(), {-1, -1});
  return mesh;
}

std::vector<Loop> quad_loops(const Quadrilateral& quad) {
  Loop loop;
  loop.points = quad.domain().vertices();
  for (std::size_t e = 0; e < loop.points.size(); ++e) {
    loop.edge_tags.push_back(static_cast<BoundaryTag>(quad.arc_of_edge(e)));
  }
  return {loop};
}

std::vector<Loop> ring_loops(const RingCondenser& ring) {
  Loop outer;
  outer.points = ring.outer().vertices();
  outer.edge_tags.assign(outer.points.size(), BoundaryTag::PlateF);
  Loop inner;
  inner.points = ring.inner().vertices();
  inner.edge_tags.assign(inner.points.size(), BoundaryTag::PlateE);
  inner.hole = true;
  return {outer, inner};
}

}  // namespace

Mesh triangulate(const Quadrilateral& quad, const TriangulateOptions& options) {
  return Builder(quad_loops(quad), options).run();
}

Mesh triangulate(const RingCondenser& ring, const TriangulateOptions& options) {
  return Builder(ring_loops(ring), options).run();
}

Mesh triangulate(const Quadrilateral& quad, double max_area) {
  if (!(max_area > 0.0)) throw std::invalid_argument("max_area must be positive");
  TriangulateOptions options;
  options.max_area = max_area;
  return triangulate(quad, options);
}

Mesh triangulate(const RingCondenser& ring, double max_area) {
  if (!(max_area > 0.0)) throw std::invalid_argument("max_area must be positive");
  TriangulateOptions options;
  options.max_area = max_area;
  return triangulate(ring, options);
}

}  // namespace qm
