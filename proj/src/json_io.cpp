#include "qm/json_io.hpp"

#include <sstream>

namespace qm::io {

namespace {

std::vector<Point> points_from(const json& arr, const char* what) {
  if (!arr.is_array()) throw GeometryError("bad-json", std::string(what) + " must be an array of [x,y] pairs");
  std::vector<Point> out;
  out.reserve(arr.size());
  for (const json& p : arr) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw GeometryError("bad-json", std::string(what) + " entries must be [x,y] number pairs");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

json points_to(const std::vector<Point>& pts) {
  json arr = json::array();
  for (const Point& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw GeometryError("bad-json", std::string("missing \"") + key + "\"");
  }
  return j.at(key);
}

}  // namespace

Polygon polygon_from_json(const json& j) { return validate_polygon(points_from(member(j, "vertices"), "vertices")); }

json to_json(const Polygon& p) { return {{"vertices", points_to(p.vertices())}}; }

Quadrilateral quad_from_json(const json& j) {
  std::vector<Point> pts = points_from(member(j, "vertices"), "vertices");
  std::array<std::size_t, 4> marked{0, 1, 2, 3};
  if (j.contains("marked")) {
    const json& m = j.at("marked");
    if (!m.is_array() || m.size() != 4) throw GeometryError("bad-marked", "\"marked\" must hold four indices");
    for (std::size_t k = 0; k < 4; ++k) {
      if (!m[k].is_number_integer() || m[k].get<long long>() < 0) {
        throw GeometryError("bad-marked", "marked indices must be nonnegative integers");
      }
      marked[k] = m[k].get<std::size_t>();
    }
  } else if (pts.size() != 4) {
    throw GeometryError("bad-marked", "\"marked\" is required unless exactly four vertices are given");
  }
  return make_quadrilateral(std::move(pts), marked);
}

json to_json(const Quadrilateral& q) {
  json j = to_json(q.domain());
  j["marked"] = q.marked();
  return j;
}

RingCondenser ring_from_json(const json& j) {
  return RingCondenser(polygon_from_json(member(j, "outer")), polygon_from_json(member(j, "inner")));
}

json to_json(const RingCondenser& r) { return {{"outer", to_json(r.outer())}, {"inner", to_json(r.inner())}}; }

json to_json(const Mesh& m) {
  json tris = json::array();
  for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
  json boundary = json::array();
  for (const BoundaryEdge& e : m.boundary) boundary.push_back({e.a, e.b, std::string(to_string(e.tag))});
  return {{"nodes", points_to(m.nodes)}, {"triangles", std::move(tris)}, {"boundary", std::move(boundary)}};
}

Mesh mesh_from_json(const json& j) {
  Mesh m;
  m.nodes = points_from(member(j, "nodes"), "nodes");
  for (const json& t : member(j, "triangles")) m.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
  for (const json& e : member(j, "boundary")) {
    const auto tag = parse_boundary_tag(e[2].get<std::string>());
    if (!tag) throw MeshError("unknown boundary tag " + e[2].get<std::string>());
    m.boundary.push_back({e[0].get<int>(), e[1].get<int>(), *tag});
  }
  m.parents.assign(m.nodes.size(), {-1, -1});
  return m;
}

json to_json(const ModulusResult& r) {
  return {{"value", r.value},   {"lower", r.lower},   {"upper", r.upper},
          {"dofs", r.dofs},     {"levels", r.levels}, {"converged", r.converged}};
}

json to_json(const CapacityResult& r) {
  return {{"capacity", r.capacity}, {"modulus", r.modulus},   {"dofs", r.dofs},
          {"levels", r.levels},     {"converged", r.converged}, {"error_estimate", r.error_estimate}};
}

json solution_to_json(const SolutionField& field) {
  json j = to_json(field.mesh);
  j["potential"] = field.potential;
  return j;
}

json to_json(const experiments::Record& r) {
  json j = {{"x", r.x},          {"y", r.y},         {"lhs", r.lhs},
            {"rhs", r.rhs},      {"delta", r.delta}, {"bracket", r.bracket},
            {"skipped", r.skipped}, {"sign", std::string(experiments::to_string(r.sign()))}};
  if (!r.moduli.empty()) j["moduli"] = r.moduli;
  if (r.skipped) j["skip_reason"] = r.skip_reason;
  if (r.lower_slack) j["lower_slack"] = *r.lower_slack;
  return j;
}

json to_json(const experiments::SweepGrid& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"nx", g.nx},       {"y_min", g.y_min},
          {"y_max", g.y_max}, {"ny", g.ny},       {"alpha", g.alpha}, {"beta", g.beta}};
}

json to_json(const experiments::SweepSummary& s) {
  json j = {{"total", s.total},         {"positive", s.positive}, {"negative", s.negative},
            {"indeterminate", s.indeterminate}, {"skipped", s.skipped},
            {"negative_records", s.negative_records}};
  if (s.total > s.skipped) {
    j["min_delta"] = s.min_delta;
    j["min_location"] = {s.min_x, s.min_y};
  }
  if (s.min_lower_slack) j["min_lower_slack"] = *s.min_lower_slack;
  return j;
}

json to_json(const experiments::SweepResult& r) {
  json rows = json::array();
  for (const auto& rec : r.records) rows.push_back(to_json(rec));
  return {{"experiment", std::string(experiments::to_string(r.experiment))},
          {"grid", to_json(r.grid)},
          {"rows", std::move(rows)},
          {"summary", to_json(r.summary())}};
}

experiments::SweepGrid grid_from_json(const json& j, experiments::SweepGrid base) {
  if (j.is_string()) {
    experiments::SweepGrid g = experiments::SweepGrid::parse(j.get<std::string>());
    g.alpha = base.alpha;
    g.beta = base.beta;
    return g;
  }
  if (!j.is_object()) throw std::invalid_argument("grid must be a string or an object");
  auto num = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw std::invalid_argument(std::string("grid.") + key + " must be a number");
    field = j.at(key).get<double>();
  };
  auto count = [&](const char* key, int& field) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer()) throw std::invalid_argument(std::string("grid.") + key + " must be an integer");
    field = j.at(key).get<int>();
  };
  num("x_min", base.x_min);
  num("x_max", base.x_max);
  num("y_min", base.y_min);
  num("y_max", base.y_max);
  count("nx", base.nx);
  count("ny", base.ny);
  base.validate();
  return base;
}

std::vector<Point> parse_point_list(const std::string& text) {
  std::vector<Point> out;
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    const auto comma = token.find(',');
    if (comma == std::string::npos) throw GeometryError("bad-points", "expected x,y but got \"" + token + "\"");
    try {
      std::size_t used_x = 0;
      std::size_t used_y = 0;
      const std::string xs = token.substr(0, comma);
      const std::string ys = token.substr(comma + 1);
      const double x = std::stod(xs, &used_x);
      const double y = std::stod(ys, &used_y);
      if (used_x != xs.size() || used_y != ys.size()) throw std::invalid_argument("trailing characters");
      out.push_back({x, y});
    } catch (const std::logic_error&) {
      throw GeometryError("bad-points", "cannot parse point \"" + token + "\"");
    }
  }
  return out;
}

}  // namespace qm::io
