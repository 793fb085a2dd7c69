#pragma once

#include <json.hpp>

#include "qm/experiments.hpp"
#include "qm/geometry.hpp"
#include "qm/mesh.hpp"
#include "qm/modulus.hpp"

namespace qm::io {

using nlohmann::json;

// {"vertices": [[x,y], ...]}
Polygon polygon_from_json(const json& j);
json to_json(const Polygon& p);

// {"vertices": [[x,y], ...], "marked": [i1,i2,i3,i4]}; "marked" defaults to
// [0,1,2,3] when exactly four vertices are given.
Quadrilateral quad_from_json(const json& j);
json to_json(const Quadrilateral& q);

// {"outer": {...}, "inner": {...}}
RingCondenser ring_from_json(const json& j);
json to_json(const RingCondenser& r);

// {"nodes": [[x,y],...], "triangles": [[a,b,c],...], "boundary": [[a,b,"Gamma1"],...]}
json to_json(const Mesh& m);
Mesh mesh_from_json(const json& j);

// {"value", "lower", "upper", "dofs", "levels", "converged"}
json to_json(const ModulusResult& r);
// {"capacity", "modulus", "dofs", "levels", "converged", "error_estimate"}
json to_json(const CapacityResult& r);

/// Mesh JSON plus a "potential" array of nodal values.
json solution_to_json(const SolutionField& field);

json to_json(const experiments::Record& r);
json to_json(const experiments::SweepGrid& g);
json to_json(const experiments::SweepSummary& s);
/// {"experiment", "grid", "rows", "summary"}; rows mirror the CSV columns.
json to_json(const experiments::SweepResult& r);

/// Accepts either the "xmin:xmax:nx,ymin:ymax:ny" string or an object with
/// x_min, x_max, nx, y_min, y_max, ny. Missing fields keep `base` values.
experiments::SweepGrid grid_from_json(const json& j, experiments::SweepGrid base);

/// Parses "x1,y1 x2,y2 ..." into points.
std::vector<Point> parse_point_list(const std::string& text);

}  // namespace qm::io
