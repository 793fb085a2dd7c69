// qm: command-line front end. Results go to stdout, diagnostics to stderr.
#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qm/elliptic.hpp"
#include "qm/experiments.hpp"
#include "qm/fem.hpp"
#include "qm/json_io.hpp"
#include "qm/modulus.hpp"
#include "qm/service.hpp"

namespace {

using qm::io::json;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kBudget = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("qm");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("QM_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::err);
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qm::GeometryError("bad-json", "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw qm::GeometryError("bad-json", path + " is not valid JSON");
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump() << '\n';
}

struct SolveFlags {
  double tol = 1e-4;
  std::size_t max_dofs = 200000;
  std::string solution_path;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--tol", f.tol, "Relative accuracy target")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-dofs", f.max_dofs, "Degree-of-freedom budget")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}))
      ->capture_default_str();
  cmd->add_option("--solution", f.solution_path, "Write final mesh and potential as JSON");
}

qm::AdaptiveOptions options_from(const SolveFlags& f) {
  qm::AdaptiveOptions o;
  o.tol = f.tol;
  o.max_dofs = f.max_dofs;
  return o;
}

qm::Quadrilateral read_quad(const std::string& points, const std::string& file) {
  if (!file.empty()) return qm::io::quad_from_json(read_json_file(file));
  const auto pts = qm::io::parse_point_list(points);
  if (pts.size() != 4) {
    throw qm::GeometryError("bad-points", "--points needs exactly four points z1 z2 z3 z4, got " +
                                              std::to_string(pts.size()));
  }
  return qm::quad_from_points(pts[0], pts[1], pts[2], pts[3]);
}

int cmd_quad(const std::string& points, const std::string& file, const SolveFlags& flags,
             const std::string& dump_path) {
  const qm::Quadrilateral q = read_quad(points, file);
  const qm::ModulusResult r = qm::quad_modulus(q, options_from(flags));
  spdlog::info("quad: {} levels, {} dofs, bracket [{:.12g}, {:.12g}]", r.levels, r.dofs, r.lower, r.upper);
  std::cout << qm::io::to_json(r).dump() << '\n';
  if (!flags.solution_path.empty()) write_json_file(flags.solution_path, qm::io::solution_to_json(r.solution));
  if (!dump_path.empty()) {
    const auto system = qm::build_system(r.solution.mesh, qm::BoundaryConditions::quadrilateral());
    std::ofstream out(dump_path);
    if (!out) throw std::runtime_error("cannot write " + dump_path);
    qm::write_matrix_market(out, system.matrix);
  }
  if (!r.converged) spdlog::warn("budget exhausted before reaching tol");
  return r.converged ? kOk : kBudget;
}

int cmd_ring(const std::string& outer, const std::string& inner, const SolveFlags& flags) {
  const qm::RingCondenser ring(qm::io::polygon_from_json(read_json_file(outer)),
                               qm::io::polygon_from_json(read_json_file(inner)));
  const qm::CapacityResult r = qm::ring_capacity(ring, options_from(flags));
  spdlog::info("ring: {} levels, {} dofs", r.levels, r.dofs);
  std::cout << qm::io::to_json(r).dump() << '\n';
  if (!flags.solution_path.empty()) write_json_file(flags.solution_path, qm::io::solution_to_json(r.solution));
  return r.converged ? kOk : kBudget;
}

struct SweepFlags {
  std::string experiment;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string grid;
  std::string out;
  std::string format = "csv";
  double tol = 1e-3;
  std::size_t max_dofs = 200000;
  unsigned jobs = 0;
};

int cmd_sweep(const SweepFlags& f) {
  const auto id = qm::experiments::parse_experiment(f.experiment);
  if (!id) {
    std::cerr << "unknown experiment '" << f.experiment << "' (expected trans, dupl, area or sum)\n";
    return kInvalid;
  }
  qm::experiments::SweepGrid grid = qm::experiments::SweepGrid::defaults(*id);
  if (!f.grid.empty()) {
    const auto parsed = qm::experiments::SweepGrid::parse(f.grid);
    parsed.validate();
    const double a = grid.alpha;
    const double b = grid.beta;
    grid = parsed;
    grid.alpha = a;
    grid.beta = b;
  }
  if (f.alpha) grid.alpha = *f.alpha;
  if (f.beta) grid.beta = *f.beta;

  qm::AdaptiveOptions o;
  o.tol = f.tol;
  o.max_dofs = f.max_dofs;
  const auto result = qm::experiments::run_sweep(*id, grid, o, f.jobs, [](std::size_t done, std::size_t total) {
    spdlog::debug("sweep {}/{}", done, total);
  });
  const auto summary = result.summary();

  auto emit = [&](std::ostream& os) {
    if (f.format == "json") {
      os << qm::io::to_json(result).dump() << '\n';
    } else {
      qm::experiments::write_csv(os, result);
    }
  };
  const json summary_json = qm::io::to_json(summary);
  if (f.out.empty()) {
    emit(std::cout);
    std::cerr << summary_json.dump() << '\n';
  } else {
    std::ofstream out(f.out);
    if (!out) throw std::runtime_error("cannot write " + f.out);
    emit(out);
    std::cout << summary_json.dump() << '\n';
  }
  for (std::size_t k : summary.negative_records) {
    const auto& r = result.records[k];
    spdlog::warn("negative record at x={:.6g} y={:.6g}: delta={:.6g} bracket={:.3g}; review manually", r.x, r.y,
                 r.delta, r.bracket);
  }
  return kOk;
}

int cmd_specfun(const std::string& fn, double arg) {
  namespace el = qm::elliptic;
  double value = 0.0;
  if (fn == "K") {
    value = el::ellip_k(arg);
  } else if (fn == "mu") {
    value = el::mu(arg);
  } else if (fn == "muinv") {
    value = el::mu_inv(arg);
  } else if (fn == "M") {
    value = el::bowman_modulus(arg);
  } else if (fn == "Masym") {
    value = el::asymptotic_modulus(arg);
  } else {
    std::cerr << "unknown function '" << fn << "' (expected K, mu, muinv, M or Masym)\n";
    return kInvalid;
  }
  std::printf("%.15g\n", value);
  return kOk;
}

int cmd_mesh(const std::string& points, const std::string& file, const std::string& outer,
             const std::string& inner, double max_area) {
  qm::TriangulateOptions opts;
  opts.max_area = max_area;
  qm::Mesh mesh;
  if (!outer.empty() || !inner.empty()) {
    if (outer.empty() || inner.empty()) throw qm::GeometryError("bad-parameter", "--outer and --inner go together");
    const qm::RingCondenser ring(qm::io::polygon_from_json(read_json_file(outer)),
                                 qm::io::polygon_from_json(read_json_file(inner)));
    mesh = qm::triangulate(ring, opts);
  } else {
    mesh = qm::triangulate(read_quad(points, file), opts);
  }
  std::cout << qm::io::to_json(mesh).dump() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Conformal moduli of polygonal quadrilaterals and ring condensers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qm 1.0.0");

  std::string points;
  std::string file;
  std::string dump_path;
  SolveFlags quad_flags;
  auto* quad = app.add_subcommand("quad", "Modulus QM(z1,z2,z3,z4) of a quadrilateral");
  auto* pts_opt = quad->add_option("--points", points, "Four points \"x1,y1 x2,y2 x3,y3 x4,y4\" in marked order");
  auto* file_opt = quad->add_option("--file", file, "Quadrilateral JSON file")->check(CLI::ExistingFile);
  pts_opt->excludes(file_opt);
  add_solve_flags(quad, quad_flags);
  quad->add_option("--dump-system", dump_path, "Write the final stiffness matrix in Matrix Market format");

  std::string outer;
  std::string inner;
  SolveFlags ring_flags;
  auto* ring = app.add_subcommand("ring", "Capacity and modulus of a ring condenser");
  ring->add_option("--outer", outer, "Outer polygon JSON file")->required()->check(CLI::ExistingFile);
  ring->add_option("--inner", inner, "Inner polygon JSON file")->required()->check(CLI::ExistingFile);
  add_solve_flags(ring, ring_flags);

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep of one of the inequality experiments");
  sweep->add_option("--experiment", sweep_flags.experiment, "trans, dupl, area or sum")->required();
  sweep->add_option("--alpha", sweep_flags.alpha, "Angle alpha (trans, area)");
  sweep->add_option("--beta", sweep_flags.beta, "Angle beta (trans, area)");
  sweep->add_option("--grid", sweep_flags.grid, "xmin:xmax:nx,ymin:ymax:ny");
  sweep->add_option("--out", sweep_flags.out, "Output file (default stdout)");
  sweep->add_option("--format", sweep_flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--tol", sweep_flags.tol, "Relative accuracy per modulus")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--max-dofs", sweep_flags.max_dofs, "Budget per modulus")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));
  sweep->add_option("--jobs", sweep_flags.jobs, "Worker threads (default: machine parallelism)");

  std::string fn;
  double arg = 0.0;
  auto* specfun = app.add_subcommand("specfun", "Evaluate K, mu, mu inverse or the trapezoid modulus");
  specfun->add_option("--fn", fn, "K, mu, muinv, M or Masym")->required();
  specfun->add_option("--arg", arg, "Argument")->required();

  std::string mesh_points;
  std::string mesh_file;
  std::string mesh_outer;
  std::string mesh_inner;
  double max_area = 0.0;
  auto* mesh = app.add_subcommand("mesh", "Initial triangulation as JSON");
  mesh->add_option("--points", mesh_points, "Four quadrilateral points");
  mesh->add_option("--file", mesh_file, "Quadrilateral JSON file")->check(CLI::ExistingFile);
  mesh->add_option("--outer", mesh_outer, "Outer polygon JSON (ring)")->check(CLI::ExistingFile);
  mesh->add_option("--inner", mesh_inner, "Inner polygon JSON (ring)")->check(CLI::ExistingFile);
  mesh->add_option("--max-area", max_area, "Largest triangle area (default area/64)");

  std::string addr = "127.0.0.1:8080";
  qm::service::ServiceOptions service_opts;
  unsigned ttl_seconds = 3600;
  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
  serve->add_option("--addr", addr, "host:port")->capture_default_str();
  serve->add_option("--quad-tol", service_opts.quad_tol, "Default tol for /api/quad")->check(CLI::PositiveNumber);
  serve->add_option("--workers", service_opts.solve_workers, "Concurrent synchronous solves");
  serve->add_option("--sweep-jobs", service_opts.sweep_jobs, "Threads per sweep job");
  serve->add_option("--ttl", ttl_seconds, "Seconds finished jobs are kept");
  serve->add_option("--cors-origin", service_opts.cors_origin, "Access-Control-Allow-Origin value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*quad) {
      if (points.empty() && file.empty()) {
        std::cerr << "quad needs --points or --file\n";
        return kInvalid;
      }
      return cmd_quad(points, file, quad_flags, dump_path);
    }
    if (*ring) return cmd_ring(outer, inner, ring_flags);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*specfun) return cmd_specfun(fn, arg);
    if (*mesh) return cmd_mesh(mesh_points, mesh_file, mesh_outer, mesh_inner, max_area);
    if (*serve) {
      service_opts.job_ttl = std::chrono::seconds(ttl_seconds);
      return qm::service::serve(addr, service_opts);
    }
  } catch (const qm::GeometryError& e) {
    std::cerr << "invalid input (" << e.reason() << "): " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
