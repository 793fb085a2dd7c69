#include "qm/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qm {

namespace {

// One adaptive sequence: solve on the current mesh, then optionally refine.
class AdaptiveProblem {
 public:
  AdaptiveProblem(Mesh mesh, BoundaryConditions bc, const AdaptiveOptions& options)
      : mesh_(std::move(mesh)), bc_(std::move(bc)), options_(options) {
    solve({});
  }

  void refine_once() {
    if (marking_.marked.empty()) {
      stalled_ = true;
      return;
    }
    RefineResult next = refine_with_history(mesh_, marking_.marked);
    std::vector<double> guess = prolongate(next.mesh, solution_.nodal_values);
    mesh_ = std::move(next.mesh);
    solve(guess);
  }

  double energy() const { return solution_.energy; }
  double estimate() const { return estimate_; }
  std::size_t dofs() const { return mesh_.nodes.size(); }
  bool stalled() const { return stalled_; }
  const std::vector<double>& history() const { return history_; }
  SolutionField field() const { return {mesh_, solution_.nodal_values}; }

 private:
  void solve(std::span<const double> guess) {
    SolverOptions so;
    so.rel_tol = options_.solver_tol;
    solution_ = assemble_and_solve(mesh_, bc_, so, guess);
    history_.push_back(solution_.energy);
    marking_ = element_error_indicators(mesh_, solution_, bc_, options_.theta);
    estimate_ = 0.0;
    for (double e : marking_.indicators) estimate_ += e;
  }

  Mesh mesh_;
  BoundaryConditions bc_;
  AdaptiveOptions options_;
  PotentialSolution solution_;
  RefinementMarking marking_;
  std::vector<double> history_;
  double estimate_ = 0.0;
  bool stalled_ = false;
};

void check_options(const AdaptiveOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (options.max_dofs < 1) throw std::invalid_argument("max_dofs must be positive");
  if (!(options.theta > 0.0 && options.theta <= 1.0)) throw std::invalid_argument("theta must lie in (0,1]");
}

TriangulateOptions mesh_options(const AdaptiveOptions& options) {
  TriangulateOptions t;
  t.max_area = options.initial_max_area;
  return t;
}

}  // namespace

Quadrilateral conjugate_quad(const Quadrilateral& q) {
  const auto& m = q.marked();
  return Quadrilateral(q.domain(), {m[1], m[2], m[3], m[0]});
}

ModulusResult quad_modulus(const Quadrilateral& q, double tol, std::size_t max_dofs) {
  AdaptiveOptions options;
  options.tol = tol;
  options.max_dofs = max_dofs;
  return quad_modulus(q, options);
}

ModulusResult quad_modulus(const Quadrilateral& q, const AdaptiveOptions& options) {
  check_options(options);
  const Quadrilateral conj = conjugate_quad(q);
  AdaptiveProblem primal(triangulate(q, mesh_options(options)), BoundaryConditions::quadrilateral(), options);
  AdaptiveProblem dual(triangulate(conj, mesh_options(options)), BoundaryConditions::quadrilateral(), options);

  ModulusResult result;
  std::size_t level = 0;
  while (true) {
    result.upper = primal.energy() * (1.0 + kBracketRoundingAllowance);
    result.lower = (1.0 / dual.energy()) * (1.0 - kBracketRoundingAllowance);
    result.value = 0.5 * (result.upper + result.lower);
    if (result.upper - result.lower <= options.tol * result.value) {
      result.converged = true;
      break;
    }
    const std::size_t dofs = std::max(primal.dofs(), dual.dofs());
    if (dofs > options.max_dofs || level >= options.max_levels) break;
    if (primal.stalled() && dual.stalled()) break;
    // Refine whichever side dominates the relative bracket error; both when comparable.
    const double rel_p = primal.estimate() / primal.energy();
    const double rel_d = dual.estimate() / dual.energy();
    if (rel_p >= 0.5 * rel_d && !primal.stalled()) primal.refine_once();
    if (rel_d >= 0.5 * rel_p && !dual.stalled()) dual.refine_once();
    ++level;
  }
  result.levels = level;
  result.dofs = std::max(primal.dofs(), dual.dofs());
  result.energy_history = primal.history();
  result.conjugate_energy_history = dual.history();
  result.solution = primal.field();
  return result;
}

ModulusResult quad_modulus(Point z1, Point z2, Point z3, Point z4, const AdaptiveOptions& options) {
  return quad_modulus(quad_from_points(z1, z2, z3, z4), options);
}

CapacityResult ring_capacity(const RingCondenser& ring, double tol, std::size_t max_dofs) {
  AdaptiveOptions options;
  options.tol = tol;
  options.max_dofs = max_dofs;
  return ring_capacity(ring, options);
}

CapacityResult ring_capacity(const RingCondenser& ring, const AdaptiveOptions& options) {
  check_options(options);
  AdaptiveProblem problem(triangulate(ring, mesh_options(options)), BoundaryConditions::ring(), options);
  CapacityResult result;
  std::size_t level = 0;
  while (true) {
    const auto& h = problem.history();
    result.error_estimate = std::numeric_limits<double>::infinity();
    if (h.size() >= 3) {
      // Geometric tail of the energy decrements.
      const double d_last = h[h.size() - 2] - h.back();
      const double d_prev = h[h.size() - 3] - h[h.size() - 2];
      const double ratio = d_prev > 0.0 ? d_last / d_prev : 1.0;
      if (ratio >= 0.0 && ratio < 1.0) result.error_estimate = std::max(d_last, d_last * ratio / (1.0 - ratio));
    }
    if (result.error_estimate <= options.tol * problem.energy()) {
      result.converged = true;
      break;
    }
    if (problem.dofs() > options.max_dofs || level >= options.max_levels || problem.stalled()) break;
    problem.refine_once();
    ++level;
  }
  result.capacity = problem.energy();
  result.modulus = 2.0 * std::numbers::pi / result.capacity;
  result.levels = level;
  result.dofs = problem.dofs();
  result.energy_history = problem.history();
  result.solution = problem.field();
  return result;
}

}  // namespace qm
