#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "qm/mesh.hpp"

namespace qm {

/// Dirichlet values per boundary tag plus the tags carrying a zero
/// normal derivative. Every tag present in a mesh must be in exactly one
/// of the two sets.
struct BoundaryConditions {
  std::map<BoundaryTag, double> dirichlet;
  std::set<BoundaryTag> neumann;

  /// Gamma2 -> 0, Gamma4 -> 1, Gamma1 and Gamma3 insulated.
  static BoundaryConditions quadrilateral();
  /// PlateE -> 1, PlateF -> 0.
  static BoundaryConditions ring();

  void validate_for(const Mesh& mesh) const;
};

/// Compressed sparse row matrix.
struct SparseMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<int> cols;
  std::vector<double> values;

  void multiply(std::span<const double> x, std::span<double> y) const;
  double at(std::size_t i, std::size_t j) const;
  std::size_t nonzeros() const { return values.size(); }
};

/// P1 stiffness matrix over all mesh nodes (no boundary conditions).
SparseMatrix assemble_stiffness(const Mesh& mesh);

struct LinearSystem {
  SparseMatrix matrix;        // free-free block
  std::vector<double> rhs;    // minus the free-Dirichlet block applied to the data
  std::vector<int> free_nodes;
  std::vector<double> dirichlet_values;  // per mesh node; NaN for free nodes
};

/// Eliminates Dirichlet nodes. A node touching any Dirichlet edge takes
/// that edge's value.
LinearSystem build_system(const Mesh& mesh, const BoundaryConditions& bc);

void write_matrix_market(std::ostream& out, const SparseMatrix& matrix);

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  double rel_tol = 1e-10;
  double iteration_factor = 20.0;  // cap = factor * sqrt(n)
};

struct PotentialSolution {
  std::vector<double> nodal_values;
  double energy = 0.0;     // sum over triangles of |grad u_h|^2 * area
  double residual = 0.0;   // achieved relative residual
  int iterations = 0;
};

/// Solves the mixed problem by Jacobi-preconditioned conjugate gradients.
/// `initial_guess`, when given, must have one value per mesh node.
PotentialSolution assemble_and_solve(const Mesh& mesh, const BoundaryConditions& bc,
                                     double rel_tol = 1e-10,
                                     std::span<const double> initial_guess = {});
PotentialSolution assemble_and_solve(const Mesh& mesh, const BoundaryConditions& bc,
                                     const SolverOptions& options,
                                     std::span<const double> initial_guess = {});

/// Element-wise integral of |grad u_h|^2, accumulated with compensated summation.
double dirichlet_energy(const Mesh& mesh, std::span<const double> values);

/// Gradient-jump indicators: each interior edge contributes h_E^2 [du/dn]^2
/// split evenly between its two triangles; insulated edges contribute
/// h_E^2 (du/dn)^2 to their triangle. Dorfler marking with `theta`.
RefinementMarking element_error_indicators(const Mesh& mesh, const PotentialSolution& solution,
                                           const BoundaryConditions& bc, double theta = 0.5);

/// Linear interpolation of a coarse nodal field onto a mesh obtained from it
/// by refine(): nodes with recorded parents take the parents' mean.
std::vector<double> prolongate(const Mesh& fine, std::span<const double> coarse);

}  // namespace qm
