#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qm/fem.hpp"
#include "qm/geometry.hpp"
#include "qm/mesh.hpp"

namespace qm {

struct AdaptiveOptions {
  double tol = 1e-4;               // relative bracket width (quads) or energy decrement (rings)
  std::size_t max_dofs = 200000;
  double theta = 0.5;              // Dorfler fraction
  double initial_max_area = 0.0;   // <= 0: domain area / 64
  double solver_tol = 1e-10;
  std::size_t max_levels = 200;
};

/// Final mesh and nodal potential of a solve, kept for export and rendering.
struct SolutionField {
  Mesh mesh;
  std::vector<double> potential;
};

/// Modulus of a quadrilateral bracketed by two conforming upper bounds:
/// upper from the quadrilateral itself, lower as the reciprocal of the
/// conjugate quadrilateral's energy.
struct ModulusResult {
  double value = 0.0;   // (upper + lower) / 2
  double upper = 0.0;
  double lower = 0.0;
  std::size_t dofs = 0;
  std::size_t levels = 0;
  bool converged = false;
  std::vector<double> energy_history;            // primal, per level
  std::vector<double> conjugate_energy_history;  // conjugate, per level
  SolutionField solution;                        // primal

  double width() const { return upper - lower; }
};

struct CapacityResult {
  double capacity = 0.0;
  double modulus = 0.0;  // 2 pi / capacity
  double error_estimate = 0.0;
  std::size_t dofs = 0;
  std::size_t levels = 0;
  bool converged = false;
  std::vector<double> energy_history;
  SolutionField solution;
};

/// Relative floating-point allowance applied to both ends of a bracket.
inline constexpr double kBracketRoundingAllowance = 1e-12;

/// Same polygon with the marked points rotated one step: (z2, z3, z4, z1).
Quadrilateral conjugate_quad(const Quadrilateral& q);

ModulusResult quad_modulus(const Quadrilateral& q, double tol, std::size_t max_dofs);
ModulusResult quad_modulus(const Quadrilateral& q, const AdaptiveOptions& options = {});

CapacityResult ring_capacity(const RingCondenser& ring, double tol, std::size_t max_dofs);
CapacityResult ring_capacity(const RingCondenser& ring, const AdaptiveOptions& options = {});

/// QM(z1, z2, z3, z4) for the straight-sided quadrilateral through the points.
ModulusResult quad_modulus(Point z1, Point z2, Point z3, Point z4, const AdaptiveOptions& options = {});

}  // namespace qm
