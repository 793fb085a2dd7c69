"""Conformal moduli of polygonal quadrilaterals and ring condensers."""

from ._core import (
    CapacityResult,
    GeometryError,
    Mesh,
    MeshError,
    ModulusResult,
    Record,
    SolverError,
    asymptotic_modulus,
    bowman_modulus,
    ellip_k,
    exp_duplication,
    exp_equal_area,
    exp_sum_inequality,
    exp_transposition,
    mu,
    mu_inv,
    quad_modulus,
    regular_polygon,
    ring_capacity,
    run_sweep,
    triangulate,
)

__all__ = [
    "CapacityResult",
    "GeometryError",
    "Mesh",
    "MeshError",
    "ModulusResult",
    "Record",
    "SolverError",
    "asymptotic_modulus",
    "bowman_modulus",
    "ellip_k",
    "exp_duplication",
    "exp_equal_area",
    "exp_sum_inequality",
    "exp_transposition",
    "mu",
    "mu_inv",
    "quad_modulus",
    "regular_polygon",
    "ring_capacity",
    "run_sweep",
    "triangulate",
]
