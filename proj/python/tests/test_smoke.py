import math

import pytest

import qmod


def test_special_functions():
    assert qmod.ellip_k(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert qmod.mu_inv(qmod.mu(0.3)) == pytest.approx(0.3, rel=1e-12)
    assert qmod.asymptotic_modulus(2.0) == pytest.approx(1.5 - math.log(2) / math.pi, rel=1e-14)
    for h in (1.5, 3.0):
        assert h - 1 <= qmod.bowman_modulus(h) <= h


def test_rectangle():
    r = qmod.quad_modulus([(1, 2), (0, 2), (0, 0), (1, 0)], tol=1e-4)
    assert r.converged
    assert r.lower <= 2.0 <= r.upper * (1 + 1e-12)
    assert r.value == pytest.approx(2.0, rel=1e-3)
    assert len(r.solution.potential) == len(r.solution.mesh.nodes)


def test_marked_polygon():
    r = qmod.quad_modulus([(0, 0), (2, 0), (2, 2), (1, 0.8), (0, 2)], marked=[0, 1, 2, 4], tol=1e-3)
    assert r.width <= 1e-3 * r.value * 1.01


def test_trapezoid_matches_closed_form():
    r = qmod.quad_modulus([(1, 3), (0, 2), (0, 0), (1, 0)], tol=1e-4)
    assert abs(r.value - qmod.bowman_modulus(3.0)) <= 2e-3


def test_geometry_error_reason():
    with pytest.raises(qmod.GeometryError) as info:
        qmod.quad_modulus([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert info.value.reason == "self-intersection"
    assert isinstance(info.value, ValueError)


def test_ring():
    outer = qmod.regular_polygon(48, 2.0)
    inner = qmod.regular_polygon(48, 1.0)
    r = qmod.ring_capacity(outer, inner, tol=1e-3)
    assert r.modulus == pytest.approx(math.log(2), rel=0.02)
    assert r.modulus == pytest.approx(2 * math.pi / r.capacity, rel=1e-12)


def test_mesh():
    m = qmod.triangulate([(1, 1), (0, 1), (0, 0), (1, 0)], max_area=0.05)
    assert m.area() == pytest.approx(1.0, rel=1e-12)
    assert m.min_angle_deg() >= 20.0
    assert {tag for _, _, tag in m.boundary} == {"Gamma1", "Gamma2", "Gamma3", "Gamma4"}


def test_experiments():
    rec = qmod.exp_duplication(1 + 1j, 1j, tol=1e-3)
    assert abs(rec.delta) <= rec.bracket
    assert qmod.exp_sum_inequality(2.0, 3.0).sign == "positive"
    records, csv = qmod.run_sweep("sum", grid="1.5:2:2,1.5:2:2")
    assert len(records) == 4
    assert csv.splitlines()[0] == "x,y,lhs,rhs,delta,bracket,skipped"
    with pytest.raises(ValueError):
        qmod.run_sweep("nosuch")
