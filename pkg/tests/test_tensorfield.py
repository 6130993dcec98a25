import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from einstype import curvature as cv
from einstype.chart import Chart
from einstype.constructions import CORPUS, flat_chart, sphere_chart
from einstype.einstein_type import EinsteinTypeStructure
from einstype.tensorfield import (NumericField, PointTensor, SlotMismatch, StencilOutOfDomain,
                                  contract, covariant_derivative, fd_partial, full_norm2, lower_index,
                                  norm2, raise_index)


def test_trace_of_identity():
    t = PointTensor(np.eye(4), "ud")
    assert contract(t, 0, 1).components == 4.0


def test_trace_of_sphere_ricci():
    chart = sphere_chart(3)
    p = chart.sample_points(1)[0]
    b = cv.bundle_at(chart, p)
    S = contract(PointTensor(b.ric, "dd"), 0, 1, G=b.G).components
    assert abs(S - 6.0) <= 1e-9


def test_flat_riemann_contracts_to_zero():
    chart = flat_chart(3)
    b = cv.bundle_at(chart, [0.1, 0.2, 0.3])
    ric = contract(PointTensor(b.R, "dddd"), 1, 3, G=b.G)
    assert not np.any(ric.components)


def test_contract_needs_metric():
    with pytest.raises(SlotMismatch):
        contract(PointTensor(np.eye(3), "dd"), 0, 1)
    with pytest.raises(SlotMismatch):
        raise_index(PointTensor(np.eye(3), "ud"), 0, np.eye(3))


def test_norms():
    chart = sphere_chart(3)
    p = chart.sample_points(1, seed=1)[0]
    b = cv.bundle_at(chart, p)
    assert norm2(PointTensor(b.g, "dd"), b.g) == pytest.approx(3.0, abs=1e-12)
    assert full_norm2(b.ric, b.G) == pytest.approx(12.0, abs=1e-9)
    flat = flat_chart(3)
    f = EinsteinTypeStructure(flat, 1, 1, 0, 0, 0, "x1").at([0.3, 0.1, 0.2])
    assert full_norm2(f.df, np.eye(3)) == 1.0


def _spd(seed, m=4):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(m, m))
    return a @ a.T + m * np.eye(m)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 2))
def test_raise_then_lower_is_identity(seed, slot):
    g = _spd(seed)
    G = np.linalg.inv(g)
    t = PointTensor(np.random.default_rng(seed + 1).normal(size=(4, 4, 4)), "ddd")
    back = lower_index(raise_index(t, slot, G), slot, g)
    assert np.abs(back.components - t.components).max() <= 1e-12 * np.abs(t.components).max()


def test_fd_constant_field():
    chart = flat_chart(3)
    F = NumericField(chart, "d", lambda p: np.array([1.0, 2.0, 3.0]))
    assert np.abs(fd_partial(F, [0.0, 0.0, 0.0], 0)).max() <= 1e-12


def test_fd_sine():
    chart = flat_chart(3)
    F = NumericField(chart, "", lambda p: np.sin(p[0]))
    assert abs(fd_partial(F, [0.0, 0.0, 0.0], 0) - 1.0) <= 1e-8


def test_fd_fourth_order_convergence():
    chart = flat_chart(3)
    F = NumericField(chart, "", lambda p: np.exp(p[0]))
    p = [0.1, 0.0, 0.0]
    errs = [abs(fd_partial(F, p, 0, h) - math.exp(0.1)) for h in (0.08, 0.04)]
    assert 13 < errs[0] / errs[1] < 19


def test_fd_stencil_guard():
    chart = flat_chart(3)
    F = NumericField(chart, "", lambda p: p[0])
    with pytest.raises(StencilOutOfDomain):
        fd_partial(F, [0.99, 0.0, 0.0], 0, h=0.1)


def test_fd_matches_symbolic_on_expr_field():
    chart, _ = CORPUS["warp4_s2r"].build()
    e = chart.parse("sin(r)*cos(u1) + u3^2*exp(r/3)")
    jet = chart.scalar_jet(e, 1)
    F = NumericField(chart, "", lambda q: jet(q)[0])
    for p in chart.sample_points(16):
        exact = jet(p)[1]
        for k in range(chart.dim):
            assert abs(fd_partial(F, p, k) - exact[k]) <= 1e-8 * max(1.0, abs(exact[k]))


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_metric_compatibility(name):
    chart, _ = CORPUS[name].build()
    F = NumericField(chart, "dd", chart.metric_at)
    for p in chart.sample_points(8):
        scale = max(1.0, np.abs(chart.metric_partials_at(p, 1)).max())
        assert np.abs(covariant_derivative(F, p, richardson=True)).max() <= 1e-8 * scale


def test_hessian_of_square_on_flat_chart():
    chart = flat_chart(3)
    jet = chart.scalar_jet("x1^2", 1)
    F = NumericField(chart, "d", lambda q: jet(q)[1])
    H = covariant_derivative(F, [0.2, 0.1, 0.3])
    assert np.allclose(H, np.diag([2.0, 0, 0]), atol=1e-10)


def test_hessian_by_fd_matches_direct_formula_on_sphere():
    chart = sphere_chart(3)
    jet = chart.scalar_jet("t1", 2)
    F = NumericField(chart, "d", lambda q: jet(q)[1])
    for p in chart.sample_points(4, seed=2):
        H = covariant_derivative(F, p, richardson=True)
        # direct: f_ij = d_i d_j t1 - Gamma^s_ij d_s t1 = -Gamma^0_ij
        direct = -cv.christoffel_at(chart, p)[0]
        assert np.abs(H - direct).max() <= 1e-9
        assert np.abs(H - H.T).max() <= 1e-9


def test_raising_commutes_with_covariant_derivative():
    chart, _ = CORPUS["warp4_s2r"].build()
    jet = chart.scalar_jet(chart.parse("sin(r)*u3 + cos(u1)"), 1)
    low = NumericField(chart, "d", lambda q: jet(q)[1])
    p = chart.sample_points(1, seed=9)[0]
    nabla_low = covariant_derivative(low, p, richardson=True)
    # nabla(f^i) lowered equals nabla(f_i): compare via d(G df) by product rule
    up = NumericField(chart, "u", lambda q: chart.inverse_metric_at(q) @ jet(q)[1])
    from einstype.tensorfield import fd_gradient
    gam = cv.christoffel_at(chart, p)
    d_up = fd_gradient(up, p, richardson=True)
    nabla_up = d_up + np.einsum("iak,k->ia", gam, up(p))
    lowered = chart.metric_at(p) @ nabla_up
    assert np.abs(lowered - nabla_low).max() <= 1e-8
