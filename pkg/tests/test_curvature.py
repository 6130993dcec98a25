import math

import numpy as np
import pytest

from einstype import curvature as cv
from einstype.chart import Chart
from einstype.constructions import CORPUS, flat_chart, hyperbolic_chart, sphere_chart

sympy = pytest.importorskip("sympy")


def test_polar_christoffels():
    c = Chart(["r", "t", "z"], {(0, 0): "1", (1, 1): "r^2", (2, 2): "1"}, [(0.5, 2), (0, 6), (-1, 1)])
    gam = cv.christoffel_at(c, [1.5, 1.0, 0.0])
    assert gam[0, 1, 1] == pytest.approx(-1.5, abs=1e-15)
    assert gam[1, 0, 1] == pytest.approx(1 / 1.5, abs=1e-15)
    assert gam[1, 1, 0] == gam[1, 0, 1]
    assert gam[0, 0, 0] == 0.0 and gam[2].any() == False  # noqa: E712


def test_flat_is_flat():
    b = cv.bundle_at(flat_chart(4), [0.1, 0.2, 0.3, 0.4])
    for t in (b.gam, b.R, b.ric, b.W, b.C, b.nablaR):
        assert not np.any(t)
    assert b.S == 0.0


@pytest.mark.parametrize("m", [3, 4])
def test_round_sphere(m):
    chart = sphere_chart(m)
    for p in chart.sample_points(8):
        b = cv.bundle_at(chart, p)
        expected_R = np.einsum("ik,jl->ijkl", b.g, b.g) - np.einsum("il,jk->ijkl", b.g, b.g)
        assert np.abs(b.R - expected_R).max() <= 1e-9
        assert b.S == pytest.approx(m * (m - 1), abs=1e-9)
        assert np.abs(b.W).max() <= 1e-9
        assert np.abs(b.C).max() <= 1e-9
        assert np.abs(b.nablaR).max() <= 1e-8


def test_hyperbolic_ricci():
    chart = hyperbolic_chart(3)
    for p in chart.sample_points(8):
        b = cv.bundle_at(chart, p)
        assert np.abs(b.ric + 2 * b.g).max() <= 1e-9 * max(1.0, np.abs(b.g).max())


def test_riemann_symmetries_on_warped_chart():
    chart, _ = CORPUS["warp4_s2r"].build()
    for p in chart.sample_points(8):
        R = cv.riemann_at(chart, p)
        assert np.abs(R + R.transpose(1, 0, 2, 3)).max() <= 1e-12
        assert np.abs(R + R.transpose(0, 1, 3, 2)).max() <= 1e-12
        assert np.abs(R - R.transpose(2, 3, 0, 1)).max() <= 1e-10


def test_kulkarni_nomizu_of_metric():
    g = np.diag([1.0, 2.0, 3.0])
    kn = cv.kulkarni_nomizu(g, g)
    # (g KN g) = 2 (g_ik g_jl - g_il g_jk)
    expected = 2 * (np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g))
    assert np.array_equal(kn, expected)


def test_cotton_routes_agree_on_warped_chart():
    chart, _ = CORPUS["warp4_s2r"].build()
    for p in chart.sample_points(4, seed=1):
        C = cv.cotton_at(chart, p)
        via_weyl = cv.cotton_from_weyl_div_at(chart, p)
        assert np.abs(C - via_weyl).max() <= 1e-6 * max(1.0, np.abs(C).max())


def test_bach_vanishes_on_einstein_four_manifolds():
    for chart in (sphere_chart(4), hyperbolic_chart(4)):
        for p in chart.sample_points(3):
            assert np.abs(cv.bach_at(chart, p)).max() <= 1e-5


def test_dimension_guard():
    with pytest.raises(cv.DimensionError):
        cv.cotton_from_weyl_div_at(sphere_chart(3), sphere_chart(3).sample_points(1)[0])


# ---------------------------------------------------------------------------
# independent symbolic oracle

def _sympy_curvature(coords, gmat):
    x = sympy.symbols(coords)
    g = sympy.Matrix(gmat(*x))
    G = g.inv()
    m = len(x)
    gam = [[[sum(G[r, s] * (sympy.diff(g[s, i], x[j]) + sympy.diff(g[s, j], x[i])
                            - sympy.diff(g[i, j], x[s])) for s in range(m)) / 2
             for j in range(m)] for i in range(m)] for r in range(m)]
    # Ricci via R^r_{i r j}
    ric = sympy.zeros(m, m)
    for i in range(m):
        for j in range(m):
            acc = 0
            for r in range(m):
                acc += sympy.diff(gam[r][j][i], x[r]) - sympy.diff(gam[r][r][i], x[j])
                for l in range(m):
                    acc += gam[r][r][l] * gam[l][j][i] - gam[r][j][l] * gam[l][r][i]
            ric[i, j] = acc
    S = sum(G[i, j] * ric[i, j] for i in range(m) for j in range(m))
    lam = lambda e: sympy.lambdify(x, e, "math")
    return lam(gam), lam(ric.tolist()), lam(S)


def test_matches_sympy_on_warped_product():
    coords = ["r", "u", "v"]
    chart = Chart(coords, {(0, 0): "1", (1, 1): "(1 + r^2)^2", (2, 2): "(1 + r^2)^2*sin(u)^2"},
                  [(-0.8, 0.8), (0.5, 2.5), (0.0, 6.0)])
    gam_f, ric_f, S_f = _sympy_curvature(
        coords, lambda r, u, v: [[1, 0, 0], [0, (1 + r**2)**2, 0], [0, 0, (1 + r**2)**2 * sympy.sin(u)**2]])
    for p in chart.sample_points(10, seed=3):
        b = cv.bundle_at(chart, p)
        assert np.abs(b.gam - np.array(gam_f(*p), dtype=float)).max() <= 1e-12
        assert np.abs(b.ric - np.array(ric_f(*p), dtype=float)).max() <= 1e-10
        assert b.S == pytest.approx(S_f(*p), rel=1e-11, abs=1e-11)


def test_matches_sympy_on_non_diagonal_metric():
    coords = ["x", "y", "z"]
    chart = Chart(coords, {(0, 0): "1 + x^2", (0, 1): "x*y/2", (1, 1): "2 + sin(z)", (2, 2): "exp(y)",
                           (1, 2): "z/4"},
                  [(-0.5, 0.5)] * 3)
    gam_f, ric_f, S_f = _sympy_curvature(
        coords, lambda x, y, z: [[1 + x**2, x * y / 2, 0], [x * y / 2, 2 + sympy.sin(z), z / 4],
                                 [0, z / 4, sympy.exp(y)]])
    for p in chart.sample_points(6, seed=1):
        b = cv.bundle_at(chart, p)
        assert np.abs(b.gam - np.array(gam_f(*p), dtype=float)).max() <= 1e-12
        assert np.abs(b.ric - np.array(ric_f(*p), dtype=float)).max() <= 1e-10
        assert b.S == pytest.approx(S_f(*p), rel=1e-10, abs=1e-10)


def test_bundle_cache_returns_identical_values():
    chart = sphere_chart(3)
    p = chart.sample_points(1)[0]
    a = cv.bundle_at(chart, p)
    cv.clear_cache()
    b = cv.bundle_at(chart, p)
    assert np.array_equal(a.R, b.R) and np.array_equal(a.nablaR, b.nablaR)
    assert math.isfinite(a.S)
