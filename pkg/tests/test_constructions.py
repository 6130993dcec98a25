import math

import numpy as np
import pytest

from einstype import constructions as cons
from einstype.constructions import CORPUS, WarpedSpec
from einstype.curvature import bundle_at
from einstype.einstein_type import classify


@pytest.mark.parametrize("m", [3, 4, 5])
def test_space_form_scalar_curvature(m):
    for chart, S in ((cons.flat_chart(m), 0.0), (cons.sphere_chart(m), m * (m - 1)),
                     (cons.hyperbolic_chart(m), -m * (m - 1))):
        for p in chart.sample_points(4):
            assert bundle_at(chart, p).S == pytest.approx(S, abs=1e-9)


def test_warped_sine_over_sphere_is_round():
    spec = WarpedSpec("sphere", "sin(r)", (0.4, 2.6), 2)
    chart = cons.warped_chart(spec)
    for p in chart.sample_points(8):
        b = bundle_at(chart, p)
        assert np.abs(b.ric - 2 * b.g).max() <= 1e-9
        assert b.S == pytest.approx(6.0, abs=1e-9)


def test_warped_linear_over_sphere_is_flat():
    chart = cons.warped_chart(WarpedSpec("sphere", "r", (0.4, 2.0), 2))
    for p in chart.sample_points(8):
        assert np.abs(bundle_at(chart, p).R).max() <= 1e-10


def test_warped_exp_over_flat_is_hyperbolic():
    chart = cons.warped_chart(WarpedSpec("flat", "exp(r)", (-0.5, 0.5), 3))
    for p in chart.sample_points(8):
        b = bundle_at(chart, p)
        assert np.abs(b.ric + 3 * b.g).max() <= 1e-9 * max(1.0, np.abs(b.g).max())


def test_warp_must_be_positive():
    with pytest.raises(cons.NonpositiveWarp):
        cons.warped_chart(WarpedSpec("sphere", "r", (-0.5, 1.0), 2))


def test_alpha0_builder_guards():
    spec = WarpedSpec("sphere", "1", (0.2, 1.0), 2)
    with pytest.raises(cons.ZeroInitialSlope):
        cons.alpha0_warped_structure("r^2", 0, spec)
    with pytest.raises(cons.SignChange):
        cons.alpha0_warped_structure("sin(3*r)", 0, WarpedSpec("sphere", "1", (0.2, 1.5), 2))


def test_degenerate_builder_requires_einstein():
    chart, _ = CORPUS["warp4_s2r"].build()
    with pytest.raises(cons.NotEinstein):
        cons.degenerate_from_einstein(chart, "r", 1)


@pytest.mark.parametrize("name", ["sphere4_degenerate", "flat4_degenerate"])
def test_degenerate_builds_are_exactly_degenerate(name):
    _, s = CORPUS[name].build()
    assert classify(s) == "degenerate"
    assert s.degeneracy_gap() == 0
    # beta = -(m-2) a with a = 1
    assert s.beta == -2 and s.mu == 2 and s.alpha == 1


def test_degenerate_recovers_einstein_metric():
    chart, s = CORPUS["sphere4_degenerate"].build()
    orig = cons.sphere_chart(4)
    for p in chart.sample_points(4):
        f = s.f_jet()(p)[0]
        assert np.abs(math.exp(2 * f) * chart.metric_at(p) - orig.metric_at(p)).max() <= 1e-12


@pytest.mark.parametrize("name", [n for n in CORPUS if n != "warp4_s2r"])
def test_corpus_structures_hold(name):
    entry = CORPUS[name]
    chart, s = entry.build()
    tol = entry.tolerances.get("structure_equation", 1e-9)
    for p in chart.sample_points(16):
        assert s.at(p).structure_error() <= tol


def test_corpus_lookup():
    assert cons.corpus_entry("gaussian3") is CORPUS["gaussian3"]
    with pytest.raises(KeyError):
        cons.corpus_entry("nope")
    assert CORPUS["gaussian3"].build() is CORPUS["gaussian3"].build()


def test_corpus_names_snapshot():
    assert cons.corpus_names() == [
        "flat3", "flat4", "sphere3", "sphere4", "hyperbolic3", "hyperbolic4", "gaussian3", "gaussian4",
        "cylinder_s2r2", "sphere3_almost", "yamabe_flat3", "yamabe_quasi_sphere3", "conformal_sphere3",
        "quasi_einstein_sphere3", "rho_einstein_gaussian3", "alpha0_warp_exp", "alpha0_warp_exp_mu05",
        "alpha0_warp_sinh", "alpha0_warp_sinh_mu05", "sphere4_degenerate", "flat4_degenerate", "warp4_s2r",
        "beta0_warp_exp3"]


def test_smooth_test_function_is_seeded():
    chart = cons.sphere_chart(3)
    a = cons.smooth_test_function(chart, 1)
    assert a == cons.smooth_test_function(chart, 1)
    assert a != cons.smooth_test_function(chart, 2)
