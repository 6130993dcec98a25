from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from einstype import einstein_type as et
from einstype.constructions import CORPUS, flat_chart, gaussian_soliton, sphere_chart
from einstype.einstein_type import EinsteinTypeStructure, classify


def _s(m, a, b, u, r=0, lam=0, f="x1"):
    return EinsteinTypeStructure(flat_chart(m), a, b, u, r, lam, f)


def test_classify_examples():
    assert classify(_s(3, 1, 1, 0)) == "nondegenerate"
    assert classify(_s(4, 1, -2, 2)) == "degenerate"
    assert classify(_s(4, 1, 2, 1)) == "nondegenerate"
    assert classify(_s(3, 1, 0, 1)) == "beta_zero"
    assert classify(_s(3, 0, 1, -1, 1)) == "alpha_zero"


def test_presets():
    assert et.preset("einstein", 4) == (1, 0, 0, Fraction(1, 4))
    assert et.preset("ricci_soliton", 3) == (1, 1, 0, 0)
    assert et.preset("yamabe_quasi_soliton", 3, k=2) == (0, 1, Fraction(-1, 2), 1)
    assert et.preset("rho_einstein", 3, k=Fraction(1, 3))[3] == Fraction(1, 3)
    assert classify(_s(3, *et.preset("einstein", 3))) == "beta_zero"
    assert classify(_s(3, *et.preset("yamabe_quasi_soliton", 3, 2))) == "alpha_zero"
    with pytest.raises(et.InvalidParameters):
        et.preset("quasi_einstein", 3)
    with pytest.raises(KeyError):
        et.preset("nope", 3)


def test_all_zero_coefficients_rejected():
    with pytest.raises(et.InvalidParameters):
        _s(3, 0, 0, 0, 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 6), st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))
def test_classification_follows_degeneracy_gap(m, a, b, u):
    if a == b == u == 0:
        return
    s = _s(m, a, b, u)
    c = classify(s)
    if a == 0:
        assert c == "alpha_zero"
    elif b == 0:
        assert c == "beta_zero"
    else:
        assert (c == "degenerate") == (b * b == (m - 2) * a * u)


def test_gaussian_soliton_satisfies_equation():
    chart, s = gaussian_soliton(3)
    for p in chart.sample_points(16):
        sp = s.at(p)
        assert sp.structure_error() <= 1e-12
        assert abs(sp.traced_residual()) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3))
def test_wrong_lambda_shifts_residual_by_multiple_of_metric(c):
    chart, good = gaussian_soliton(3)
    bad = EinsteinTypeStructure(chart, good.alpha, good.beta, good.mu, good.rho,
                                f"1/2 + {c!r}*x1", good.f)
    for p in chart.sample_points(4):
        diff = bad.at(p).residual() - good.at(p).residual()
        assert np.abs(diff + c * p[0] * np.eye(3)).max() <= 1e-12 * max(1, abs(c))
        assert bad.at(p).traced_residual() == pytest.approx(-3 * c * p[0], abs=1e-12)


def test_sphere_einstein_structure():
    chart = sphere_chart(3)
    s = EinsteinTypeStructure(chart, *et.preset("einstein", 3), 0, 0)
    for p in chart.sample_points(8):
        assert s.at(p).structure_error() <= 1e-10


@pytest.mark.parametrize("name", ["gaussian3", "cylinder_s2r2", "sphere3_almost", "quasi_einstein_sphere3",
                                  "rho_einstein_gaussian3", "sphere4_degenerate"])
def test_d_forms_agree(name):
    chart, s = CORPUS[name].build()
    for p in chart.sample_points(8):
        sp = s.at(p)
        D1, D2, D3 = sp.d_tensor(1), sp.d_tensor(2), sp.d_tensor(3)
        scale = max(1.0, np.abs(D1).max(), np.abs(sp.b.ric).max() * np.abs(sp.df).max())
        assert np.abs(D1 - D2).max() <= 1e-12 * scale
        assert np.abs(D1 - D3).max() <= 1e-9 * scale
        assert np.abs(D1 + D1.transpose(0, 2, 1)).max() <= 1e-12 * scale
        cyc = D1 + D1.transpose(1, 2, 0) + D1.transpose(2, 0, 1)
        assert np.abs(cyc).max() <= 1e-12 * scale


def test_hessian_form_of_d_needs_alpha():
    _, s = CORPUS["yamabe_quasi_sphere3"].build()
    p = s.chart.sample_points(1)[0]
    with pytest.raises(et.AlphaZero):
        s.at(p).d_tensor(3)


def test_d_vanishes_for_rotationally_symmetric_gaussian():
    chart, s = gaussian_soliton(3)
    for p in chart.sample_points(8):
        assert np.abs(s.at(p).d_tensor(1)).max() == 0.0


def test_d_nonzero_on_cylinder_soliton():
    chart, s = CORPUS["cylinder_s2r2"].build()
    assert max(np.abs(s.at(p).d_tensor(1)).max() for p in chart.sample_points(8)) > 1e-3


@pytest.mark.parametrize("name", ["gaussian3", "cylinder_s2r2", "sphere3_almost", "quasi_einstein_sphere3",
                                  "conformal_sphere3", "sphere4_degenerate", "alpha0_warp_sinh_mu05"])
def test_first_integrability(name):
    chart, s = CORPUS[name].build()
    for p in chart.sample_points(8):
        res, scale = et.integrability1_residual_at(s, p)
        assert np.abs(res).max() <= 1e-8 * scale


@pytest.mark.parametrize("name", ["cylinder_s2r2", "quasi_einstein_sphere3", "alpha0_warp_exp_mu05"])
def test_second_integrability(name):
    chart, s = CORPUS[name].build()
    for p in chart.sample_points(3):
        res, scale = et.integrability2_residual_at(s, p)
        assert np.abs(res).max() <= 1e-4 * scale


def test_integrability_needs_beta():
    chart, s = CORPUS["beta0_warp_exp3"].build()
    with pytest.raises(et.BetaZero):
        et.integrability1_residual_at(s, chart.sample_points(1)[0])


@pytest.mark.parametrize("name", ["gaussian3", "cylinder_s2r2", "sphere3_almost", "rho_einstein_gaussian3"])
def test_scalar_gradient_identity(name):
    chart, s = CORPUS[name].build()
    for p in chart.sample_points(8):
        res, scale = et.sk_identity_residual_at(s, p)
        assert np.abs(res).max() <= 1e-8 * scale


def test_fd_contraction_and_y_orthogonal():
    chart, s = CORPUS["cylinder_s2r2"].build()
    for p in chart.sample_points(8):
        res, scale = et.fd_contraction_residual_at(s, p)
        assert np.abs(res).max() <= 1e-10 * scale
        sp = s.at(p)
        assert abs(et.y_field_at(s, p) @ sp.grad) <= 1e-10 * max(1.0, sp.grad_norm2)


def test_soliton_y_alternative():
    chart, s = CORPUS["cylinder_s2r2"].build()
    for p in chart.sample_points(8):
        res, scale = et.soliton_y_alternative_at(s, p)
        assert np.abs(res).max() <= 1e-6 * scale


def test_d_norm_identity_on_cylinder():
    chart, s = CORPUS["cylinder_s2r2"].build()
    for p in chart.sample_points(3):
        res, scale = et.d_norm_identity_residual_at(s, p)
        assert abs(res) <= 1e-4 * scale


def test_beta_zero_identities():
    chart, s = CORPUS["beta0_warp_exp3"].build()
    for p in chart.sample_points(3):
        for key, (res, scale) in et.beta_zero_identities_at(s, p).items():
            assert res <= 1e-4 * scale, key


def test_conformal_einstein_for_degenerate():
    chart, s = CORPUS["sphere4_degenerate"].build()
    assert classify(s) == "degenerate"
    assert s.degeneracy_gap() == 0
    for p in chart.sample_points(8):
        res, scale = et.conformal_einstein_residual_at(s, p)
        assert np.abs(res).max() <= 1e-8 * scale


def test_conformal_chart_requires_degenerate():
    _, s = gaussian_soliton(3)
    with pytest.raises(et.NotDegenerate):
        et.conformal_chart(s)
