import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from einstype import kernels
from einstype.constructions import CORPUS
from einstype.spectral import RadialModel, radial_operator

np_k = kernels.backend("numpy")
nb_k = kernels.backend("numba")


def _jets(name, n):
    chart, _ = CORPUS[name].build()
    out = []
    for p in chart.sample_points(n, seed=2):
        g, dg, d2g, d3g = chart.metric_jet_at(p, 3)
        out.append((g, np.linalg.inv(g), dg, d2g, d3g))
    return out


@pytest.mark.parametrize("name", ["warp4_s2r", "sphere3", "sphere4_degenerate", "hyperbolic4"])
def test_curvature_backends_agree(name):
    for jet in _jets(name, 6):
        a = np_k.curvature_jet(*jet)
        b = nb_k.curvature_jet(*jet)
        for x, y in zip(a, b):
            assert np.abs(x - y).max() <= 1e-12 * max(1.0, np.abs(x).max())
        lo_a = np_k.curvature_low(*jet[:4])
        lo_b = nb_k.curvature_low(*jet[:4])
        for x, y in zip(lo_a, lo_b):
            assert np.abs(x - y).max() <= 1e-12 * max(1.0, np.abs(x).max())


@pytest.mark.parametrize("n", [100, 1000, 8000])
def test_tridiagonal_eigenvalue_against_scipy(n):
    d, e = radial_operator(RadialModel.flat(3), 1.0, n)
    ref = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))[0]
    # the attainable accuracy is a few ulps of the operator norm
    tol = 64 * np.finfo(float).eps * (np.abs(d).max() + 2 * np.abs(e).max())
    for k in (np_k, nb_k):
        assert abs(k.tridiag_min_eig(d, e) - ref) <= tol


def test_tridiagonal_random_matrices():
    rng = np.random.default_rng(1)
    for _ in range(5):
        d, e = rng.normal(size=50), rng.normal(size=49)
        ref = np.linalg.eigvalsh(np.diag(d) + np.diag(e, 1) + np.diag(e, -1)).min()
        for k in (np_k, nb_k):
            assert k.tridiag_min_eig(d, e) == pytest.approx(ref, abs=1e-12)


def _backend_in_subprocess(flag):
    env = dict(os.environ, EINSTYPE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "from einstype import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_flag_selects_backend():
    assert _backend_in_subprocess("0") == "numpy"
    assert _backend_in_subprocess("1") == "numba"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend("fortran")
