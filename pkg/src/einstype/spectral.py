"""Radial surrogates for stability and nonexistence criteria.

Everything here is a finite-horizon numerical diagnostic: asymptotic
statements (a limsup being infinite, a global spectral radius being
nonnegative) are evaluated on bounded intervals and labelled accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
import warnings
from typing import Callable

import numpy as np
from scipy import integrate

from . import expr as ex
from . import kernels

__all__ = [
    "RadialModel", "NotIntegrable", "SignViolation", "NonSPD", "critical_curve",
    "divergence_condition_report", "lambda1_radial", "radial_function", "sphere_area",
]


class NotIntegrable(ValueError):
    pass


class SignViolation(ValueError):
    pass


class NonSPD(ValueError):
    pass


def radial_function(f: Callable | ex.Expr | str | float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised callable of one variable ``r`` from a callable, expression, or constant."""
    if callable(f) and not isinstance(f, ex.Expr):
        return lambda r: np.asarray(f(r), dtype=float)
    if isinstance(f, (int, float)):
        c = float(f)
        return lambda r: np.full(np.shape(r), c)
    e = ex.parse(f, ["r"]) if isinstance(f, str) else f
    fn = ex.compile_exprs([e], 1)

    def ev(r):
        r = np.asarray(r, dtype=float)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ex.NonFiniteWarning)
            flat = [fn((float(x),))[0] for x in r.ravel()]
        return np.array(flat).reshape(r.shape)
    return ev


def sphere_area(n: int) -> float:
    """Area of the unit round sphere of dimension ``n``."""
    return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def _inv(vfun, s):
    with np.errstate(over="ignore", divide="ignore"):
        v = float(vfun(np.array([s]))[0])
    if not v > 0:
        raise SignViolation(f"v must be positive, got {v!r} at r={s:g}")
    return 0.0 if math.isinf(v) else 1.0 / v


def tail_integral(vhat, r: float, epsrel: float = 1e-11) -> float:
    """``int_r^inf ds / vhat(s)``; raises NotIntegrable when the tail does not decay.

    Eight decades are integrated adaptively; the remainder is extrapolated
    from the ratio of the last two decade contributions.
    """
    vfun = radial_function(vhat)
    # decade contributions must shrink geometrically
    edges = [r] + [max(r, 1.0) * 10.0 ** k for k in range(1, 9)]
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(lambda s: _inv(vfun, s), a, b, epsabs=0.0, epsrel=epsrel, limit=400)
        pieces.append(val)
    tail_ratio = [pieces[k + 1] / pieces[k] for k in range(len(pieces) - 4, len(pieces) - 1) if pieces[k] > 0]
    if tail_ratio and max(tail_ratio) > 0.999 and pieces[-1] > 1e-12 * sum(pieces):
        raise NotIntegrable(f"1/v does not decay fast enough (decade ratios {[round(x, 3) for x in tail_ratio]})")
    # beyond the last decade, extrapolate geometrically (exact for power laws)
    rho = pieces[-1] / pieces[-2] if pieces[-2] > 0 else 0.0
    rest = pieces[-1] * rho / (1.0 - rho)
    return float(sum(pieces) + rest)


def critical_curve(vhat, r: float) -> float:
    """``chi(r) = (2 vhat(r) int_r^inf ds/vhat(s))^-2``."""
    vfun = radial_function(vhat)
    v = float(vfun(np.array([r]))[0])
    if not v > 0:
        raise SignViolation(f"vhat must be positive, got {v!r} at r={r:g}")
    return (2.0 * v * tail_integral(vhat, r)) ** -2


@dataclass
class DivergenceConditionReport:
    radii: np.ndarray
    trajectory: np.ndarray
    last_decade_increment: float
    previous_decade_increment: float
    slope: float
    verdict: str
    note: str = "finite-horizon numeric diagnostic, not a proof"

    def as_dict(self) -> dict:
        return {
            "horizon": float(self.radii[-1]),
            "final_value": float(self.trajectory[-1]),
            "last_decade_increment": self.last_decade_increment,
            "previous_decade_increment": self.previous_decade_increment,
            "slope_per_log_r": self.slope,
            "verdict": self.verdict,
            "note": self.note,
        }


def divergence_condition_report(qbar, vhat, R: float, r_max: float, n: int = 400, tol: float = 1e-6,
                                chi: Callable | None = None) -> DivergenceConditionReport:
    """Trajectory of ``J(r) = int_R^r (sqrt|qbar| - sqrt(chi)) ds`` on ``[R, r_max]``.

    Verdicts: ``diverging`` when the last decade adds at least ``tol`` and no
    less than 90% of the previous decade (linear and logarithmic growth both
    qualify), ``bounded`` when the last decade changes J by at most ``tol``
    or J decreases, ``inconclusive at horizon`` otherwise.
    """
    if not r_max > 10 * R > 0:
        raise ValueError("need r_max > 10 R > 0 to compare decades")
    qfun = radial_function(qbar)
    radii = np.geomspace(R, r_max, n)
    q = qfun(radii)
    if np.any(q > 1e-14):
        k = int(np.argmax(q > 1e-14))
        raise SignViolation(f"qbar must be <= 0; qbar({radii[k]:g}) = {q[k]:g}")
    if chi is None:
        chi_vals = np.array([critical_curve(vhat, r) for r in radii])
    else:
        chi_vals = np.asarray(radial_function(chi)(radii))
    integrand = np.sqrt(np.abs(q)) - np.sqrt(chi_vals)
    J = np.concatenate([[0.0], integrate.cumulative_trapezoid(integrand, radii)])

    def at(r):
        return float(np.interp(r, radii, J))
    last = J[-1] - at(r_max / 10)
    prev = at(r_max / 10) - at(r_max / 100) if r_max / 100 >= R else last
    slope = last / math.log(10.0)
    if last >= tol and last >= 0.9 * prev:
        verdict = "diverging"
    elif last <= tol:
        verdict = "bounded"
    else:
        verdict = "inconclusive at horizon"
    return DivergenceConditionReport(radii, J, float(last), float(prev), float(slope), verdict)


@dataclass
class RadialModel:
    """``-(1/v)(v u')' + qbar u`` on ``(0, R)`` with Dirichlet condition at R.

    ``v`` is the boundary-area function, e.g. ``omega_{m-1} w(r)^{m-1}``
    for a warped product.
    """
    m: int
    v: Callable | ex.Expr | str
    qbar: Callable | ex.Expr | str | float = 0.0

    @classmethod
    def flat(cls, m: int, qbar=0.0) -> "RadialModel":
        om = sphere_area(m - 1)
        return cls(m, lambda r: om * np.asarray(r, dtype=float) ** (m - 1), qbar)

    @classmethod
    def warped(cls, m: int, w, qbar=0.0) -> "RadialModel":
        wf = radial_function(w)
        om = sphere_area(m - 1)
        return cls(m, lambda r: om * wf(r) ** (m - 1), qbar)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


def _cell_integral(fun, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = np.asarray(fun(pts.ravel())).reshape(pts.shape)
    return half * (vals @ _GL_W)


def radial_operator(model: RadialModel, R: float, n_grid: int):
    """Symmetric tridiagonal ``(d, e)`` of the finite-volume discretisation.

    Nodes ``r_i = i h`` for ``i = 0..n-1`` with ``h = R/n``; ``u(R) = 0``.
    Cell ``i`` is ``[r_i - h/2, r_i + h/2]`` clipped at 0; fluxes use v at
    the cell interfaces.  The generalised problem ``K u = lam M u`` is
    symmetrised with ``M^{-1/2}``.
    """
    if n_grid < 100:
        raise ValueError("n_grid must be at least 100")
    n = int(n_grid)
    h = R / n
    vfun = radial_function(model.v)
    qfun = radial_function(model.qbar)
    nodes = h * np.arange(n)
    a = np.maximum(nodes - h / 2, 0.0)
    b = nodes + h / 2
    mass = _cell_integral(vfun, a, b)
    qmass = _cell_integral(lambda r: vfun(r) * qfun(r), a, b)
    flux = vfun(b) / h                           # interface i + 1/2, i = 0..n-1
    if np.any(~np.isfinite(mass)) or np.any(mass <= 0) or np.any(flux <= 0):
        raise NonSPD("discretisation lost positivity (v must be positive on (0, R])")
    diag = np.empty(n)
    diag[0] = flux[0]
    diag[1:] = flux[1:] + flux[:-1]
    d = (diag + qmass) / mass
    e = -flux[:-1] / np.sqrt(mass[:-1] * mass[1:])
    return d, e


def lambda1_radial(model: RadialModel, R: float, n_grid: int = 2000, backend: str | None = None) -> float:
    """Smallest Dirichlet eigenvalue of the radial operator on the ball of radius R."""
    d, e = radial_operator(model, R, n_grid)
    solver = kernels.tridiag_min_eig if backend is None else kernels.backend(backend).tridiag_min_eig
    return float(solver(d, e))
