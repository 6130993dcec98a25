"""Gradient Einstein-type structures and their pointwise identities.

A structure is ``alpha Ric + beta Hess f + mu df(x)df = (rho S + lambda) g``
on a chart.  Orthonormal-frame formulas are evaluated in coordinates with
``delta_ij -> g_ij`` and every repeated index contracted through ``g^{-1}``;
e.g. ``f_t R_tk`` becomes ``g^{ts} f_s R_tk``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math
from typing import Mapping

import numpy as np

from . import expr as ex
from .chart import Chart
from .curvature import (CurvatureBundle, bundle_at, cotton_divergence_at, fd_covariant)
from .tensorfield import NumericField, full_norm2

__all__ = [
    "EinsteinTypeStructure", "StructurePoint", "InvalidParameters", "AlphaZero", "BetaZero",
    "WrongClass", "NotDegenerate", "ClassMismatch", "PRESETS", "preset", "as_constant",
    "classify", "residual_at", "traced_residual_at", "d_tensor_at", "integrability1_residual_at",
    "integrability2_residual_at", "sk_identity_residual_at", "beta_zero_identities_at",
    "y_field_at", "d_norm_identity_residual_at", "div_y_identity_residual_at",
    "conformal_einstein_residual_at", "structure_gate", "DEGENERACY_EPS",
]

DEGENERACY_EPS = 1e-12
DEFAULT_GATE = 1e-6


class InvalidParameters(ValueError):
    pass


class AlphaZero(ValueError):
    pass


class BetaZero(ValueError):
    pass


class WrongClass(ValueError):
    pass


class NotDegenerate(WrongClass):
    pass


class ClassMismatch(WrongClass):
    pass


def as_constant(v) -> Fraction | float:
    """Exact rational when the input allows it ("1/3", 2, Fraction), else float."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("boolean is not a constant")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        s = v.strip()
        try:
            return Fraction(s)
        except ValueError:
            return float(ex.evaluate(ex.parse(s)))
    return float(v)


def _is_zero(v) -> bool:
    return v == 0 if isinstance(v, Fraction) else abs(v) <= DEGENERACY_EPS


@dataclass
class EinsteinTypeStructure:
    chart: Chart
    alpha: Fraction | float
    beta: Fraction | float
    mu: Fraction | float
    rho: Fraction | float
    lam: ex.Expr
    f: ex.Expr
    name: str = ""
    preset: str | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for k in ("alpha", "beta", "mu", "rho"):
            setattr(self, k, as_constant(getattr(self, k)))
        if isinstance(self.lam, str):
            self.lam = self.chart.parse(self.lam)
        if isinstance(self.f, str):
            self.f = self.chart.parse(self.f)
        self.lam = ex.as_expr(self.lam)
        self.f = ex.as_expr(self.f)
        if _is_zero(self.alpha) and _is_zero(self.beta) and _is_zero(self.mu):
            raise InvalidParameters("(alpha, beta, mu) must not all vanish")

    @property
    def m(self) -> int:
        return self.chart.dim

    @property
    def a(self) -> float:
        return float(self.alpha)

    @property
    def b(self) -> float:
        return float(self.beta)

    @property
    def u(self) -> float:
        return float(self.mu)

    @property
    def r(self) -> float:
        return float(self.rho)

    def degeneracy_gap(self):
        """``beta^2 - (m-2) alpha mu``, exact when the constants are rational."""
        return self.beta * self.beta - (self.m - 2) * self.alpha * self.mu

    def is_degenerate(self) -> bool:
        return not _is_zero(self.beta) and _is_zero(self.degeneracy_gap())

    def bracket(self) -> float:
        """``beta - (m-2) alpha mu / beta``."""
        if _is_zero(self.beta):
            raise BetaZero("the nondegeneracy bracket needs beta != 0")
        return float(self.beta - (self.m - 2) * self.alpha * self.mu / self.beta)

    def f_jet(self):
        jet = self._cache.get("f_jet")
        if jet is None:
            jet = self._cache["f_jet"] = self.chart.scalar_jet(self.f, 3)
        return jet

    def lam_jet(self):
        jet = self._cache.get("lam_jet")
        if jet is None:
            jet = self._cache["lam_jet"] = self.chart.scalar_jet(self.lam, 1)
        return jet

    def at(self, p) -> "StructurePoint":
        return StructurePoint(self, np.asarray(p, dtype=float))


def classify(s: EinsteinTypeStructure) -> str:
    """One of ``alpha_zero``, ``beta_zero``, ``degenerate``, ``nondegenerate``.

    ``alpha_zero`` takes precedence (then beta != 0 necessarily unless mu
    alone is nonzero, which is still reported as alpha_zero).  Whether f is
    trivial is a separate, pointwise question; see ``StructurePoint.grad_norm``.
    """
    if _is_zero(s.alpha) and _is_zero(s.beta) and _is_zero(s.mu):
        raise InvalidParameters("(alpha, beta, mu) must not all vanish")
    if _is_zero(s.alpha):
        return "alpha_zero"
    if _is_zero(s.beta):
        return "beta_zero"
    if s.is_degenerate():
        return "degenerate"
    return "nondegenerate"


# ---------------------------------------------------------------------------
# presets: (alpha, beta, mu, rho) as functions of m and an optional parameter

def _preset_table(m: int, k=None):
    kk = Fraction(k) if k is not None else None
    return {
        "einstein": (1, 0, 0, Fraction(1, m)),
        "ricci_soliton": (1, 1, 0, 0),
        "ricci_almost_soliton": (1, 1, 0, 0),
        "yamabe_soliton": (0, 1, 0, 1),
        "yamabe_quasi_soliton": (0, 1, -1 / kk if kk else None, 1),
        "conformal_gradient_soliton": (0, 1, 0, 0),
        "quasi_einstein": (1, 1, -1 / kk if kk else None, 0),
        "rho_einstein": (1, 1, 0, kk),
    }


PRESETS = tuple(_preset_table(3))


def preset(name: str, m: int, k=None) -> tuple:
    """``(alpha, beta, mu, rho)`` for a named special case.

    ``k`` is the parameter of the quasi-soliton/quasi-Einstein families
    (``mu = -1/k``) and of rho-Einstein solitons (``rho = k``).
    """
    table = _preset_table(m, k)
    if name not in table:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    vals = table[name]
    if any(v is None for v in vals):
        raise InvalidParameters(f"preset {name!r} needs its parameter k")
    return tuple(Fraction(v) for v in vals)


# ---------------------------------------------------------------------------
# pointwise data


class StructurePoint:
    """Everything needed at one point: curvature bundle plus jets of f and lambda."""

    def __init__(self, s: EinsteinTypeStructure, p: np.ndarray):
        self.s = s
        self.p = s.chart.check_point(p)
        self.b: CurvatureBundle = bundle_at(s.chart, self.p)
        b = self.b
        fv, df, d2f, d3f = s.f_jet()(self.p)
        self.fval = fv
        self.df = df
        gam, dgam = b.gam, b.dgam
        # f_ij = d_i d_j f - Gamma^s_ij f_s
        hess = d2f - np.einsum("sij,s->ij", gam, df)
        self.hess = hess
        # f_ijk = nabla_k f_ij
        d_hess = d3f - np.einsum("sijk,s->ijk", dgam, df) - np.einsum("sij,sk->ijk", gam, d2f)
        self.f3 = (d_hess - np.einsum("ski,sj->ijk", gam, hess) - np.einsum("skj,is->ijk", gam, hess))
        lv, dl = s.lam_jet()(self.p)
        self.lam = lv
        self.dlam = dl
        G = b.G
        self.grad = G @ df                     # f^i
        self.grad_norm2 = float(df @ self.grad)
        self.lap = float(np.einsum("ij,ij->", G, hess))

    @property
    def grad_norm(self) -> float:
        return math.sqrt(max(self.grad_norm2, 0.0))

    # contractions through the inverse metric
    def f_dot(self, t: np.ndarray) -> np.ndarray:
        """Contract the first slot of ``t`` with f^i."""
        return np.tensordot(self.grad, t, axes=([0], [0]))

    def residual(self) -> np.ndarray:
        s, b = self.s, self.b
        return (s.a * b.ric + s.b * self.hess + s.u * np.outer(self.df, self.df)
                - (s.r * b.S + self.lam) * b.g)

    def residual_scale(self) -> float:
        s, b = self.s, self.b
        parts = [abs(s.a) * np.abs(b.ric).max(), abs(s.b) * np.abs(self.hess).max(),
                 abs(s.u) * np.abs(self.df).max() ** 2, abs(s.r * b.S + self.lam) * np.abs(b.g).max()]
        return max(1.0, *parts)

    def structure_error(self) -> float:
        return float(np.abs(self.residual()).max()) / self.residual_scale()

    def traced_residual(self) -> float:
        s, b = self.s, self.b
        m = s.m
        return ((s.a - m * s.r) * b.S + s.b * self.lap + s.u * self.grad_norm2 - m * self.lam)

    # D tensor -----------------------------------------------------------
    def d_tensor(self, form: int = 1) -> np.ndarray:
        s, b = self.s, self.b
        m = s.m
        g, df = b.g, self.df
        c1 = 1.0 / (m - 2)
        c2 = 1.0 / ((m - 1) * (m - 2))
        if form == 1:
            fR = self.f_dot(b.ric)
            return (c1 * (np.einsum("k,ij->ijk", df, b.ric) - np.einsum("j,ik->ijk", df, b.ric))
                    + c2 * (np.einsum("k,ij->ijk", fR, g) - np.einsum("j,ik->ijk", fR, g))
                    - b.S * c2 * (np.einsum("k,ij->ijk", df, g) - np.einsum("j,ik->ijk", df, g)))
        if form == 2:
            fE = self.f_dot(b.E)
            return (c1 * (np.einsum("k,ij->ijk", df, b.A) - np.einsum("j,ik->ijk", df, b.A))
                    + c2 * (np.einsum("k,ij->ijk", fE, g) - np.einsum("j,ik->ijk", fE, g)))
        if form == 3:
            if _is_zero(s.alpha):
                raise AlphaZero("the Hessian form of D needs alpha != 0")
            H = self.hess
            fH = self.f_dot(H)
            inner = (c1 * (np.einsum("j,ik->ijk", df, H) - np.einsum("k,ij->ijk", df, H))
                     + c2 * (np.einsum("j,ik->ijk", fH, g) - np.einsum("k,ij->ijk", fH, g))
                     - self.lap * c2 * (np.einsum("j,ik->ijk", df, g) - np.einsum("k,ij->ijk", df, g)))
            return s.b / s.a * inner
        raise ValueError(f"D form must be 1, 2 or 3, got {form}")


def _scale(*arrays) -> float:
    return max([1.0] + [float(np.abs(np.asarray(a)).max()) for a in arrays])


def structure_gate(sp: StructurePoint, gate: float = DEFAULT_GATE) -> bool:
    return sp.structure_error() <= gate


def _sp(s, p) -> StructurePoint:
    return p if isinstance(p, StructurePoint) else s.at(p)


def residual_at(s: EinsteinTypeStructure, p) -> np.ndarray:
    return _sp(s, p).residual()


def traced_residual_at(s: EinsteinTypeStructure, p) -> float:
    return _sp(s, p).traced_residual()


def d_tensor_at(s: EinsteinTypeStructure, p, form: int = 1) -> np.ndarray:
    return _sp(s, p).d_tensor(form)


def _require_beta(s):
    if _is_zero(s.beta):
        raise BetaZero("this identity needs beta != 0")


def integrability1_residual_at(s: EinsteinTypeStructure, p) -> tuple[np.ndarray, float]:
    """``alpha C + beta f^t W_t... - [beta - (m-2) alpha mu / beta] D`` and its scale."""
    _require_beta(s)
    sp = _sp(s, p)
    b = sp.b
    lhs = s.a * b.C + s.b * sp.f_dot(b.W)
    rhs = s.bracket() * sp.d_tensor(1)
    return lhs - rhs, _scale(s.a * b.C, s.b * sp.f_dot(b.W), rhs)


def d_field(s: EinsteinTypeStructure) -> NumericField:
    return NumericField(s.chart, "ddd", lambda q: s.at(q).d_tensor(1), "D")


def d_divergence_at(s: EinsteinTypeStructure, p) -> np.ndarray:
    """``D_ijk,k`` by finite differences of the D field."""
    sp = _sp(s, p)
    nD = fd_covariant(d_field(s), sp.p, richardson=True)
    return np.einsum("kl,ijkl->ij", sp.b.G, nD)


def integrability2_residual_at(s: EinsteinTypeStructure, p) -> tuple[np.ndarray, float]:
    _require_beta(s)
    sp = _sp(s, p)
    b, m = sp.b, s.m
    B = bach_from(sp)
    divD = d_divergence_at(s, sp)
    fC = np.einsum("t,jit->ij", sp.grad, b.C)
    ffW = np.einsum("t,k,itjk->ij", sp.grad, sp.grad, b.W)
    t1 = s.bracket() * divD
    t2 = s.b * (m - 3) / (m - 2) * fC
    t3 = -s.u * ffW
    lhs = s.a * B
    rhs = (t1 + t2 + t3) / (m - 2)
    return lhs - rhs, _scale(lhs, t1, t2, t3)


def bach_from(sp: StructurePoint) -> np.ndarray:
    from .curvature import bach_at
    return bach_at(sp.s.chart, sp.p)


def sk_identity_residual_at(s: EinsteinTypeStructure, p) -> tuple[np.ndarray, float]:
    _require_beta(s)
    sp = _sp(s, p)
    b, m = sp.b, s.m
    a, be, u, r = s.a, s.b, s.u, s.r
    fR = sp.f_dot(b.ric)
    lhs = (a - 2 * r * (m - 1)) * b.dS
    terms = [2 * (be + a * u / be) * fR,
             2 * (m - 1) * sp.dlam,
             -(2 * u / be) * (a - r * (m - 1)) * b.S * sp.df,
             (2 * u / be) * (m - 1) * sp.lam * sp.df]
    return lhs - sum(terms), _scale(lhs, *terms)


def y_field_at(s: EinsteinTypeStructure, p) -> np.ndarray:
    sp = _sp(s, p)
    if _is_zero(s.alpha):
        return np.einsum("i,j,ijk->k", sp.grad, sp.grad, sp.b.C)
    return s.b / s.a * np.einsum("i,j,ijk->k", sp.grad, sp.grad, sp.d_tensor(1))


def y_field(s: EinsteinTypeStructure) -> NumericField:
    return NumericField(s.chart, "d", lambda q: y_field_at(s, q), "Y")


def _divergence_1form(F: NumericField, sp: StructurePoint) -> float:
    n = fd_covariant(F, sp.p, richardson=True)
    return float(np.einsum("kl,kl->", sp.b.G, n))


def div_y_at(s, p) -> float:
    return _divergence_1form(y_field(s), _sp(s, p))


def ffc_field(s: EinsteinTypeStructure) -> NumericField:
    def ev(q):
        sp = s.at(q)
        return np.einsum("i,j,ijk->k", sp.grad, sp.grad, sp.b.C)
    return NumericField(s.chart, "d", ev, "ffC")


def d_norm_identity_residual_at(s: EinsteinTypeStructure, p) -> tuple[float, float]:
    """Residual of the |D|^2 identity involving ``f^i f^j B_ij`` and a divergence."""
    sp = _sp(s, p)
    m = s.m
    B = bach_from(sp)
    ffB = float(sp.grad @ B @ sp.grad)
    D = sp.d_tensor(1)
    d2 = full_norm2(D, sp.b.G)
    if _is_zero(s.alpha):
        div = _divergence_1form(ffc_field(s), sp)
        lhs = 0.5 * (m - 2) * d2
        rhs = -(m - 2) * ffB + div
        return lhs - rhs, _scale(lhs, (m - 2) * ffB, div)
    if _is_zero(s.beta):
        raise BetaZero("the |D|^2 identity needs beta != 0 when alpha != 0")
    if s.is_degenerate():
        raise WrongClass("the |D|^2 identity is stated for nondegenerate structures")
    br = s.bracket()
    div = div_y_at(s, sp)           # (beta/alpha) (f f D)_k
    lhs = 0.5 * (m - 2) * br * d2
    rhs = -s.b * (m - 2) * ffB + br * div
    return lhs - rhs, _scale(lhs, s.b * (m - 2) * ffB, br * div)


def bach_gradient_norm(sp: StructurePoint) -> float:
    """Size of ``B(grad f, .)`` relative to |grad f|."""
    B = bach_from(sp)
    v = B @ sp.grad
    return float(np.abs(v).max()) / max(sp.grad_norm, 1e-300)


def div_y_identity_residual_at(s: EinsteinTypeStructure, p) -> tuple[float, float]:
    """``(m-2)/2 |D|^2 - div Y`` (meaningful where ``B(grad f, .) = 0``)."""
    sp = _sp(s, p)
    m = s.m
    d2 = full_norm2(sp.d_tensor(1), sp.b.G)
    div = div_y_at(s, sp)
    lhs = 0.5 * (m - 2) * d2
    return lhs - div, _scale(lhs, div)


def fd_contraction_residual_at(s, p) -> tuple[np.ndarray, float]:
    """``f^i D_ijk - (f^t f_k R_tj - f^t f_j R_tk)/(m-1)``."""
    sp = _sp(s, p)
    m = s.m
    lhs = sp.f_dot(sp.d_tensor(1))
    fR = sp.f_dot(sp.b.ric)
    rhs = (np.outer(fR, sp.df) - np.outer(sp.df, fR)) / (m - 1)
    return lhs - rhs, _scale(lhs, rhs)


def soliton_y_alternative_at(s, p) -> tuple[np.ndarray, float]:
    """Y for Ricci solitons versus ``(g(dS, df) df - |df|^2 dS) / (2(m-1))``."""
    sp = _sp(s, p)
    m = s.m
    Y = y_field_at(s, sp)
    dS = sp.b.dS
    alt = (float(dS @ sp.grad) * sp.df - sp.grad_norm2 * dS) / (2 * (m - 1))
    return Y - alt, _scale(Y, alt)


def beta_zero_identities_at(s: EinsteinTypeStructure, p) -> dict[str, tuple[float, float]]:
    """Pointwise residuals (value, scale) of the beta = 0 identities."""
    if not _is_zero(s.beta):
        raise WrongClass("beta_zero identities need beta = 0")
    if _is_zero(s.alpha):
        raise InvalidParameters("beta = 0 needs alpha != 0")
    sp = _sp(s, p)
    b, m = sp.b, s.m
    a, u = s.a, s.u
    g, df, H = b.g, sp.df, sp.hess
    out = {}
    D = sp.d_tensor(1)
    out["d_vanishes"] = (float(np.abs(D).max()), _scale(np.abs(b.ric).max() * np.abs(df).max()))
    fH = sp.f_dot(H)
    c_rhs = (-u * (np.einsum("j,ik->ijk", df, H) - np.einsum("k,ij->ijk", df, H))
             - u / (m - 1) * (np.einsum("j,ik->ijk", fH, g) - np.einsum("k,ij->ijk", fH, g))
             + u * sp.lap / (m - 1) * (np.einsum("j,ik->ijk", df, g) - np.einsum("k,ij->ijk", df, g)))
    diff = a * b.C - c_rhs
    out["cotton_formula"] = (float(np.abs(diff).max()), _scale(a * b.C, c_rhs))
    B = bach_from(sp)
    divC = cotton_divergence_at(s.chart, sp.p)      # C_ijk,k
    ffW = np.einsum("t,k,itjk->ij", sp.grad, sp.grad, b.W)
    b_rhs = (a * divC - u * ffW) / (m - 2)
    out["bach_formula"] = (float(np.abs(a * B - b_rhs).max()), _scale(a * B, b_rhs))
    if not _is_zero(s.mu):
        c2 = full_norm2(b.C, b.G)
        ffB = float(sp.grad @ B @ sp.grad)
        div = _divergence_1form(ffc_field(s), sp)
        lhs = a / (2 * u) * c2
        rhs = (m - 2) * ffB - div
        out["cotton_norm_identity"] = (abs(lhs - rhs), _scale(lhs, (m - 2) * ffB, div))
    return out


# ---------------------------------------------------------------------------
# degenerate structures and the conformal Einstein metric


def conformal_factor_exponent(s: EinsteinTypeStructure) -> float:
    """``c`` such that ``exp(c f) g`` is Einstein for a degenerate structure."""
    return -2.0 * s.b / ((s.m - 2) * s.a)


def conformal_chart(s: EinsteinTypeStructure) -> Chart:
    if classify(s) != "degenerate":
        raise NotDegenerate(f"structure is {classify(s)}, not degenerate")
    ch = s._cache.get("conformal_chart")
    if ch is None:
        c = conformal_factor_exponent(s)
        factor = ex.exp(ex.const(c) * s.f)
        entries = {k: factor * v for k, v in s.chart.entries.items() if v != ex.ZERO}
        ch = Chart(s.chart.coords, entries, s.chart.domain.tolist(),
                   name=f"{s.chart.name}:conformal", margin=s.chart.margin)
        s._cache["conformal_chart"] = ch
    return ch


def conformal_einstein_residual_at(s: EinsteinTypeStructure, p) -> tuple[np.ndarray, float]:
    """``Ric(g_hat) - (S_hat/m) g_hat`` for the conformally rescaled metric."""
    ch = conformal_chart(s)
    b = bundle_at(ch, np.asarray(p if not isinstance(p, StructurePoint) else p.p, dtype=float))
    res = b.ric - b.S / s.m * b.g
    return res, _scale(b.ric, b.S / s.m * b.g)
