"""Geometry of regular level sets of the potential function."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .einstein_type import (EinsteinTypeStructure, StructurePoint, AlphaZero, BetaZero,
                            DEFAULT_GATE, _is_zero, _scale)
from .tensorfield import full_norm2

__all__ = [
    "AdaptedFrame", "CriticalPoint", "adapted_frame_at", "second_fundamental_form_at",
    "d2_levelset_identity_residual_at", "level_points", "levelset_property_report", "EPS_REG",
]

EPS_REG = 1e-8


class CriticalPoint(ValueError):
    pass


@dataclass
class AdaptedFrame:
    """Columns of ``E`` are the frame vectors ``e_1..e_m`` in coordinates."""
    E: np.ndarray
    grad_norm: float

    @property
    def normal(self) -> np.ndarray:
        return self.E[:, -1]

    @property
    def tangent(self) -> np.ndarray:
        return self.E[:, :-1]

    def components(self, t: np.ndarray) -> np.ndarray:
        """Frame components of a covariant tensor."""
        out = t
        for slot in range(t.ndim):
            out = np.moveaxis(np.tensordot(self.E, out, axes=([0], [slot])), 0, slot)
        return out


def _sp(s, p) -> StructurePoint:
    return p if isinstance(p, StructurePoint) else s.at(p)


def adapted_frame_at(s: EinsteinTypeStructure, p, seed: int = 0, eps_reg: float = EPS_REG) -> AdaptedFrame:
    """Orthonormal frame with ``e_m = grad f / |grad f|``.

    The tangent legs come from Gram-Schmidt on the coordinate basis in a
    seeded order, dropping the vector most aligned with the normal.
    """
    sp = _sp(s, p)
    g = sp.b.g
    gn = sp.grad_norm
    if gn < eps_reg:
        raise CriticalPoint(f"|grad f| = {gn:.3g} below {eps_reg:g} at {sp.p.tolist()}")
    m = g.shape[0]
    n = sp.grad / gn
    order = np.random.default_rng(seed).permutation(m)
    # drop the coordinate direction whose normal component is largest
    weights = np.abs(sp.df[order]) / np.sqrt(np.diag(g)[order])
    drop = int(np.argmax(weights))
    basis = [n]
    for idx, k in enumerate(order):
        if idx == drop:
            continue
        v = np.zeros(m)
        v[k] = 1.0
        for _ in range(2):  # re-orthogonalise once for stability
            for u in basis:
                v = v - (u @ g @ v) * u
        v = v / np.sqrt(v @ g @ v)
        basis.append(v)
    E = np.column_stack(basis[1:] + [n])
    return AdaptedFrame(E, gn)


def second_fundamental_form_at(s: EinsteinTypeStructure, p, route: str = "hessian",
                               frame: AdaptedFrame | None = None):
    """``(h_ab, h)`` on the level set through ``p``.

    ``route="hessian"`` uses ``h_ab = -Hess f(e_a, e_b)/|grad f|``;
    ``route="structure"`` uses ``(alpha Ric_ab - (rho S + lambda) delta_ab)/(beta |grad f|)``.
    The mean curvature is ``h = h_aa/(m-1)``.
    """
    sp = _sp(s, p)
    fr = frame or adapted_frame_at(s, sp)
    T = fr.tangent
    if route == "hessian":
        hab = -(T.T @ sp.hess @ T) / fr.grad_norm
    elif route == "structure":
        if _is_zero(s.beta):
            raise BetaZero("the structure route needs beta != 0")
        m = s.m
        hab = (s.a * (T.T @ sp.b.ric @ T) - (s.r * sp.b.S + sp.lam) * np.eye(m - 1)) / (s.b * fr.grad_norm)
    else:
        raise ValueError(f"unknown route {route!r}")
    hab = 0.5 * (hab + hab.T)
    return hab, float(np.trace(hab)) / (s.m - 1)


def traceless_norm2(hab: np.ndarray, h: float) -> float:
    phi = hab - h * np.eye(hab.shape[0])
    return float(np.sum(phi * phi))


def d2_levelset_identity_parts(s: EinsteinTypeStructure, p, route: str = "hessian", frame=None):
    """``(|D|^2, rhs)`` of the identity relating |D|^2 to the traceless second
    fundamental form and the mixed Ricci components ``R_am``."""
    if _is_zero(s.alpha):
        raise AlphaZero("needs alpha != 0")
    if _is_zero(s.beta):
        raise BetaZero("needs beta != 0")
    sp = _sp(s, p)
    fr = frame or adapted_frame_at(s, sp)
    m = s.m
    hab, h = second_fundamental_form_at(s, sp, route, fr)
    ric_f = fr.components(sp.b.ric)
    ram = ric_f[:-1, -1]
    g2 = sp.grad_norm2
    rhs = ((s.b / s.a) ** 2 * 2 * g2 * g2 / (m - 2) ** 2 * traceless_norm2(hab, h)
           + 2 * g2 / ((m - 1) * (m - 2)) * float(ram @ ram))
    d2 = full_norm2(sp.d_tensor(1), sp.b.G)
    return d2, rhs


def d2_levelset_identity_residual_at(s, p, route: str = "hessian") -> tuple[float, float]:
    d2, rhs = d2_levelset_identity_parts(s, p, route)
    return abs(d2 - rhs), _scale(d2, rhs)


def level_points(s: EinsteinTypeStructure, n: int = 32, seed: int = 0, level: float | None = None,
                 xtol: float = 1e-13) -> tuple[float, np.ndarray]:
    """Points on a common level ``f = c`` found by 1D root-finding along
    coordinate lines through seeded samples.  ``c`` defaults to f at the
    first sample."""
    chart = s.chart
    fjet = s.f_jet()
    fval = lambda q: fjet(q)[0]
    seeds = chart.sample_points(max(4 * n, 64), seed=seed)
    c = fval(seeds[0]) if level is None else float(level)
    lo = chart.domain[:, 0] + chart.margin * chart.width
    hi = chart.domain[:, 1] - chart.margin * chart.width
    found = []
    for q in seeds:
        if len(found) >= n:
            break
        for k in range(chart.dim):
            def phi(t, q=q, k=k):
                x = q.copy()
                x[k] = t
                return fval(x) - c
            a, b = lo[k], hi[k]
            grid = np.linspace(a, b, 9)
            vals = [phi(t) for t in grid]
            hit = None
            for t0, t1, v0, v1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
                if v0 == 0.0:
                    hit = t0
                    break
                if v0 * v1 < 0:
                    hit = brentq(phi, t0, t1, xtol=xtol, rtol=4 * np.finfo(float).eps)
                    break
            if hit is not None:
                x = q.copy()
                x[k] = hit
                if abs(fval(x) - c) <= 1e-10 * max(1.0, abs(c)):
                    found.append(x)
                break
    return c, np.array(found)


def levelset_property_report(s: EinsteinTypeStructure, points=None, n: int = 32, seed: int = 0,
                             gate: float = DEFAULT_GATE) -> dict:
    """Deviation of each level-set property over a common level.

    Returns a dict ``property -> {"value", "status", "gate"}`` where status is
    ``measured`` or ``assumed-inapplicable`` (gate failed or the class does
    not carry the property).  Constancy is measured as max minus min.
    """
    if points is None:
        _, points = level_points(s, n, seed)
    pts = [s.at(p) for p in points]
    if not pts:
        return {}
    m = s.m
    frames = [adapted_frame_at(s, sp) for sp in pts]
    d_max = max(float(np.abs(sp.d_tensor(1)).max()) for sp in pts)
    struct_ok = all(sp.structure_error() <= gate for sp in pts)
    alpha0 = _is_zero(s.alpha)
    beta0 = _is_zero(s.beta)
    d_gate = d_max <= gate and struct_ok and not alpha0 and not beta0
    warped_gate = alpha0 and not beta0 and struct_ok

    def spread(vals):
        vals = np.asarray(vals, dtype=float)
        return float(vals.max() - vals.min())

    out = {}

    def put(name, value, applicable, gate_name):
        out[name] = {"value": float(value), "status": "measured" if applicable else "assumed-inapplicable",
                     "gate": gate_name}

    shape_gate = d_gate or warped_gate
    shape_gate_name = "alpha=0 structure" if alpha0 else f"D=0 (max |D| = {d_max:.3g})"
    put("grad_norm_spread", spread([sp.grad_norm2 for sp in pts]), shape_gate, shape_gate_name)
    umb = []
    means = []
    for sp, fr in zip(pts, frames):
        hab, h = second_fundamental_form_at(s, sp, "hessian", fr)
        umb.append(np.sqrt(traceless_norm2(hab, h)))
        means.append(h)
    put("umbilicity", max(umb), shape_gate, shape_gate_name)
    put("mean_curvature_spread", spread(means), shape_gate, shape_gate_name)
    gname = f"D=0 (max |D| = {d_max:.3g})"
    ram = max(float(np.abs(fr.components(sp.b.ric)[:-1, -1]).max()) for sp, fr in zip(pts, frames))
    put("mixed_ricci", ram, d_gate, gname)
    put("scalar_spread", spread([sp.b.S for sp in pts]), d_gate, gname)
    put("lambda_spread", spread([sp.lam for sp in pts]), d_gate, gname)
    form = 0.0
    for sp, fr in zip(pts, frames):
        rf = fr.components(sp.b.ric)
        Lam1 = rf[-1, -1]
        form = max(form, float(np.abs(rf[:-1, :-1] - (sp.b.S - Lam1) / (m - 1) * np.eye(m - 1)).max()))
    put("tangential_ricci_form", form, d_gate, gname)
    cw_gate = d_gate and not s.is_degenerate()
    cw_name = gname + ", nondegenerate"
    put("cotton_vanishes", max(float(np.abs(sp.b.C).max()) for sp in pts), cw_gate, cw_name)
    if m == 4:
        put("weyl_vanishes", max(float(np.abs(sp.b.W).max()) for sp in pts), cw_gate, cw_name)
    return out
