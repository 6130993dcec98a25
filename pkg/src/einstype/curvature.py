"""Curvature of a chart at a point.

Conventions (all indices in the coordinate basis, derivative indices last):

* ``R^r_{smn} = d_m Gamma^r_{ns} - d_n Gamma^r_{ms} + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}``
  and ``R_{ijkl} = g_{ir} R^r_{jkl}``, so the unit sphere has
  ``R_ijkl = g_ik g_jl - g_il g_jk``;
* ``Ric_ij = g^{kl} R_{ikjl}``, ``S = g^{ij} Ric_ij``;
* ``A = Ric - S/(2(m-1)) g`` (Schouten), ``E = Ric - S/2 g`` (Einstein);
* ``R = W + A (KN) g / (m-2)`` with the Kulkarni-Nomizu product below;
* ``C_ijk = nabla_k A_ij - nabla_j A_ik`` (Cotton);
* ``B_ij = (g^{kl} nabla_l C_jik + Ric^{kt} W_ikjt) / (m-2)`` (Bach).

Covariant derivatives of the Cotton and Weyl fields are taken by finite
differences of analytic fields, so only one level of differencing is ever
nested.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
import threading

import numpy as np

from . import kernels
from .chart import Chart
from .tensorfield import (NumericField, covariant_from_partials, fd_gradient)

__all__ = [
    "CurvatureBundle", "DimensionError", "bundle_at", "christoffel_at", "riemann_at",
    "ricci_at", "scalar_at", "schouten_at", "einstein_at", "weyl_at", "cotton_at",
    "cotton_from_weyl_div_at", "bach_at", "kulkarni_nomizu", "clear_cache",
    "ricci_field", "cotton_field", "weyl_field", "nabla_ricci_field", "scalar_gradient_field",
]


class DimensionError(ValueError):
    pass


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """``(h KN k)_ijkl = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il``."""
    return (np.einsum("ik,jl->ijkl", h, k) + np.einsum("jl,ik->ijkl", h, k)
            - np.einsum("il,jk->ijkl", h, k) - np.einsum("jk,il->ijkl", h, k))


@dataclass
class CurvatureBundle:
    point: np.ndarray
    g: np.ndarray
    G: np.ndarray
    dg: np.ndarray
    gam: np.ndarray
    dgam: np.ndarray
    R: np.ndarray
    nablaR: np.ndarray
    ric: np.ndarray = field(init=False)
    S: float = field(init=False)
    A: np.ndarray = field(init=False)
    E: np.ndarray = field(init=False)
    W: np.ndarray = field(init=False)
    nabla_ric: np.ndarray = field(init=False)
    dS: np.ndarray = field(init=False)
    C: np.ndarray = field(init=False)

    def __post_init__(self):
        m = self.g.shape[0]
        G = self.G
        self.ric = np.einsum("kl,ikjl->ij", G, self.R)
        self.ric = 0.5 * (self.ric + self.ric.T)
        self.S = float(np.einsum("ij,ij->", G, self.ric))
        self.A = self.ric - self.S / (2 * (m - 1)) * self.g
        self.E = self.ric - 0.5 * self.S * self.g
        if m == 3:
            self.W = np.zeros_like(self.R)
        else:
            self.W = self.R - kulkarni_nomizu(self.A, self.g) / (m - 2)
        self.nabla_ric = np.einsum("kl,ikjla->ija", G, self.nablaR)
        self.dS = np.einsum("ij,ija->a", G, self.nabla_ric)
        nabla_A = self.nabla_ric - np.einsum("ij,a->ija", self.g, self.dS) / (2 * (m - 1))
        self.C = nabla_A - nabla_A.transpose(0, 2, 1)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def raise_all(self, t: np.ndarray) -> np.ndarray:
        out = t
        for slot in range(t.ndim):
            out = np.moveaxis(np.tensordot(self.G, out, axes=([1], [slot])), 0, slot)
        return out


_CACHE_SIZE = 8192
_cache: "OrderedDict[tuple, CurvatureBundle]" = OrderedDict()
_cache_lock = threading.Lock()


def clear_cache():
    with _cache_lock:
        _cache.clear()


def bundle_at(chart: Chart, p) -> CurvatureBundle:
    """Curvature bundle at ``p``; memoised so finite-difference stencils are shared."""
    p = chart.check_point(p)
    key = (id(chart), tuple(p.tolist()))
    with _cache_lock:
        hit = _cache.get(key)
        if hit is not None and hit[0] is chart:
            _cache.move_to_end(key)
            return hit[1]
    g, dg, d2g, d3g = chart.metric_jet_at(p, 3)
    G = chart.invert(g, p)
    gam, dgam, R, nablaR = kernels.curvature_jet(g, G, dg, d2g, d3g)
    b = CurvatureBundle(p, g, G, dg, gam, dgam, R, nablaR)
    with _cache_lock:
        _cache[key] = (chart, b)
        if len(_cache) > _CACHE_SIZE:
            _cache.popitem(last=False)
    return b


def christoffel_at(chart: Chart, p) -> np.ndarray:
    """``Gamma^k_ij`` as ``gam[k, i, j]``."""
    p = chart.check_point(p)
    g, dg = chart.metric_jet_at(p, 1)
    G = chart.invert(g, p)
    low = 0.5 * (np.einsum("sji->sij", dg) + dg - np.einsum("ijs->sij", dg))
    return np.einsum("ks,sij->kij", G, low)


def riemann_at(chart, p):
    return bundle_at(chart, p).R


def ricci_at(chart, p):
    return bundle_at(chart, p).ric


def scalar_at(chart, p) -> float:
    return bundle_at(chart, p).S


def schouten_at(chart, p):
    return bundle_at(chart, p).A


def einstein_at(chart, p):
    return bundle_at(chart, p).E


def weyl_at(chart, p):
    return bundle_at(chart, p).W


def cotton_at(chart, p):
    return bundle_at(chart, p).C


def _field(chart, variance, attr, name):
    return NumericField(chart, variance, lambda q: getattr(bundle_at(chart, q), attr), name)


def ricci_field(chart):
    return _field(chart, "dd", "ric", "ricci")


def nabla_ricci_field(chart):
    return _field(chart, "ddd", "nabla_ric", "nabla_ricci")


def scalar_gradient_field(chart):
    return _field(chart, "d", "dS", "dS")


def cotton_field(chart):
    return _field(chart, "ddd", "C", "cotton")


def weyl_field(chart):
    return _field(chart, "dddd", "W", "weyl")


def fd_covariant(F: NumericField, p, h=None, richardson=False) -> np.ndarray:
    """Covariant derivative of a field using bundle Christoffels at ``p``."""
    b = bundle_at(F.chart, p)
    return covariant_from_partials(F(p), fd_gradient(F, p, h, richardson), b.gam)


def cotton_from_weyl_div_at(chart: Chart, p, h=None) -> np.ndarray:
    """Cotton tensor as ``(m-2)/(m-3) g^{tl} nabla_l W_tikj`` (m >= 4)."""
    m = chart.dim
    if m < 4:
        raise DimensionError("the Weyl-divergence form of the Cotton tensor needs m >= 4")
    b = bundle_at(chart, p)
    nW = fd_covariant(weyl_field(chart), p, h)
    return (m - 2) / (m - 3) * np.einsum("tl,tikjl->ijk", b.G, nW)


def cotton_divergence_at(chart: Chart, p, h=None, richardson=True) -> np.ndarray:
    """``div C_ij = g^{kl} nabla_l C_ijk`` by finite differences."""
    b = bundle_at(chart, p)
    nC = fd_covariant(cotton_field(chart), p, h, richardson)
    return np.einsum("kl,ijkl->ij", b.G, nC)


def bach_at(chart: Chart, p, h=None) -> np.ndarray:
    b = bundle_at(chart, p)
    m = chart.dim
    div_c = cotton_divergence_at(chart, p, h)          # div_c[i, j] = C_ijk,k
    ric_up = b.raise_all(b.ric)
    return (div_c.T + np.einsum("kt,ikjt->ij", ric_up, b.W)) / (m - 2)
