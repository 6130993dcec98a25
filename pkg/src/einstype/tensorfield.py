"""Pointwise tensors, numeric tensor fields and finite-difference derivatives.

All components live in the coordinate basis.  Variance tags are strings with
one character per slot: ``"d"`` for a lower (covariant) index and ``"u"`` for
an upper one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chart import Chart, DomainError

__all__ = [
    "PointTensor", "NumericField", "SlotMismatch", "StencilOutOfDomain",
    "contract", "raise_index", "lower_index", "norm2", "full_norm2",
    "fd_partial", "fd_gradient", "covariant_derivative", "covariant_from_partials",
]


class SlotMismatch(ValueError):
    pass


class StencilOutOfDomain(DomainError):
    pass


@dataclass(frozen=True)
class PointTensor:
    components: np.ndarray
    variance: str

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", c)
        if c.ndim != len(self.variance) or set(self.variance) - {"u", "d"}:
            raise ValueError(f"variance {self.variance!r} does not fit shape {c.shape}")

    @property
    def valence(self) -> tuple[int, int]:
        return self.variance.count("u"), self.variance.count("d")

    @property
    def rank(self) -> int:
        return len(self.variance)

    def __array__(self, dtype=None, copy=None):
        return self.components if dtype is None else self.components.astype(dtype)


def _move(t: np.ndarray, mat: np.ndarray, slot: int) -> np.ndarray:
    out = np.tensordot(mat, t, axes=([1], [slot]))
    return np.moveaxis(out, 0, slot)


def raise_index(t: PointTensor, slot: int, G: np.ndarray) -> PointTensor:
    if t.variance[slot] != "d":
        raise SlotMismatch(f"slot {slot} is already upper")
    v = t.variance[:slot] + "u" + t.variance[slot + 1:]
    return PointTensor(_move(t.components, G, slot), v)


def lower_index(t: PointTensor, slot: int, g: np.ndarray) -> PointTensor:
    if t.variance[slot] != "u":
        raise SlotMismatch(f"slot {slot} is already lower")
    v = t.variance[:slot] + "d" + t.variance[slot + 1:]
    return PointTensor(_move(t.components, g, slot), v)


def contract(t: PointTensor, i: int, j: int, g: np.ndarray | None = None,
             G: np.ndarray | None = None) -> PointTensor:
    """Trace over slots ``i`` and ``j``.

    Mixed slots are traced directly.  Two lower slots need the inverse metric
    ``G``; two upper slots need the metric ``g``.
    """
    if i == j:
        raise SlotMismatch("cannot contract a slot with itself")
    vi, vj = t.variance[i], t.variance[j]
    c = t.components
    if vi == vj:
        mat = G if vi == "d" else g
        if mat is None:
            raise SlotMismatch(f"slots {i} and {j} are both {'lower' if vi == 'd' else 'upper'}; metric required")
        c = _move(c, mat, i)
    out = np.trace(c, axis1=i, axis2=j)
    v = "".join(ch for n, ch in enumerate(t.variance) if n not in (i, j))
    return PointTensor(np.asarray(out), v)


def full_norm2(c: np.ndarray, G: np.ndarray) -> float:
    """Squared norm of a fully covariant component array."""
    raised = c
    for slot in range(c.ndim):
        raised = _move(raised, G, slot)
    return float(np.sum(raised * c))


def norm2(t: PointTensor, g: np.ndarray, G: np.ndarray | None = None) -> float:
    if G is None:
        G = np.linalg.inv(g)
    c = t.components
    other = c
    for slot, v in enumerate(t.variance):
        other = _move(other, G if v == "d" else g, slot)
    return float(np.sum(other * c))


class NumericField:
    """A tensor field given by a Python evaluator on a chart.

    ``evaluator(p)`` returns the component array at ``p``; ``variance``
    tags its slots.
    """

    def __init__(self, chart: Chart, variance: str, evaluator: Callable[[np.ndarray], np.ndarray], name: str = ""):
        self.chart = chart
        self.variance = variance
        self.evaluator = evaluator
        self.name = name

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(p, dtype=float)), dtype=float)

    def at(self, p) -> PointTensor:
        return PointTensor(self(p), self.variance)


def default_step(chart: Chart, k: int) -> float:
    return 1e-2 * float(chart.width[k])


def _stencil(F: NumericField, p, k: int, h: float):
    chart = F.chart
    lo, hi = chart.domain[k]
    if p[k] - 2 * h < lo or p[k] + 2 * h > hi:
        raise StencilOutOfDomain(
            f"stencil of half-width {2 * h:g} around coordinate {chart.coords[k]}={p[k]:g} leaves [{lo:g}, {hi:g}]")
    vals = []
    for s in (-2, -1, 1, 2):
        q = np.array(p, dtype=float)
        q[k] = p[k] + s * h
        vals.append(F(q))
    fm2, fm1, fp1, fp2 = vals
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)


def fd_partial(F: NumericField, p, k: int, h: float | None = None, richardson: bool = False) -> np.ndarray:
    """Fourth-order central difference of ``F`` along coordinate ``k``.

    With ``richardson=True`` the h and h/2 estimates are combined to cancel
    the leading O(h^4) term.
    """
    p = np.asarray(p, dtype=float)
    h = default_step(F.chart, k) if h is None else float(h)
    d1 = _stencil(F, p, k, h)
    if not richardson:
        return d1
    d2 = _stencil(F, p, k, h / 2)
    return (16.0 * d2 - d1) / 15.0


def fd_gradient(F: NumericField, p, h: float | None = None, richardson: bool = False) -> np.ndarray:
    """All coordinate partials; the derivative index is appended last."""
    parts = [fd_partial(F, p, k, h, richardson) for k in range(F.chart.dim)]
    return np.stack(parts, axis=-1)


def covariant_from_partials(T: np.ndarray, dT: np.ndarray, gam: np.ndarray) -> np.ndarray:
    """``nabla_a T_{i1..ik}`` from the partials ``dT[..., a]`` and Christoffels.

    ``gam[s, a, i] = Gamma^s_ai``.  Only covariant slots are supported.
    """
    out = np.array(dT, dtype=float)
    k = T.ndim
    for slot in range(k):
        # term[..., a] = Gamma^s_{a i_slot} T_{.. s ..}
        moved = np.moveaxis(T, slot, 0)               # s first
        term = np.tensordot(gam, moved, axes=([0], [0]))  # (a, i_slot, rest...)
        term = np.moveaxis(term, 0, -1)              # (i_slot, rest..., a)
        term = np.moveaxis(term, 0, slot)            # restore slot position
        out -= term
    return out


def covariant_derivative(F: NumericField, p, christoffel: Callable[[np.ndarray], np.ndarray] | None = None,
                         h: float | None = None, richardson: bool = False) -> np.ndarray:
    """Covariant derivative of a covariant field, derivative index last."""
    if "u" in F.variance:
        raise SlotMismatch("covariant_derivative expects a fully covariant field")
    p = np.asarray(p, dtype=float)
    if christoffel is None:
        from .curvature import christoffel_at

        def christoffel(q):
            return christoffel_at(F.chart, q)
    return covariant_from_partials(F(p), fd_gradient(F, p, h, richardson), christoffel(p))
