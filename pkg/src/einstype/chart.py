"""Coordinate charts with symbolic metrics.

A chart owns the metric entries as expressions and serves the metric and its
partial derivatives (up to third order) at points of a box-shaped domain.
Derivative arrays keep the metric indices first and derivative indices last,
e.g. ``dg[i, j, k] = d_k g_ij`` and ``d2g[i, j, k, l] = d_l d_k g_ij``.
"""

from __future__ import annotations

import itertools
import threading
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import qmc

from . import expr as ex

__all__ = [
    "Chart", "DomainError", "PointOutsideDomain", "NotPositiveDefinite",
    "ScalarJet", "jet_indices",
]


class DomainError(ex.DomainError):
    pass


class PointOutsideDomain(DomainError):
    pass


class NotPositiveDefinite(DomainError):
    pass


def jet_indices(m: int, order: int) -> list[tuple[int, ...]]:
    """Sorted multi-indices of the given order (one per distinct partial)."""
    return list(itertools.combinations_with_replacement(range(m), order))


def _scatter(values, m, order, lead_shape):
    """Expand values for sorted multi-indices into a fully symmetric array."""
    out = np.empty(lead_shape + (m,) * order)
    for idx, val in zip(jet_indices(m, order), values):
        for perm in set(itertools.permutations(idx)):
            out[(...,) + perm] = val
    return out


class ScalarJet:
    """Compiled value, gradient, Hessian and third partials of one expression."""

    def __init__(self, chart: "Chart", e: ex.Expr, order: int = 3):
        self.chart = chart
        self.expr = e
        self.order = order
        m = chart.dim
        levels = [[e]]
        for k in range(1, order + 1):
            prev = {idx: x for idx, x in zip(jet_indices(m, k - 1), levels[-1])}
            cur = []
            for idx in jet_indices(m, k):
                cur.append(ex.differentiate(prev[idx[:-1]], idx[-1]))
            levels.append(cur)
        self._sizes = [len(lv) for lv in levels]
        self._fn = ex.compile_exprs([x for lv in levels for x in lv], m)

    def __call__(self, p) -> list:
        """Return ``[value, grad, hess, third]`` truncated at ``order``."""
        flat = self._fn(tuple(float(v) for v in p))
        m = self.chart.dim
        out = [flat[0]]
        pos = 1
        for k in range(1, self.order + 1):
            n = self._sizes[k]
            out.append(_scatter(flat[pos:pos + n], m, k, ()))
            pos += n
        return out


class Chart:
    """A coordinate box carrying a Riemannian metric given by expressions.

    ``metric`` maps ``(i, j)`` with ``i <= j`` to an expression or a string in
    the expression grammar; missing entries are zero.  ``domain`` is a list of
    closed intervals, one per coordinate.
    """

    def __init__(
        self,
        coords: Sequence[str],
        metric: Mapping[tuple[int, int], ex.Expr | str | float],
        domain: Sequence[tuple[float, float]],
        name: str = "",
        margin: float = 0.05,
    ):
        self.coords = tuple(coords)
        m = len(self.coords)
        if m < 3:
            raise ValueError(f"charts need dimension >= 3, got {m}")
        if len(set(self.coords)) != m:
            raise ValueError("duplicate coordinate names")
        if len(domain) != m:
            raise ValueError(f"domain has {len(domain)} intervals for {m} coordinates")
        self.dim = m
        self.name = name
        self.margin = float(margin)
        self.domain = np.array([(float(a), float(b)) for a, b in domain])
        if np.any(self.domain[:, 1] <= self.domain[:, 0]):
            raise ValueError("empty domain interval")
        entries = {}
        for (i, j), v in metric.items():
            i, j = min(i, j), max(i, j)
            if not (0 <= i < m and 0 <= j < m):
                raise ValueError(f"metric index ({i}, {j}) out of range")
            if isinstance(v, str):
                v = ex.parse(v, self.coords)
            entries[(i, j)] = ex.simplify(ex.as_expr(v))
        self.entries = {(i, j): entries.get((i, j), ex.ZERO) for i in range(m) for j in range(i, m)}
        self._lock = threading.Lock()
        self._jets: dict[int, object] = {}
        self._partials: dict[int, list] = {}
        self._scalar_jets: dict[tuple, ScalarJet] = {}

    def __repr__(self):
        return f"Chart({self.name or '?'}, coords={self.coords})"

    # identity semantics: charts are used as cache keys
    __hash__ = object.__hash__

    def __eq__(self, other):
        return self is other

    @property
    def width(self) -> np.ndarray:
        return self.domain[:, 1] - self.domain[:, 0]

    def g(self, i: int, j: int) -> ex.Expr:
        return self.entries[(min(i, j), max(i, j))]

    def metric_expr_partials(self, order: int) -> list[list[ex.Expr]]:
        """Symbolic partials for each stored entry: ``out[k][e]`` is the list over
        sorted multi-indices of order ``k`` for entry number ``e``."""
        with self._lock:
            if order in self._partials:
                return self._partials[order]
        keys = list(self.entries)
        if order == 0:
            res = [[self.entries[k]] for k in keys]
        else:
            prev = self.metric_expr_partials(order - 1)
            res = []
            prev_idx = {idx: n for n, idx in enumerate(jet_indices(self.dim, order - 1))}
            for e_num in range(len(keys)):
                row = []
                for idx in jet_indices(self.dim, order):
                    row.append(ex.differentiate(prev[e_num][prev_idx[idx[:-1]]], idx[-1]))
                res.append(row)
        with self._lock:
            return self._partials.setdefault(order, res)

    def _jet(self, order: int):
        with self._lock:
            fn = self._jets.get(order)
        if fn is not None:
            return fn
        flat = []
        for k in range(order + 1):
            for row in self.metric_expr_partials(k):
                flat.extend(row)
        fn = ex.compile_exprs(flat, self.dim)
        with self._lock:
            return self._jets.setdefault(order, fn)

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise ValueError(f"point must have {self.dim} coordinates, got shape {p.shape}")
        lo, hi = self.domain[:, 0], self.domain[:, 1]
        if np.any(p < lo) or np.any(p > hi):
            raise PointOutsideDomain(f"point {p.tolist()} outside domain of chart {self.name!r}")
        return p

    def metric_jet_at(self, p, order: int = 2) -> list[np.ndarray]:
        """``[g, dg, d2g, d3g][:order + 1]`` at ``p``."""
        if not 0 <= order <= 3:
            raise ValueError("order must be 0..3")
        p = self.check_point(p)
        flat = self._jet(order)(tuple(p.tolist()))
        m = self.dim
        n_ent = len(self.entries)
        out = []
        pos = 0
        for k in range(order + 1):
            nk = len(jet_indices(m, k))
            block = np.asarray(flat[pos:pos + n_ent * nk]).reshape(n_ent, nk)
            pos += n_ent * nk
            arr = np.empty((m, m) + (m,) * k)
            sym = _scatter(block.T, m, k, (n_ent,)) if k else block[:, 0]
            for e_num, (i, j) in enumerate(self.entries):
                arr[i, j] = sym[e_num]
                arr[j, i] = sym[e_num]
            out.append(arr)
        return out

    def metric_at(self, p) -> np.ndarray:
        g = self.metric_jet_at(p, 0)[0]
        self._cholesky(g, p)
        return g

    def _cholesky(self, g, p):
        if not np.all(np.isfinite(g)):
            raise NotPositiveDefinite(f"non-finite metric at {np.asarray(p).tolist()}")
        try:
            return np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite(
                f"metric of chart {self.name!r} is not positive definite at {np.asarray(p).tolist()}") from None

    def inverse_metric_at(self, p) -> np.ndarray:
        g = self.metric_jet_at(p, 0)[0]
        return self.invert(g, p)

    def invert(self, g, p=None) -> np.ndarray:
        L = self._cholesky(g, p if p is not None else [])
        Linv = np.linalg.inv(L)
        G = Linv.T @ Linv
        return 0.5 * (G + G.T)

    def metric_partials_at(self, p, order: int) -> np.ndarray:
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        return self.metric_jet_at(p, order)[order]

    def scalar_jet(self, e: ex.Expr | str, order: int = 3) -> ScalarJet:
        if isinstance(e, str):
            e = ex.parse(e, self.coords)
        key = (e, order)
        with self._lock:
            jet = self._scalar_jets.get(key)
        if jet is None:
            jet = ScalarJet(self, e, order)
            with self._lock:
                jet = self._scalar_jets.setdefault(key, jet)
        return jet

    def sample_points(self, n: int = 64, seed: int = 0, margin: float | None = None) -> np.ndarray:
        """Deterministic scrambled Halton points inside the shrunken domain."""
        margin = self.margin if margin is None else margin
        lo = self.domain[:, 0] + margin * self.width
        hi = self.domain[:, 1] - margin * self.width
        sampler = qmc.Halton(d=self.dim, scramble=True, seed=seed)
        return qmc.scale(sampler.random(n), lo, hi)

    def var(self, name: str) -> ex.Var:
        return ex.Var(name, self.coords.index(name))

    def parse(self, source: str) -> ex.Expr:
        return ex.parse(source, self.coords)

    def is_diagonal(self) -> bool:
        return all(e == ex.ZERO for (i, j), e in self.entries.items() if i != j)

    def sqrt_det_expr(self) -> ex.Expr:
        if not self.is_diagonal():
            raise NotImplementedError("symbolic volume density only for diagonal metrics")
        prod = ex.ONE
        for i in range(self.dim):
            prod = prod * self.g(i, i)
        return ex.sqrt(prod)

    def laplacian_expr(self, f: ex.Expr) -> ex.Expr:
        """Symbolic Laplace-Beltrami operator for diagonal metrics."""
        vol = self.sqrt_det_expr()
        out = ex.ZERO
        for i in range(self.dim):
            flux = vol * ex.differentiate(f, i) / self.g(i, i)
            out = out + ex.differentiate(flux, i)
        return ex.simplify(out / vol)

    def grad_norm2_expr(self, f: ex.Expr) -> ex.Expr:
        if not self.is_diagonal():
            raise NotImplementedError("symbolic |df|^2 only for diagonal metrics")
        out = ex.ZERO
        for i in range(self.dim):
            d = ex.differentiate(f, i)
            out = out + d * d / self.g(i, i)
        return out
