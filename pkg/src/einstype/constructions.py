"""Charts and structures with known answers: space forms, warped products,
canonical solitons and degenerate structures built from Einstein metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math
from typing import Callable, Mapping

import numpy as np

from . import expr as ex
from .chart import Chart
from .curvature import bundle_at
from .einstein_type import EinsteinTypeStructure, preset

__all__ = [
    "WarpedSpec", "NonpositiveWarp", "ZeroInitialSlope", "SignChange", "NotEinstein",
    "flat_chart", "sphere_chart", "hyperbolic_chart", "warped_chart", "alpha0_warped_structure",
    "gaussian_soliton", "degenerate_from_einstein", "CorpusEntry", "CORPUS", "corpus_entry",
    "corpus_names", "smooth_test_function",
]

EDGE = 0.3  # distance kept from coordinate singularities of polar charts


class NonpositiveWarp(ValueError):
    pass


class ZeroInitialSlope(ValueError):
    pass


class SignChange(ValueError):
    pass


class NotEinstein(ValueError):
    pass


def _x(name, i):
    return ex.Var(name, i)


def flat_chart(m: int, domain=None, name: str | None = None) -> Chart:
    coords = [f"x{i + 1}" for i in range(m)]
    domain = domain or [(-1.0, 1.0)] * m
    return Chart(coords, {(i, i): ex.ONE for i in range(m)}, domain, name=name or f"flat{m}")


def _round_entries(angles: list[ex.Var]) -> dict[int, ex.Expr]:
    """Diagonal of the round metric in polar angles: 1, sin^2 a1, sin^2 a1 sin^2 a2, ..."""
    out = {}
    prod = ex.ONE
    for i, a in enumerate(angles):
        out[i] = prod
        prod = prod * ex.power(ex.sin(a), ex.TWO)
    return out


def _round_domain(n: int) -> list[tuple[float, float]]:
    return [(EDGE, math.pi - EDGE)] * (n - 1) + [(0.0, 2 * math.pi)]


def sphere_chart(m: int, name: str | None = None) -> Chart:
    """Unit round sphere in polar angles ``t1..tm``."""
    coords = [f"t{i + 1}" for i in range(m)]
    diag = _round_entries([_x(c, i) for i, c in enumerate(coords)])
    return Chart(coords, {(i, i): v for i, v in diag.items()}, _round_domain(m), name=name or f"sphere{m}")


def hyperbolic_chart(m: int, name: str | None = None) -> Chart:
    """Unit hyperbolic space in the upper half-space model, last coordinate ``y > 0``."""
    coords = [f"x{i + 1}" for i in range(m - 1)] + ["y"]
    y = _x("y", m - 1)
    inv_y2 = ex.ONE / ex.power(y, ex.TWO)
    domain = [(-1.0, 1.0)] * (m - 1) + [(0.5, 2.0)]
    return Chart(coords, {(i, i): inv_y2 for i in range(m)}, domain, name=name or f"hyperbolic{m}")


@dataclass
class WarpedSpec:
    """``dr^2 + w(r)^2 g_fiber`` on ``r in r_interval``.

    ``fiber`` is ``"flat"``, ``"sphere"``, ``"hyperbolic"`` or a mapping from
    fiber index pairs to expression strings in the fiber coordinates
    ``u1..un`` (then ``fiber_domain`` is required).  ``w`` is an expression
    string in ``r``.
    """

    fiber: str | Mapping[tuple[int, int], str]
    w: str
    r_interval: tuple[float, float]
    fiber_dim: int
    fiber_domain: list[tuple[float, float]] | None = None
    name: str = ""


def _fiber(spec: WarpedSpec):
    n = spec.fiber_dim
    kind = spec.fiber
    if kind == "flat":
        coords = [f"x{i + 1}" for i in range(n)]
        entries = {(i, i): ex.ONE for i in range(n)}
        domain = [(-1.0, 1.0)] * n
    elif kind == "sphere":
        coords = [f"u{i + 1}" for i in range(n)]
        diag = _round_entries([_x(c, i + 1) for i, c in enumerate(coords)])
        entries = {(i, i): v for i, v in diag.items()}
        domain = _round_domain(n)
    elif kind == "hyperbolic":
        coords = [f"x{i + 1}" for i in range(n - 1)] + ["y"]
        y = _x("y", n)
        entries = {(i, i): ex.ONE / ex.power(y, ex.TWO) for i in range(n)}
        domain = [(-1.0, 1.0)] * (n - 1) + [(0.5, 2.0)]
    elif isinstance(kind, Mapping):
        coords = [f"u{i + 1}" for i in range(n)]
        all_coords = ["r"] + coords
        entries = {(i, j): ex.parse(v, all_coords) for (i, j), v in kind.items()}
        if spec.fiber_domain is None:
            raise ValueError("declared fiber metrics need fiber_domain")
        domain = None
    else:
        raise ValueError(f"unknown fiber kind {kind!r}")
    if spec.fiber_domain is not None:
        domain = [tuple(d) for d in spec.fiber_domain]
    return coords, entries, domain


def warped_chart(spec: WarpedSpec, samples: int = 64) -> Chart:
    coords, fentries, fdomain = _fiber(spec)
    w = ex.parse(spec.w, ["r"])
    wsq = ex.power(w, ex.TWO)
    lo, hi = spec.r_interval
    wfun = ex.compile_exprs([w], 1)
    for r in np.linspace(lo, hi, samples):
        if not wfun((r,))[0] > 0:
            raise NonpositiveWarp(f"warp {spec.w} is not positive at r={r:g}")
    entries = {(0, 0): ex.ONE}
    for (i, j), v in fentries.items():
        entries[(i + 1, j + 1)] = wsq * v
    return Chart(["r"] + coords, entries, [tuple(spec.r_interval)] + fdomain, name=spec.name)


def _laplacian_lambda(chart: Chart, f: ex.Expr, mu) -> ex.Expr:
    m = chart.dim
    return ex.simplify((chart.laplacian_expr(f) + ex.const(float(mu)) * chart.grad_norm2_expr(f)) / ex.const(m))


def alpha0_warped_structure(f: str, mu, spec: WarpedSpec, name: str = ""):
    """Warped chart and alpha = 0 structure ``Hess f + mu df df = phi g``.

    The warp is ``f'(r)/f'(0) exp(mu f(r))``; ``spec.w`` is ignored.
    """
    fr = ex.parse(f, ["r"])
    d1 = ex.differentiate(fr, "r")
    slope0 = ex.evaluate(d1, (0.0,))
    if abs(slope0) < 1e-14:
        raise ZeroInitialSlope(f"f'(0) = 0 for f = {f}")
    lo, hi = spec.r_interval
    d1f = ex.compile_exprs([d1], 1)
    vals = [d1f((r,))[0] for r in np.linspace(min(lo, 0.0), max(hi, 0.0), 257)]
    if min(vals) * max(vals) <= 0:
        raise SignChange(f"f' changes sign or vanishes on [{min(lo, 0.0):g}, {max(hi, 0.0):g}]")
    mu = Fraction(mu) if not isinstance(mu, float) else mu
    warp = ex.to_string(ex.simplify(d1 / ex.const(slope0) * ex.exp(ex.const(float(mu)) * fr)))
    spec = WarpedSpec(spec.fiber, warp, spec.r_interval, spec.fiber_dim, spec.fiber_domain, name or spec.name)
    chart = warped_chart(spec)
    f_chart = ex.parse(f, chart.coords)
    lam = _laplacian_lambda(chart, f_chart, mu)
    s = EinsteinTypeStructure(chart, 0, 1, mu, 0, lam, f_chart, name=chart.name, preset=None)
    return chart, s


def gaussian_soliton(m: int, lam0=Fraction(1, 2), domain=None, name: str | None = None):
    """Flat R^m with f = lam0 |x|^2 / 2: a gradient Ricci soliton with constant lam0."""
    domain = domain or [(0.2, 1.2)] + [(-1.0, 1.0)] * (m - 1)
    chart = flat_chart(m, domain, name=name or f"gaussian{m}")
    lam0 = Fraction(lam0) if not isinstance(lam0, float) else lam0
    f = ex.ZERO
    for i, c in enumerate(chart.coords):
        f = f + ex.power(_x(c, i), ex.TWO)
    f = ex.simplify(ex.const(float(lam0) / 2) * f)
    s = EinsteinTypeStructure(chart, *preset("ricci_soliton", m), ex.const(float(lam0)), f,
                              name=chart.name, preset="ricci_soliton")
    return chart, s


def degenerate_from_einstein(chart: Chart, f: ex.Expr | str, a: float, einstein_tol: float = 1e-8,
                             name: str | None = None):
    """Degenerate structure from an Einstein chart ``g_E`` and a function ``f``.

    Returns ``(g, s)`` where ``g = exp(-2 a f) g_E`` and ``s`` is the structure
    with ``alpha = 1, beta = -(m-2) a, mu = (m-2) a^2, rho = 1/(m-1)`` and
    ``lambda = -a Lap_g f - Lambda/(m-1) exp(2 a f)``, ``Ric_E = Lambda g_E``.
    The original Einstein metric is recovered as ``exp(2 a f) g``.
    """
    if a == 0:
        raise ValueError("a must be nonzero")
    m = chart.dim
    f = chart.parse(f) if isinstance(f, str) else f
    lams = []
    for p in chart.sample_points(16, seed=7):
        b = bundle_at(chart, p)
        tr = b.S / m
        err = float(np.abs(b.ric - tr * b.g).max()) / max(1.0, abs(tr))
        if err > einstein_tol:
            raise NotEinstein(f"chart {chart.name!r} is not Einstein (|Ric - S/m g| = {err:.3g})")
        lams.append(tr)
    Lam = float(np.mean(lams))
    if abs(Lam - round(Lam)) < 1e-9:
        Lam = float(round(Lam))
    a_q = Fraction(a) if not isinstance(a, float) or float(a).is_integer() else a
    factor = ex.exp(ex.const(-2.0 * float(a)) * f)
    entries = {k: ex.simplify(factor * v) for k, v in chart.entries.items() if v != ex.ZERO}
    new = Chart(chart.coords, entries, chart.domain.tolist(), name=name or f"{chart.name}_degenerate",
                margin=chart.margin)
    lap = new.laplacian_expr(f)
    lam = ex.simplify(ex.const(-float(a)) * lap
                      - ex.const(Lam / (m - 1)) * ex.exp(ex.const(2.0 * float(a)) * f))
    s = EinsteinTypeStructure(new, 1, -(m - 2) * a_q, (m - 2) * a_q * a_q, Fraction(1, m - 1), lam, f,
                              name=new.name)
    return new, s


def smooth_test_function(chart: Chart, seed: int = 0) -> ex.Expr:
    """A seeded smooth function mixing every coordinate, for identity checks."""
    rng = np.random.default_rng(seed)
    terms = []
    for i, c in enumerate(chart.coords):
        amp, freq, phase = rng.uniform(0.3, 1.0), rng.uniform(0.5, 1.5), rng.uniform(0, math.pi)
        terms.append(f"{amp:.6f}*sin({freq:.6f}*{c} + {phase:.6f})")
    c0, c1 = chart.coords[0], chart.coords[1]
    terms.append(f"{rng.uniform(0.2, 0.6):.6f}*{c0}*cos({c1})")
    terms.append(f"{rng.uniform(0.1, 0.3):.6f}*exp({rng.uniform(-0.5, 0.5):.6f}*{chart.coords[-1]})")
    return chart.parse(" + ".join(terms))


# ---------------------------------------------------------------------------
# corpus


@dataclass
class CorpusEntry:
    name: str
    case: str
    builder: Callable[[], tuple]
    tolerances: dict = field(default_factory=dict)

    def build(self):
        """``(chart, structure or None)``, built once and memoised."""
        if not hasattr(self, "_built"):
            self._built = self.builder()
        return self._built


def _einstein_on(chart: Chart):
    m = chart.dim
    return chart, EinsteinTypeStructure(chart, *preset("einstein", m), ex.ZERO, ex.ZERO,
                                        name=chart.name, preset="einstein")


def _polar(chart_fn, m, f, lam, pre, k=None, domain=None, name=""):
    chart = chart_fn(m, name=name)
    if domain is not None:
        chart = Chart(chart.coords, chart.entries, domain, name=name)
    s = EinsteinTypeStructure(chart, *preset(pre, m, k), chart.parse(lam), chart.parse(f), name=name, preset=pre)
    return chart, s


def _sphere3_domain(r_hi=math.pi - EDGE, r_lo=EDGE):
    return [(r_lo, r_hi), (EDGE, math.pi - EDGE), (0.0, 2 * math.pi)]


def _cylinder():
    chart = Chart(["t1", "t2", "x", "y"], {(0, 0): "1", (1, 1): "sin(t1)^2", (2, 2): "1", (3, 3): "1"},
                  [(EDGE, math.pi - EDGE), (0.0, 2 * math.pi), (0.2, 1.2), (-1.0, 1.0)], name="cylinder_s2r2")
    s = EinsteinTypeStructure(chart, *preset("ricci_soliton", 4), ex.ONE, chart.parse("(x^2 + y^2)/2"),
                              name=chart.name, preset="ricci_soliton")
    return chart, s


_S2R_FIBER = {(0, 0): "1", (1, 1): "sin(u1)^2", (2, 2): "1"}
_S2R_DOMAIN = [(EDGE + 0.1, math.pi - EDGE - 0.1), (0.0, 2 * math.pi), (-1.0, 1.0)]


def _alpha0(f, mu, name):
    spec = WarpedSpec(_S2R_FIBER, "1", (0.1, 1.5), 3, _S2R_DOMAIN, name=name)
    return alpha0_warped_structure(f, mu, spec, name=name)


def _warp4():
    spec = WarpedSpec(_S2R_FIBER, "2 + sin(r)", (0.2, 2.5), 3, _S2R_DOMAIN, name="warp4_s2r")
    return warped_chart(spec), None


def _beta0():
    spec = WarpedSpec("sphere", "exp(r)", (-0.5, 1.0), 2, name="beta0_warp_exp3")
    chart = warped_chart(spec)
    s = EinsteinTypeStructure(chart, 1, 0, 1, 0, chart.parse("exp(-2*r) - 2"), chart.parse("-exp(-r)"),
                              name=chart.name)
    return chart, s


def _entries():
    E = CorpusEntry
    out = [
        E("flat3", "einstein (flat)", lambda: _einstein_on(flat_chart(3))),
        E("flat4", "einstein (flat)", lambda: _einstein_on(flat_chart(4))),
        E("sphere3", "einstein (unit sphere)", lambda: _einstein_on(sphere_chart(3))),
        E("sphere4", "einstein (unit sphere)", lambda: _einstein_on(sphere_chart(4))),
        E("hyperbolic3", "einstein (hyperbolic space)", lambda: _einstein_on(hyperbolic_chart(3))),
        E("hyperbolic4", "einstein (hyperbolic space)", lambda: _einstein_on(hyperbolic_chart(4))),
        E("gaussian3", "ricci_soliton (Gaussian shrinker)", lambda: gaussian_soliton(3),
          {"structure_equation": 1e-12}),
        E("gaussian4", "ricci_soliton (Gaussian shrinker)", lambda: gaussian_soliton(4),
          {"structure_equation": 1e-12}),
        E("cylinder_s2r2", "ricci_soliton (S2 x R2 shrinker, D != 0)", _cylinder),
        E("sphere3_almost", "ricci_almost_soliton (round S3, f = cos t1)",
          lambda: _polar(sphere_chart, 3, "cos(t1)", "2 - cos(t1)", "ricci_almost_soliton", name="sphere3_almost")),
        E("yamabe_flat3", "yamabe_soliton (flat, radial f)",
          lambda: _polar(flat_chart, 3, "(x1^2 + x2^2 + x3^2)/2", "1", "yamabe_soliton",
                         domain=[(0.2, 1.2), (-1.0, 1.0), (-1.0, 1.0)], name="yamabe_flat3")),
        E("yamabe_quasi_sphere3", "yamabe_quasi_soliton (round S3, k = 2)",
          lambda: _polar(sphere_chart, 3, "-2*log(cos(t1))", "-4", "yamabe_quasi_soliton", k=2,
                         domain=_sphere3_domain(1.3), name="yamabe_quasi_sphere3")),
        E("conformal_sphere3", "conformal_gradient_soliton (round S3)",
          lambda: _polar(sphere_chart, 3, "cos(t1)", "-cos(t1)", "conformal_gradient_soliton",
                         name="conformal_sphere3")),
        E("quasi_einstein_sphere3", "quasi_einstein (round S3, k = 2)",
          lambda: _polar(sphere_chart, 3, "-2*log(cos(t1))", "4", "quasi_einstein", k=2,
                         domain=_sphere3_domain(1.3), name="quasi_einstein_sphere3")),
        E("rho_einstein_gaussian3", "rho_einstein (flat, rho = 1/4)",
          lambda: _polar(flat_chart, 3, "(x1^2 + x2^2 + x3^2)/4", "1/2", "rho_einstein", k=Fraction(1, 4),
                         domain=[(0.2, 1.2), (-1.0, 1.0), (-1.0, 1.0)], name="rho_einstein_gaussian3")),
        E("alpha0_warp_exp", "alpha = 0 warped form, f = e^r - 1, mu = 0",
          lambda: _alpha0("exp(r) - 1", 0, "alpha0_warp_exp")),
        E("alpha0_warp_exp_mu05", "alpha = 0 warped form, f = e^r - 1, mu = 1/2",
          lambda: _alpha0("exp(r) - 1", Fraction(1, 2), "alpha0_warp_exp_mu05")),
        E("alpha0_warp_sinh", "alpha = 0 warped form, f = sinh r, mu = 0",
          lambda: _alpha0("sinh(r)", 0, "alpha0_warp_sinh")),
        E("alpha0_warp_sinh_mu05", "alpha = 0 warped form, f = sinh r, mu = 1/2",
          lambda: _alpha0("sinh(r)", Fraction(1, 2), "alpha0_warp_sinh_mu05")),
        E("sphere4_degenerate", "degenerate (conformally Einstein, from S4)",
          lambda: degenerate_from_einstein(sphere_chart(4), "cos(t1)", 1, name="sphere4_degenerate"),
          {"structure_equation": 1e-6}),
        E("flat4_degenerate", "degenerate (conformally flat, from R4)",
          lambda: degenerate_from_einstein(flat_chart(4), "x1", 1, name="flat4_degenerate"),
          {"structure_equation": 1e-8}),
        E("warp4_s2r", "chart only: warped product over S2 x R, not conformally flat", _warp4),
        E("beta0_warp_exp3", "beta = 0 (alpha = mu = 1) on a warped S2 product", _beta0),
    ]
    return {e.name: e for e in out}


CORPUS: dict[str, CorpusEntry] = _entries()


def corpus_names() -> list[str]:
    return list(CORPUS)


def corpus_entry(name: str) -> CorpusEntry:
    try:
        return CORPUS[name]
    except KeyError:
        raise KeyError(f"unknown corpus entry {name!r}; try `list`") from None
