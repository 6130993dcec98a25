"""Registry of named identity checks and the runner that evaluates them.

Every check reduces to a relative residual per sample point,
``max |lhs - rhs| / max(1, size of the terms)``.  Chart checks need only a
metric (derivative identities use a seeded smooth probe function); structure
checks need an Einstein-type structure and are gated pointwise on the
structure equation holding.
"""

from __future__ import annotations

from dataclasses import dataclass
import time
from typing import Callable

import numpy as np

from . import curvature as cv
from . import einstein_type as et
from . import expr as ex
from . import levelset as ls
from .chart import Chart
from .constructions import smooth_test_function
from .einstein_type import DEFAULT_GATE, EinsteinTypeStructure, _is_zero
from .report import CheckReport, CheckResult
from .tensorfield import NumericField, full_norm2

__all__ = ["Check", "Context", "REGISTRY", "check_names", "run_checks", "default_tolerances"]


class Context:
    """Sample points, cached structure points, and the probe function for one run."""

    def __init__(self, chart: Chart, structure: EinsteinTypeStructure | None = None, n_points: int = 64,
                 seed: int = 0, margin: float | None = None):
        self.chart = chart
        self.structure = structure
        self.seed = seed
        self.points = chart.sample_points(n_points, seed=seed, margin=margin)
        self.probe = EinsteinTypeStructure(chart, 1, 1, 0, 0, ex.ZERO, smooth_test_function(chart, seed),
                                           name="probe")
        self._sp: dict = {}
        self._level = None

    @property
    def m(self) -> int:
        return self.chart.dim

    def bundle(self, p) -> cv.CurvatureBundle:
        return cv.bundle_at(self.chart, p)

    def sp(self, p, probe: bool = False) -> et.StructurePoint:
        s = self.probe if probe else self.structure
        key = (probe, tuple(np.asarray(p, dtype=float).tolist()))
        hit = self._sp.get(key)
        if hit is None:
            hit = self._sp[key] = s.at(p)
        return hit

    def level_report(self) -> dict:
        if self._level is None:
            _, pts = ls.level_points(self.structure, n=32, seed=self.seed)
            self._level = ls.levelset_property_report(self.structure, pts)
        return self._level


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    tolerance: float
    scope: str                                               # "chart" or "structure"
    evaluate: Callable | None = None                         # (ctx, p) -> residual
    requires: Callable | None = None                         # ctx -> reason or None
    gate: Callable | None = None                             # (ctx, p) -> reason or None
    max_points: int | None = None                            # cap for finite-difference heavy checks
    whole: Callable | None = None                            # ctx -> (residuals, gate, status)


REGISTRY: dict[str, Check] = {}


def check(name, anchor, tolerance, scope="chart", requires=None, gate=None, max_points=None):
    def deco(fn):
        REGISTRY[name] = Check(name, anchor, tolerance, scope, fn, requires, gate, max_points)
        return fn
    return deco


def check_names() -> list[str]:
    return sorted(REGISTRY)


def default_tolerances() -> dict[str, float]:
    return {n: REGISTRY[n].tolerance for n in check_names()}


def _rel(diff, *terms) -> float:
    return float(np.abs(diff).max()) / et._scale(*terms)


def _pair(res) -> float:
    diff, scale = res
    return float(np.abs(diff).max()) / scale


# ---------------------------------------------------------------------------
# requirements and gates


def _dim4(ctx):
    return None if ctx.m >= 4 else "needs dimension >= 4"


def _has_structure(ctx):
    return None if ctx.structure is not None else "no structure on this chart"


def _all(*reqs):
    def req(ctx):
        for r in reqs:
            why = r(ctx)
            if why:
                return why
        return None
    return req


def _beta_nonzero(ctx):
    return "needs beta != 0" if _is_zero(ctx.structure.beta) else None


def _alpha_nonzero(ctx):
    return "needs alpha != 0" if _is_zero(ctx.structure.alpha) else None


def _alpha_zero(ctx):
    return None if _is_zero(ctx.structure.alpha) else "needs alpha = 0"


def _beta_zero(ctx):
    return None if _is_zero(ctx.structure.beta) and not _is_zero(ctx.structure.alpha) else "needs beta = 0"


def _degenerate(ctx):
    return None if et.classify(ctx.structure) == "degenerate" else "needs a degenerate structure"


def _d_norm_class(ctx):
    s = ctx.structure
    if _is_zero(s.alpha):
        return None
    if _is_zero(s.beta):
        return "needs beta != 0 when alpha != 0"
    return "needs a nondegenerate structure" if s.is_degenerate() else None


def _nondegenerate(ctx):
    return None if et.classify(ctx.structure) == "nondegenerate" else "needs a nondegenerate structure"


def _soliton(ctx):
    s = ctx.structure
    lam = ex.simplify(s.lam)
    if not (_is_zero(s.mu) and _is_zero(s.rho) and not _is_zero(s.alpha) and s.alpha == s.beta):
        return "needs Ricci soliton parameters (alpha = beta, mu = rho = 0)"
    return None if isinstance(lam, ex.Const) else "needs constant lambda"


def _structure_holds(ctx, p):
    err = ctx.sp(p).structure_error()
    return None if err <= DEFAULT_GATE else f"structure equation residual {err:.2e} > {DEFAULT_GATE:g}"


def _regular(ctx, p):
    why = _structure_holds(ctx, p)
    if why:
        return why
    gn = ctx.sp(p).grad_norm
    return None if gn >= ls.EPS_REG else f"|grad f| = {gn:.2e} below {ls.EPS_REG:g}"


def _bach_grad_small(ctx, p):
    why = _structure_holds(ctx, p)
    if why:
        return why
    v = et.bach_gradient_norm(ctx.sp(p))
    return None if v <= 1e-6 else f"|B(grad f, .)| = {v:.2e} > 1e-06"


# ---------------------------------------------------------------------------
# chart checks


@check("metric_positive_definite", "metric is symmetric positive definite at every sample", 0.0)
def _metric_pd(ctx, p):
    g = ctx.chart.metric_at(p)
    return max(0.0, -float(np.linalg.eigvalsh(g).min())) + float(np.abs(g - g.T).max())


@check("riemann_symmetries", "R_ijkl = -R_jikl = -R_ijlk = R_klij", 1e-9)
def _riem_sym(ctx, p):
    R = ctx.bundle(p).R
    return max(_rel(R + R.transpose(1, 0, 2, 3), R), _rel(R + R.transpose(0, 1, 3, 2), R),
               _rel(R - R.transpose(2, 3, 0, 1), R))


@check("first_bianchi", "R_ijkt + R_itjk + R_iktj = 0", 1e-6)
def _bianchi1(ctx, p):
    R = ctx.bundle(p).R
    return _rel(R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2), R)


@check("second_bianchi", "R_ijkt,l + R_ijlk,t + R_ijtl,k = 0", 1e-6)
def _bianchi2(ctx, p):
    N = ctx.bundle(p).nablaR               # N[i,j,k,t,l] = R_ijkt,l
    cyc = N + N.transpose(0, 1, 4, 2, 3) + N.transpose(0, 1, 3, 4, 2)
    return _rel(cyc, N)


@check("weyl_trace_free", "every trace of the Weyl tensor vanishes", 1e-9)
def _weyl_tf(ctx, p):
    b = ctx.bundle(p)
    return _rel(np.einsum("ik,ijkl->jl", b.G, b.W), b.W, b.R)


@check("weyl_decomposition", "R = W + (A KN g)/(m-2), checked on the Ricci contraction", 1e-9)
def _weyl_dec(ctx, p):
    b = ctx.bundle(p)
    m = ctx.m
    rebuilt = b.W + cv.kulkarni_nomizu(b.A, b.g) / (m - 2)
    return _rel(np.einsum("kl,ikjl->ij", b.G, rebuilt) - b.ric, b.ric)


@check("schouten_trace", "tr A = (m-2) S / (2(m-1))", 1e-9)
def _schouten_trace(ctx, p):
    b = ctx.bundle(p)
    m = ctx.m
    tr = float(np.einsum("ij,ij->", b.G, b.A))
    return _rel(tr - (m - 2) * b.S / (2 * (m - 1)), b.S)


@check("cotton_skew_trace", "C_ijk = -C_ikj and every trace of C vanishes", 1e-6)
def _cotton_skew(ctx, p):
    b = ctx.bundle(p)
    C = b.C
    return max(_rel(C + C.transpose(0, 2, 1), C), _rel(np.einsum("ij,ijk->k", b.G, C), C),
               _rel(np.einsum("ik,ijk->j", b.G, C), C))


@check("cotton_cyclic", "C_ijk + C_jki + C_kij = 0", 1e-6)
def _cotton_cyc(ctx, p):
    C = ctx.bundle(p).C
    return _rel(C + C.transpose(1, 2, 0) + C.transpose(2, 0, 1), C)


@check("cotton_weyl_divergence", "A_ij,k - A_ik,j equals (m-2)/(m-3) times the divergence of W",
       1e-5, requires=_dim4)
def _cotton_weyl(ctx, p):
    b = ctx.bundle(p)
    other = cv.cotton_from_weyl_div_at(ctx.chart, p)
    return _rel(b.C - other, b.C, other)


def _cotton_div(ctx, p):
    return cv.cotton_divergence_at(ctx.chart, p)


@check("cotton_divergence_formula",
       "C_ijk,k = Delta R_ij - (m-2)/(2(m-1)) S_ij + R_tk R_itjk - R_it R_tj - Delta S g_ij/(2(m-1))",
       1e-5)
def _cotton_div_formula(ctx, p):
    b = ctx.bundle(p)
    m = ctx.m
    G = b.G
    nnric = cv.fd_covariant(cv.nabla_ricci_field(ctx.chart), p, richardson=True)
    hess_s = cv.fd_covariant(cv.scalar_gradient_field(ctx.chart), p, richardson=True)
    lap_ric = np.einsum("kl,ijkl->ij", G, nnric)
    t1 = -(m - 2) / (2 * (m - 1)) * hess_s
    t2 = np.einsum("tk,itjk->ij", b.raise_all(b.ric), b.R)
    t3 = -b.ric @ G @ b.ric
    t4 = -float(np.einsum("kl,kl->", G, hess_s)) / (2 * (m - 1)) * b.g
    lhs = _cotton_div(ctx, p)
    return _rel(lhs - (lap_ric + t1 + t2 + t3 + t4), lhs, lap_ric, t1, t2, t3, t4)


@check("cotton_divergence_symmetry", "C_ijk,k = C_jik,k", 1e-6)
def _cotton_div_sym(ctx, p):
    d = _cotton_div(ctx, p)
    return _rel(d - d.T, d)


@check("cotton_null_divergence", "C_kij,k = 0", 1e-4)
def _cotton_null(ctx, p):
    b = ctx.bundle(p)
    nC = cv.fd_covariant(cv.cotton_field(ctx.chart), p, richardson=True)
    return _rel(np.einsum("ka,kija->ij", b.G, nC), b.C)


@check("bach_symmetric_trace_free", "B_ij = B_ji and g^ij B_ij = 0", 1e-4)
def _bach(ctx, p):
    b = ctx.bundle(p)
    B = cv.bach_at(ctx.chart, p)
    return max(_rel(B - B.T, B), _rel(np.einsum("ij,ij->", b.G, B), B))


@check("metric_compatibility", "nabla g = 0 (finite differences of g with analytic Christoffels)", 1e-6)
def _metric_compat(ctx, p):
    F = NumericField(ctx.chart, "dd", ctx.chart.metric_at, "g")
    return _rel(cv.fd_covariant(F, p, richardson=True), ctx.bundle(p).g)


@check("hessian_symmetry", "f_ij = f_ji for a smooth probe f", 1e-10)
def _hess_sym(ctx, p):
    H = ctx.sp(p, probe=True).hess
    return _rel(H - H.T, H)


@check("third_derivative_commutation", "f_ijk - f_ikj = f_t R_tijk", 1e-8)
def _third(ctx, p):
    sp = ctx.sp(p, probe=True)
    lhs = sp.f3 - sp.f3.transpose(0, 2, 1)
    rhs = np.einsum("t,tijk->ijk", sp.grad, sp.b.R)
    return _rel(lhs - rhs, sp.f3, rhs)


@check("third_derivative_schouten_form",
       "f_ijk - f_ikj = f_t W_tijk + (f_t A_tj g_ik - f_t A_tk g_ij + f_j A_ik - f_k A_ij)/(m-2)", 1e-8)
def _third_schouten(ctx, p):
    sp = ctx.sp(p, probe=True)
    b = sp.b
    m = ctx.m
    lhs = sp.f3 - sp.f3.transpose(0, 2, 1)
    fA = sp.f_dot(b.A)
    rhs = (np.einsum("t,tijk->ijk", sp.grad, b.W)
           + (np.einsum("j,ik->ijk", fA, b.g) - np.einsum("k,ij->ijk", fA, b.g)
              + np.einsum("j,ik->ijk", sp.df, b.A) - np.einsum("k,ij->ijk", sp.df, b.A)) / (m - 2))
    return _rel(lhs - rhs, sp.f3, rhs)


@check("traced_third_derivative", "f_itt = f_tti + f_t R_ti", 1e-8)
def _traced_third(ctx, p):
    sp = ctx.sp(p, probe=True)
    G = sp.b.G
    a = np.einsum("tl,itl->i", G, sp.f3)
    c = np.einsum("tl,tli->i", G, sp.f3)
    rhs = sp.b.ric @ sp.grad
    return _rel(a - c - rhs, a, c, rhs)


@check("ricci_commutation", "R_ij,kt - R_ij,tk = R_likt R_lj + R_ljkt R_li", 1e-5)
def _ric_comm(ctx, p):
    b = ctx.bundle(p)
    nn = cv.fd_covariant(cv.nabla_ricci_field(ctx.chart), p, richardson=True)   # [i,j,k,t] = R_ij,kt
    lhs = nn - nn.transpose(0, 1, 3, 2)
    Rup = np.einsum("la,aikt->likt", b.G, b.R)
    rhs = np.einsum("likt,lj->ijkt", Rup, b.ric) + np.einsum("ljkt,li->ijkt", Rup, b.ric)
    return _rel(lhs - rhs, nn, rhs)


@check("schur", "S_k = 2 R_tk,t (divergence of Ricci by finite differences)", 1e-5)
def _schur(ctx, p):
    b = ctx.bundle(p)
    nric = cv.fd_covariant(cv.ricci_field(ctx.chart), p, richardson=True)
    div = np.einsum("kl,ikl->i", b.G, nric)
    return _rel(b.dS - 2 * div, b.dS, 2 * div)


# ---------------------------------------------------------------------------
# structure checks


def scheck(name, anchor, tolerance, requires=None, gate=_structure_holds, max_points=None):
    req = _has_structure if requires is None else _all(_has_structure, requires)
    return check(name, anchor, tolerance, "structure", req, gate, max_points)


@scheck("structure_equation", "alpha Ric + beta Hess f + mu df df = (rho S + lambda) g", 1e-9, gate=None)
def _structure(ctx, p):
    return ctx.sp(p).structure_error()


@scheck("traced_equation", "(alpha - m rho) S + beta Delta f + mu |grad f|^2 = m lambda", 1e-9)
def _traced(ctx, p):
    sp = ctx.sp(p)
    return abs(sp.traced_residual()) / sp.residual_scale()


@scheck("d_tensor_symmetries", "D_ijk = -D_ikj, cyclic sum and all traces vanish", 1e-9, gate=None)
def _d_sym(ctx, p):
    sp = ctx.sp(p)
    D = sp.d_tensor(1)
    G = sp.b.G
    scale = float(np.abs(sp.b.ric).max() * np.abs(sp.df).max())
    return max(_rel(D + D.transpose(0, 2, 1), scale), _rel(D + D.transpose(1, 2, 0) + D.transpose(2, 0, 1), scale),
               _rel(np.einsum("ij,ijk->k", G, D), scale), _rel(np.einsum("ik,ijk->j", G, D), scale))


@scheck("d_forms_agree", "Ricci, Schouten and (alpha != 0) Hessian forms of D coincide", 1e-9)
def _d_forms(ctx, p):
    sp = ctx.sp(p)
    D1, D2 = sp.d_tensor(1), sp.d_tensor(2)
    out = _rel(D1 - D2, D1, D2)
    if not _is_zero(ctx.structure.alpha):
        D3 = sp.d_tensor(3)
        out = max(out, _rel(D1 - D3, D1, D3))
    return out


@scheck("integrability_first", "alpha C + beta f_t W_tijk = (beta - (m-2) alpha mu / beta) D", 1e-6,
        requires=_beta_nonzero)
def _int1(ctx, p):
    return _pair(et.integrability1_residual_at(ctx.structure, ctx.sp(p)))


@scheck("integrability_second", "alpha B expressed through div D, f_t C and f_t f_k W", 1e-4,
        requires=_beta_nonzero)
def _int2(ctx, p):
    return _pair(et.integrability2_residual_at(ctx.structure, ctx.sp(p)))


@scheck("scalar_gradient_identity", "gradient of S in terms of Ric(grad f), grad lambda and df", 1e-8,
        requires=_beta_nonzero)
def _sk(ctx, p):
    return _pair(et.sk_identity_residual_at(ctx.structure, ctx.sp(p)))


@scheck("fd_contraction", "f_i D_ijk = (f_t f_k R_tj - f_t f_j R_tk)/(m-1)", 1e-8, gate=None)
def _fd_contr(ctx, p):
    return _pair(et.fd_contraction_residual_at(ctx.structure, ctx.sp(p)))


@scheck("y_orthogonal", "Y(grad f) = 0", 1e-9, gate=None)
def _y_orth(ctx, p):
    sp = ctx.sp(p)
    Y = et.y_field_at(ctx.structure, sp)
    return _rel(float(Y @ sp.grad), Y, sp.grad_norm2 * float(np.abs(Y).max()))


@scheck("soliton_y_alternative", "Y = (g(dS, df) df - |df|^2 dS)/(2(m-1)) for Ricci solitons", 1e-6,
        requires=_soliton)
def _y_alt(ctx, p):
    return _pair(et.soliton_y_alternative_at(ctx.structure, ctx.sp(p)))


@scheck("d_norm_identity", "(m-2)/2 |D|^2 against f f B and the divergence of Y", 1e-4,
        requires=_d_norm_class)
def _d_norm(ctx, p):
    return _pair(et.d_norm_identity_residual_at(ctx.structure, ctx.sp(p)))


@scheck("d_norm_div_y", "(m-2)/2 |D|^2 = div Y where B(grad f, .) = 0", 1e-4,
        requires=_nondegenerate, gate=_bach_grad_small)
def _d_norm_div(ctx, p):
    return _pair(et.div_y_identity_residual_at(ctx.structure, ctx.sp(p)))


@scheck("beta_zero_identities", "beta = 0: D = 0, Cotton and Bach in terms of f, Cotton norm identity",
        1e-4, requires=_beta_zero)
def _beta0(ctx, p):
    vals = et.beta_zero_identities_at(ctx.structure, ctx.sp(p))
    return max(v / s for v, s in vals.values())


@scheck("alpha_zero_hessian_form", "alpha = 0: Hess f + (mu/beta) df df is pure trace", 1e-8,
        requires=_alpha_zero, gate=None)
def _alpha0_form(ctx, p):
    sp = ctx.sp(p)
    s = ctx.structure
    T = sp.hess + s.u / s.b * np.outer(sp.df, sp.df)
    phi = float(np.einsum("ij,ij->", sp.b.G, T)) / ctx.m
    return _rel(T - phi * sp.b.g, sp.hess, s.u / s.b * np.outer(sp.df, sp.df))


@scheck("levelset_d2_identity", "|D|^2 through the traceless second fundamental form and R_am", 1e-6,
        requires=_all(_alpha_nonzero, _beta_nonzero), gate=_regular)
def _d2_level(ctx, p):
    d2, rhs = ls.d2_levelset_identity_parts(ctx.structure, ctx.sp(p))
    return abs(d2 - rhs) / et._scale(d2, rhs)


@scheck("levelset_rhs_nonnegative", "the level-set side of the |D|^2 identity is nonnegative", 0.0,
        requires=_all(_alpha_nonzero, _beta_nonzero), gate=_regular)
def _d2_rhs(ctx, p):
    _, rhs = ls.d2_levelset_identity_parts(ctx.structure, ctx.sp(p))
    return max(0.0, -rhs)


@scheck("second_fundamental_form_routes", "h_ab from Hess f agrees with h_ab from the structure equation",
        1e-6, requires=_beta_nonzero, gate=_regular)
def _h_routes(ctx, p):
    s, sp = ctx.structure, ctx.sp(p)
    fr = ls.adapted_frame_at(s, sp)
    h1, _ = ls.second_fundamental_form_at(s, sp, "hessian", fr)
    h2, _ = ls.second_fundamental_form_at(s, sp, "structure", fr)
    return _rel(h1 - h2, h1, h2)


@scheck("conformal_einstein", "degenerate: exp(-2 beta f/((m-2) alpha)) g is Einstein", 1e-6,
        requires=_degenerate, gate=None)
def _conf(ctx, p):
    return _pair(et.conformal_einstein_residual_at(ctx.structure, ctx.sp(p)))


_LEVEL_PROPS = {
    "grad_norm_spread": "|grad f| is constant on a level set",
    "umbilicity": "level sets are totally umbilical",
    "mean_curvature_spread": "level sets have constant mean curvature",
    "mixed_ricci": "R_am = 0 on level sets",
    "scalar_spread": "S is constant on a level set",
    "lambda_spread": "lambda is constant on a level set",
    "tangential_ricci_form": "Ric restricted to a level set is (S - R_mm)/(m-1) times the identity",
    "cotton_vanishes": "C = 0 when D = 0 (nondegenerate)",
    "weyl_vanishes": "W = 0 when D = 0 (nondegenerate, m = 4)",
}


_SHAPE_PROPS = ("grad_norm_spread", "umbilicity", "mean_curvature_spread")


def _level_whole(prop):
    def run(ctx):
        s = ctx.structure
        if _is_zero(s.alpha) and prop not in _SHAPE_PROPS:
            return None, "stated for alpha != 0", "not-applicable"
        if prop in ("cotton_vanishes", "weyl_vanishes") and s.is_degenerate():
            return None, "stated for nondegenerate structures", "not-applicable"
        rep = ctx.level_report()
        if prop not in rep:
            return None, "property not defined in this dimension", "not-applicable"
        entry = rep[prop]
        if entry["status"] != "measured":
            return None, entry["gate"], "gated"
        return [entry["value"]], entry["gate"], None
    return run


for _prop, _anchor in _LEVEL_PROPS.items():
    REGISTRY[f"levelset_{_prop}"] = Check(f"levelset_{_prop}", _anchor, 1e-6, "structure",
                                          requires=_all(_has_structure, _beta_nonzero),
                                          whole=_level_whole(_prop))


# ---------------------------------------------------------------------------
# runner


def _run_one(ck: Check, ctx: Context, tol: float) -> CheckResult:
    t0 = time.perf_counter()
    try:
        if ck.requires is not None:
            why = ck.requires(ctx)
            if why:
                return CheckResult(ck.name, ck.anchor, tol, "not-applicable", gate=why)
        if ck.whole is not None:
            residuals, gate, status = ck.whole(ctx)
            if status is not None:
                return CheckResult(ck.name, ck.anchor, tol, status, gate=gate,
                                   wall_time=time.perf_counter() - t0)
            return CheckResult.from_residuals(ck.name, ck.anchor, tol, residuals, gate,
                                              time.perf_counter() - t0)
        pts = ctx.points if ck.max_points is None else ctx.points[:ck.max_points]
        residuals = []
        gates = []
        for p in pts:
            if ck.gate is not None:
                why = ck.gate(ctx, p)
                if why:
                    gates.append(why)
                    continue
            residuals.append(float(ck.evaluate(ctx, p)))
        gate = None
        if gates:
            gate = f"{len(gates)} of {len(pts)} points gated (first: {gates[0]})"
        return CheckResult.from_residuals(ck.name, ck.anchor, tol, residuals, gate, time.perf_counter() - t0)
    except Exception as err:   # attach to this check, keep going with the others
        return CheckResult(ck.name, ck.anchor, tol, "fail", error=f"{type(err).__name__}: {err}",
                           wall_time=time.perf_counter() - t0)


def run_checks(chart: Chart, structure: EinsteinTypeStructure | None = None, names=None, n_points: int = 64,
               seed: int = 0, margin: float | None = None, tolerances: dict | None = None,
               tol_scale: float = 1.0, scenario: str = "") -> CheckReport:
    """Evaluate the named checks (all by default) and assemble a report."""
    names = check_names() if names is None else list(names)
    unknown = [n for n in names if n not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    tols = default_tolerances()
    tols.update(tolerances or {})
    t0 = time.perf_counter()
    ctx = Context(chart, structure, n_points, seed, margin)
    results = [_run_one(REGISTRY[n], ctx, tols[n] * tol_scale) for n in sorted(set(names))]
    info = None
    if structure is not None:
        info = {"alpha": str(structure.alpha), "beta": str(structure.beta), "mu": str(structure.mu),
                "rho": str(structure.rho), "lambda": ex.to_string(structure.lam),
                "f": ex.to_string(structure.f), "class": et.classify(structure)}
    return CheckReport(scenario or chart.name, chart.name, info, seed, n_points, tol_scale, results,
                       time.perf_counter() - t0)
