"""Check results and their JSON serialisation."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
import json
import math

from . import __version__

STATUSES = ("pass", "fail", "gated", "not-applicable")
TIMING_KEYS = ("wall_time", "total_wall_time")


def _num(x):
    """JSON-safe float: non-finite values become strings."""
    if x is None:
        return None
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


@dataclass
class CheckResult:
    name: str
    anchor: str
    tolerance: float
    status: str
    n_points: int = 0
    max_residual: float | None = None
    mean_residual: float | None = None
    gate: str | None = None
    error: str | None = None
    wall_time: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @classmethod
    def from_residuals(cls, name, anchor, tolerance, residuals, gate=None, wall_time=0.0):
        if not residuals:
            return cls(name, anchor, tolerance, "gated", gate=gate or "no point passed the gate",
                       wall_time=wall_time)
        worst = max(residuals)
        ok = worst <= tolerance
        return cls(name, anchor, tolerance, "pass" if ok else "fail", len(residuals),
                   worst, sum(residuals) / len(residuals), gate, wall_time=wall_time)

    def as_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        for k in ("tolerance", "max_residual", "mean_residual"):
            d[k] = _num(d[k])
        if not timing:
            d.pop("wall_time")
        return d


@dataclass
class CheckReport:
    scenario: str
    chart: str
    structure: dict | None
    seed: int
    points: int
    tol_scale: float
    results: list[CheckResult] = field(default_factory=list)
    total_wall_time: float = 0.0

    @property
    def counts(self) -> dict:
        out = {s: 0 for s in STATUSES}
        for r in self.results:
            out[r.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 1 if any(r.status == "fail" for r in self.results) else 0

    def result(self, name: str) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def as_dict(self, timing: bool = True) -> dict:
        results = sorted(self.results, key=lambda r: r.name)
        d = {
            "tool": "einstype",
            "version": __version__,
            "scenario": self.scenario,
            "chart": self.chart,
            "structure": self.structure,
            "seed": self.seed,
            "points": self.points,
            "tol_scale": self.tol_scale,
            "tolerances": {r.name: _num(r.tolerance) for r in results},
            "counts": self.counts,
            "exit_code": self.exit_code,
            "checks": [r.as_dict(timing) for r in results],
        }
        if timing:
            d["total_wall_time"] = self.total_wall_time
        return d

    def to_json(self, timing: bool = True) -> str:
        return dumps(self.as_dict(timing))

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        results = [CheckResult(**{k: v for k, v in c.items()}) for c in d["checks"]]
        return cls(d["scenario"], d["chart"], d["structure"], d["seed"], d["points"], d["tol_scale"],
                   results, d.get("total_wall_time", 0.0))

    def summary_lines(self) -> list[str]:
        lines = []
        for r in sorted(self.results, key=lambda r: r.name):
            res = "-" if r.max_residual is None else f"{r.max_residual:.2e}"
            extra = r.error or (r.gate if r.status == "gated" else "") or ""
            lines.append(f"{r.status:<15}{r.name:<36}{res:>10}  tol {r.tolerance:.0e}  n={r.n_points:<4}{extra}")
        c = self.counts
        lines.append(f"{self.scenario}: {c['pass']} pass, {c['fail']} fail, {c['gated']} gated, "
                     f"{c['not-applicable']} not applicable")
        return lines


def dumps(d: dict) -> str:
    return json.dumps(d, sort_keys=True, indent=2) + "\n"


def strip_timing(d):
    """Copy of a report dict without wall-time fields."""
    if isinstance(d, dict):
        return {k: strip_timing(v) for k, v in d.items() if k not in TIMING_KEYS}
    if isinstance(d, list):
        return [strip_timing(v) for v in d]
    return d
