"""Scenario files: a chart, an optional structure, the checks to run, sampling.

A scenario is TOML::

    name = "gaussian shrinker"
    checks = ["structure_equation", "d_forms_agree"]     # optional, default all

    [chart]
    coords = ["x", "y", "z"]
    domain = [[-1, 1], [-1, 1], [-1, 1]]
    g_1_1 = "1"                  # 1-based indices, missing entries are 0
    g_2_2 = "1"
    g_3_3 = "1"

    [structure]
    alpha = 1
    beta = 1
    mu = 0
    rho = 0
    lambda = "1/2"
    f = "(x^2 + y^2 + z^2)/4"

    [sampling]
    count = 64
    seed = 0

    [tolerances]
    structure_equation = 1e-12

Instead of ``[chart]``/``[structure]`` a top-level ``corpus = "<name>"``
selects a built-in example.  The whole file is validated before anything is
evaluated; unknown keys are rejected with their line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import re
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import expr as ex
from .chart import Chart
from .checks import REGISTRY
from .constructions import corpus_entry, corpus_names
from .einstein_type import EinsteinTypeStructure, as_constant

__all__ = ["Scenario", "ScenarioError", "load", "loads", "from_corpus"]

_TOP = {"name", "corpus", "checks", "chart", "structure", "sampling", "tolerances"}
_CHART = {"coords", "domain", "dim", "margin", "name"}
_STRUCT = {"alpha", "beta", "mu", "rho", "lambda", "f"}
_SAMPLING = {"count", "seed", "margin"}
_METRIC_KEY = re.compile(r"g_(\d+)_(\d+)$")


class ScenarioError(ValueError):
    """Input error in a scenario file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class Scenario:
    name: str
    chart: Chart
    structure: EinsteinTypeStructure | None
    checks: list[str] | None = None
    count: int = 64
    seed: int = 0
    margin: float | None = None
    tolerances: dict[str, float] = field(default_factory=dict)


def _line_of(text: str, table: str | None, key: str) -> int | None:
    """Line of ``key`` inside ``[table]`` (top level when table is None)."""
    current = None
    pat = None if key is None else re.compile(r"\s*(?:\"%s\"|'%s'|%s)\s*=" % ((re.escape(key),) * 3))
    for no, line in enumerate(text.splitlines(), 1):
        head = re.match(r"\s*\[\s*([^\]]+?)\s*\]", line)
        if head and not line.lstrip().startswith("[["):
            current = head.group(1)
            if table is not None and current == table and key is None:
                return no
            continue
        if pat is not None and current == table and pat.match(line):
            return no
    return None


def _reject_unknown(text, table, data: dict, allowed, extra=None):
    for k in data:
        if k in allowed or (extra is not None and extra(k)):
            continue
        where = f"[{table}]" if table else "top level"
        raise ScenarioError(f"unknown key {k!r} in {where}", _line_of(text, table, k))


def _table(text, data, key) -> dict:
    v = data.get(key, {})
    if not isinstance(v, dict):
        raise ScenarioError(f"{key!r} must be a table", _line_of(text, None, key))
    return v


def _parse_expr(text, table, key, source, coords):
    if not isinstance(source, (str, int, float)) or isinstance(source, bool):
        raise ScenarioError(f"{key} must be a string or a number", _line_of(text, table, key))
    try:
        return ex.parse(str(source), coords)
    except ex.ExprError as err:
        raise ScenarioError(f"{key} = {source!r}: {err}", _line_of(text, table, key)) from err


def _build_chart(text, c: dict, name: str) -> Chart:
    _reject_unknown(text, "chart", c, _CHART, lambda k: _METRIC_KEY.match(k) is not None)
    coords = c.get("coords")
    if not (isinstance(coords, list) and all(isinstance(x, str) for x in coords)):
        raise ScenarioError("chart.coords must be a list of names", _line_of(text, "chart", "coords"))
    m = len(coords)
    if "dim" in c and c["dim"] != m:
        raise ScenarioError(f"chart.dim = {c['dim']} but {m} coordinates", _line_of(text, "chart", "dim"))
    dom = c.get("domain")
    if not (isinstance(dom, list) and len(dom) == m and all(isinstance(d, list) and len(d) == 2 for d in dom)):
        raise ScenarioError(f"chart.domain must list {m} intervals [lo, hi]", _line_of(text, "chart", "domain"))
    metric = {}
    for k, v in c.items():
        mt = _METRIC_KEY.match(k)
        if not mt:
            continue
        i, j = int(mt.group(1)) - 1, int(mt.group(2)) - 1
        if not (0 <= i < m and 0 <= j < m):
            raise ScenarioError(f"{k}: index out of range for dimension {m}", _line_of(text, "chart", k))
        key = (min(i, j), max(i, j))
        if key in metric:
            raise ScenarioError(f"{k}: entry given twice", _line_of(text, "chart", k))
        metric[key] = _parse_expr(text, "chart", k, v, coords)
    if not metric:
        raise ScenarioError("chart has no metric entries (g_1_1 = ...)", _line_of(text, "chart", None))
    try:
        return Chart(coords, metric, [tuple(d) for d in dom], name=str(c.get("name", name)),
                     margin=float(c.get("margin", 0.05)))
    except ValueError as err:
        raise ScenarioError(f"chart: {err}", _line_of(text, "chart", None)) from err


def _build_structure(text, st: dict, chart: Chart, name: str) -> EinsteinTypeStructure:
    _reject_unknown(text, "structure", st, _STRUCT)
    missing = sorted(_STRUCT - set(st))
    if missing:
        raise ScenarioError(f"structure is missing {', '.join(missing)}", _line_of(text, "structure", None))
    consts = {}
    for k in ("alpha", "beta", "mu", "rho"):
        try:
            consts[k] = as_constant(st[k])
        except (TypeError, ValueError) as err:
            raise ScenarioError(f"{k}: {err}", _line_of(text, "structure", k)) from err
    lam = _parse_expr(text, "structure", "lambda", st["lambda"], chart.coords)
    f = _parse_expr(text, "structure", "f", st["f"], chart.coords)
    try:
        return EinsteinTypeStructure(chart, consts["alpha"], consts["beta"], consts["mu"], consts["rho"],
                                     lam, f, name=name)
    except ValueError as err:
        raise ScenarioError(f"structure: {err}", _line_of(text, "structure", None)) from err


def loads(text: str, default_name: str = "scenario") -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        mt = re.search(r"line (\d+)", str(err))
        raise ScenarioError(f"TOML syntax: {err}", int(mt.group(1)) if mt else None) from err
    _reject_unknown(text, None, data, _TOP)
    name = str(data.get("name", default_name))
    sampling = _table(text, data, "sampling")
    _reject_unknown(text, "sampling", sampling, _SAMPLING)
    tolerances = _table(text, data, "tolerances")
    for k, v in tolerances.items():
        if k not in REGISTRY:
            raise ScenarioError(f"unknown check {k!r} in [tolerances]", _line_of(text, "tolerances", k))
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0:
            raise ScenarioError(f"tolerance for {k} must be a nonnegative number", _line_of(text, "tolerances", k))
    checks = data.get("checks")
    if checks is not None:
        if not (isinstance(checks, list) and all(isinstance(c, str) for c in checks)):
            raise ScenarioError("checks must be a list of names", _line_of(text, None, "checks"))
        bad = [c for c in checks if c not in REGISTRY]
        if bad:
            raise ScenarioError(f"unknown checks: {', '.join(bad)}", _line_of(text, None, "checks"))

    corpus_tols = {}
    if "corpus" in data:
        if "chart" in data or "structure" in data:
            raise ScenarioError("corpus scenarios cannot also define [chart] or [structure]",
                                _line_of(text, None, "corpus"))
        try:
            entry = corpus_entry(str(data["corpus"]))
        except KeyError as err:
            raise ScenarioError(str(err.args[0]), _line_of(text, None, "corpus")) from err
        chart, structure = entry.build()
        corpus_tols = dict(entry.tolerances)
        if "name" not in data:
            name = entry.name
    else:
        if "chart" not in data:
            raise ScenarioError("scenario needs [chart] or corpus = \"<name>\"")
        chart = _build_chart(text, _table(text, data, "chart"), name)
        structure = None
        if "structure" in data:
            structure = _build_structure(text, _table(text, data, "structure"), chart, name)

    count = sampling.get("count", 64)
    seed = sampling.get("seed", 0)
    margin = sampling.get("margin")
    for k, v, ok in (("count", count, isinstance(count, int) and count > 0),
                     ("seed", seed, isinstance(seed, int) and seed >= 0),
                     ("margin", margin, margin is None or (isinstance(margin, (int, float)) and 0 <= margin < 0.5))):
        if not ok or isinstance(v, bool):
            raise ScenarioError(f"sampling.{k} = {v!r} is invalid", _line_of(text, "sampling", k))
    corpus_tols.update({k: float(v) for k, v in tolerances.items()})
    return Scenario(name, chart, structure, checks, count, seed,
                    None if margin is None else float(margin), corpus_tols)


def load(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stem = re.sub(r"\.[^.]*$", "", str(path).replace("\\", "/").rsplit("/", 1)[-1])
    return loads(text, stem)


def from_corpus(name: str) -> Scenario:
    entry = corpus_entry(name)
    chart, structure = entry.build()
    return Scenario(entry.name, chart, structure, tolerances=dict(entry.tolerances))


def is_corpus_name(arg: str) -> bool:
    return arg in corpus_names()
