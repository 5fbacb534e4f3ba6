"""Command-line front end: ``tldl [scenario] --config run.json``.

A run is described by a JSON document::

    {
      "scenario": "compare",
      "field": {"epsilon": 1.0, "layout": "z",
                "profile": {"kind": "tanh", "f0": 1.0, "f1": 0.5, "T": 1.0}},
      "initial": {"amplitudes": [[1, 0], [0, 0]]},
      "time": {"t_start": -10, "t_end": 10, "n_samples": 201},
      "tolerance": 1e-10,
      "output": {"path": "cmp.csv", "format": "csv"}
    }

Every run writes its data file(s) and then ``<stem>.manifest.json``; the
process exits 0 exactly when the manifest was written.  Diagnostics go to
stderr, at the level named by the ``TLDL_LOG`` environment variable.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import copy
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .bloch import bloch_from_spinor, evolve_bloch, spinor_from_bloch
from .classical import (
    Chart,
    ChartState,
    CouplingSplit,
    ExtendedState,
    chart_from_spin,
    extend_howland,
    hamilton_flow,
    poincare_section,
    section_spread,
)
from .errors import ConfigError, ParseError, TwoLevelError, ValidationError
from .exact import (
    ClosedForm,
    SechSolutionParams,
    TanhSolutionParams,
    match_pulse,
    scattering_probabilities,
)
from .fields import Constant, FieldConfiguration, Sech, Tanh, field_from_dict
from .ode import MAX_TOL, MIN_TOL
from .quantum import Spinor, evolve_schrodinger, second_order_residual
from .special import HypParams, hyp2f1, lngamma

log = logging.getLogger("twolevel")

SCENARIOS = ("evolve", "bloch", "classical", "poincare", "exact-tanh", "exact-sech", "scatter", "compare")
FORMATS = ("csv", "json")

SCHEMAS = {
    "spinor": ["t", "psi1_re", "psi1_im", "psi2_re", "psi2_im", "norm"],
    "bloch": ["t", "Q1", "Q2", "Q3"],
    "classical": ["t", "q", "p", "energy"],
    "section": ["q", "p", "theta2", "crossing_index"],
    "compare": ["t", "psi1_exact_re", "psi1_exact_im", "psi1_numeric_re", "psi1_numeric_im", "abs_err"],
    "compare_summary": ["component", "max_abs_err", "mean_abs_err"],
    "scatter": ["in_state", "transition_probability", "survival_probability"],
}

_TOP_KEYS = {"scenario", "field", "initial", "time", "tolerance", "output", "sweep", "chart", "poincare", "match_time"}
_INITIAL_KINDS = ("spinor", "bloch", "chart", "amplitudes")
DEFAULT_TOL = 1e-10
DEFAULT_MATCH_TIME = -15.0  # in units of the pulse width T


# ------------------------------------------------------------------ config


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_samples: int

    def samples(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_samples)


@dataclass(frozen=True)
class PoincareSpec:
    n_crossings: int
    split: CouplingSplit = CouplingSplit.STRONG
    coupling: Optional[float] = None
    theta: tuple[float, ...] = ()
    section_angle_index: int = 0


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    field: FieldConfiguration
    initial_kind: str
    initial_value: Any
    time: Optional[TimeGrid]
    tolerance: float
    output_path: str
    output_format: str
    chart: Chart = Chart.TWO
    poincare: Optional[PoincareSpec] = None
    match_time: float = DEFAULT_MATCH_TIME
    sweep: Optional[SweepSpec] = None
    document: dict = field(default_factory=dict, compare=False)

    def children(self) -> list[RunConfig]:
        """One config per sweep value, outputs suffixed ``_k``; [self] without a sweep."""
        if self.sweep is None:
            return [self]
        out = []
        for k, value in enumerate(self.sweep.values):
            doc = copy.deepcopy(self.document)
            doc.pop("sweep")
            _set_path(doc, self.sweep.parameter, value, must_exist=True)
            doc["output"]["path"] = _suffixed(self.output_path, f"_{k}")
            out.append(config_from_dict(doc))
        return out


def _suffixed(path: str, suffix: str) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + suffix + p.suffix))


def _require(cond: bool, name: str, message: str) -> None:
    if not cond:
        raise ValidationError(f"{name}: {message}")


def _number(value, name: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), name, f"must be a number, got {value!r}")
    _require(math.isfinite(value), name, "must be finite")
    return float(value)


def _integer(value, name: str) -> int:
    _require(isinstance(value, int) and not isinstance(value, bool), name, f"must be an integer, got {value!r}")
    return int(value)


def _complex_pair(value, name: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    _require(isinstance(value, (list, tuple)) and len(value) == 2, name, "must be a number or [re, im]")
    return complex(_number(value[0], name), _number(value[1], name))


def _keys(doc, allowed: set, name: str) -> None:
    _require(isinstance(doc, dict), name, "must be an object")
    unknown = set(doc) - allowed
    if unknown:
        raise ValidationError(f"{name}: unknown keys {sorted(unknown)}")


def _parse_initial(doc, scenario: str) -> tuple[str, Any]:
    if doc is None:
        if scenario in ("exact-tanh", "exact-sech", "compare", "scatter"):
            return "amplitudes", (1 + 0j, 0j)
        raise ValidationError("initial: required for this scenario")
    _keys(doc, set(_INITIAL_KINDS), "initial")
    _require(len(doc) == 1, "initial", f"exactly one of {list(_INITIAL_KINDS)} is required")
    kind, value = next(iter(doc.items()))
    _require(isinstance(value, (list, tuple)), f"initial.{kind}", "must be a list")
    if kind in ("spinor", "amplitudes"):
        _require(len(value) == 2, f"initial.{kind}", "needs two components")
        pair = tuple(_complex_pair(v, f"initial.{kind}") for v in value)
        norm = math.hypot(abs(pair[0]), abs(pair[1]))
        _require(abs(norm - 1.0) <= 1e-9, f"initial.{kind}", f"must be normalized (norm {norm:.17g})")
        return kind, pair
    if kind == "bloch":
        _require(len(value) == 3, "initial.bloch", "needs three components")
        q = np.array([_number(v, "initial.bloch") for v in value])
        _require(abs(q @ q - 1.0) <= 1e-9, "initial.bloch", "must be a unit vector")
        return kind, tuple(q)
    _require(len(value) == 2, "initial.chart", "needs [q, p]")
    return kind, (_number(value[0], "initial.chart"), _number(value[1], "initial.chart"))


_SCENARIO_INITIAL = {
    "evolve": ("spinor", "bloch"),
    "bloch": ("spinor", "bloch"),
    "classical": ("spinor", "bloch", "chart"),
    "poincare": ("spinor", "bloch", "chart"),
    "exact-tanh": ("amplitudes",),
    "exact-sech": ("amplitudes",),
    "compare": ("amplitudes",),
    "scatter": ("amplitudes",),
}


def config_from_dict(doc: dict) -> RunConfig:
    """Validate a decoded configuration document; fills documented defaults."""
    _keys(doc, _TOP_KEYS, "config")
    doc = copy.deepcopy(doc)
    scenario = doc.get("scenario")
    _require(scenario in SCENARIOS, "scenario", f"must be one of {list(SCENARIOS)}, got {scenario!r}")
    _require("field" in doc, "field", "is required")
    cfg = field_from_dict(doc["field"])

    kind, value = _parse_initial(doc.get("initial"), scenario)
    _require(kind in _SCENARIO_INITIAL[scenario], "initial", f"{kind!r} is not accepted by scenario {scenario!r}")

    tol = _number(doc.setdefault("tolerance", DEFAULT_TOL), "tolerance")
    _require(MIN_TOL < tol < MAX_TOL, "tolerance", f"must lie in ({MIN_TOL:g}, {MAX_TOL:g})")

    grid = None
    if "time" in doc:
        t = doc["time"]
        _keys(t, {"t_start", "t_end", "n_samples"}, "time")
        for key in ("t_start", "t_end", "n_samples"):
            _require(key in t, key, "is required in the time block")
        n = _integer(t["n_samples"], "n_samples")
        _require(n >= 2, "n_samples", f"must be at least 2, got {n}")
        grid = TimeGrid(_number(t["t_start"], "t_start"), _number(t["t_end"], "t_end"), n)
    elif scenario not in ("scatter", "poincare"):
        raise ValidationError("time: required for this scenario")

    out = doc.setdefault("output", {})
    _keys(out, {"path", "format"}, "output")
    fmt = out.setdefault("format", "csv")
    _require(fmt in FORMATS, "output.format", f"must be one of {list(FORMATS)}")
    path = out.setdefault("path", f"tldl_{scenario}.{fmt}")
    _require(isinstance(path, str) and path != "", "output.path", "must be a non-empty string")

    chart_tag = doc.setdefault("chart", 2)
    _require(chart_tag in (1, 2), "chart", "must be 1 or 2")
    chart = Chart(chart_tag)

    poincare = None
    if scenario == "poincare":
        _require("poincare" in doc, "poincare", "block is required for the poincare scenario")
        pb = doc["poincare"]
        _keys(pb, {"n_crossings", "split", "coupling", "theta", "section_angle_index"}, "poincare")
        _require("n_crossings" in pb, "n_crossings", "is required")
        n_cross = _integer(pb["n_crossings"], "n_crossings")
        _require(n_cross >= 1, "n_crossings", "must be at least 1")
        split = pb.get("split", "strong")
        _require(split in ("strong", "weak"), "poincare.split", "must be 'strong' or 'weak'")
        coupling = pb.get("coupling")
        if coupling is not None:
            coupling = _number(coupling, "poincare.coupling")
        theta = tuple(_number(x, "poincare.theta") for x in pb.get("theta", []))
        idx = _integer(pb.get("section_angle_index", 0), "section_angle_index")
        poincare = PoincareSpec(n_cross, CouplingSplit(split), coupling, theta, idx)
    elif "poincare" in doc:
        raise ValidationError("poincare: block only allowed for the poincare scenario")

    match_time = _number(doc.setdefault("match_time", DEFAULT_MATCH_TIME), "match_time")

    if scenario in ("exact-tanh", "exact-sech", "compare", "scatter"):
        need = Sech if scenario == "exact-sech" else (Tanh if scenario == "exact-tanh" else (Tanh, Sech))
        _require(isinstance(cfg.profile, need), "field.profile", f"kind not supported by scenario {scenario!r}")
        _require(cfg.layout.value == "z", "field.layout", "closed-form scenarios need the z layout")

    sweep = None
    if "sweep" in doc:
        sw = doc["sweep"]
        _keys(sw, {"parameter", "values"}, "sweep")
        param = sw.get("parameter")
        _require(isinstance(param, str), "sweep.parameter", "must be a dotted key path")
        values = sw.get("values")
        _require(isinstance(values, list) and len(values) > 0, "sweep.values", "must be a non-empty list")
        values = tuple(_number(v, "sweep.values") for v in values)
        target = _get_path(doc, param)
        _require(
            isinstance(target, (int, float)) and not isinstance(target, bool),
            "sweep.parameter",
            f"{param!r} does not name an existing scalar field",
        )
        sweep = SweepSpec(param, values)

    return RunConfig(
        scenario=scenario,
        field=cfg,
        initial_kind=kind,
        initial_value=value,
        time=grid,
        tolerance=tol,
        output_path=path,
        output_format=fmt,
        chart=chart,
        poincare=poincare,
        match_time=match_time,
        sweep=sweep,
        document=doc,
    )


def parse_config(document: str) -> RunConfig:
    """Parse and validate a JSON configuration text."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("line 1, column 1: top level must be a JSON object")
    return config_from_dict(doc)


def _get_path(doc: dict, dotted: str):
    node: Any = doc
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def _set_path(doc: dict, dotted: str, value, must_exist: bool = False) -> None:
    parts = dotted.split(".")
    node = doc
    for part in parts[:-1]:
        if part not in node:
            node[part] = {}  # absent blocks are created; the schema check runs afterwards
        if not isinstance(node[part], dict):
            raise ValidationError(f"{dotted}: no such configuration block")
        node = node[part]
    if must_exist and parts[-1] not in node:
        raise ValidationError(f"{dotted}: no such configuration key")
    node[parts[-1]] = value


def apply_overrides(doc: dict, assignments: Sequence[str]) -> dict:
    """Apply ``key.path=value`` strings; values are read as JSON when possible."""
    doc = copy.deepcopy(doc)
    for item in assignments:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ParseError(f"--set expects key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        _set_path(doc, key.strip(), value)
    return doc


# ------------------------------------------------------------------ output


@dataclass
class Table:
    columns: list[str]
    rows: list[list]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def render_table(table: Table, fmt: str, meta: dict) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_fmt(x) for x in row])
        return buf.getvalue()

    def jsonable(x):
        if isinstance(x, str):
            return x
        if isinstance(x, (int, np.integer)):
            return int(x)
        x = float(x)
        return x if math.isfinite(x) else None

    doc = {"columns": table.columns, "data": [[jsonable(x) for x in row] for row in table.rows], "meta": meta}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclass
class RunManifest:
    config: dict
    version: str
    started_at: str
    duration_s: float
    diagnostics: dict
    outputs: dict  # path -> sha256
    path: str = ""

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "started_at": self.started_at,
            "duration_s": self.duration_s,
            "diagnostics": self.diagnostics,
            "outputs": self.outputs,
        }


def manifest_path(output_path: str) -> str:
    p = Path(output_path)
    return str(p.with_name(p.stem + ".manifest.json"))


# --------------------------------------------------------------- scenarios


def _initial_spinor(rc: RunConfig) -> Spinor:
    if rc.initial_kind in ("spinor", "amplitudes"):
        return Spinor(*rc.initial_value)
    if rc.initial_kind == "bloch":
        return spinor_from_bloch(np.array(rc.initial_value))
    raise ValidationError(f"initial: {rc.initial_kind!r} cannot be turned into a spinor")


def _initial_spin(rc: RunConfig) -> np.ndarray:
    if rc.initial_kind == "bloch":
        return np.array(rc.initial_value)
    if rc.initial_kind == "chart":
        from .classical import spin_from_chart

        return spin_from_chart(ChartState(rc.chart, *rc.initial_value))
    return bloch_from_spinor(_initial_spinor(rc), tol=1e-9).q


def _spinor_rows(ts, states) -> list[list]:
    norms = np.sqrt(np.sum(np.abs(states) ** 2, axis=1))
    return [[t, s[0].real, s[0].imag, s[1].real, s[1].imag, n] for t, s, n in zip(ts, states, norms)]


def _stats_dict(stats) -> dict:
    return {"n_steps": stats.n_steps, "n_rhs": stats.n_rhs, "max_error_estimate": stats.max_error}


def _pulse_params(rc: RunConfig):
    prof = rc.field.profile
    if isinstance(prof, Tanh):
        params = TanhSolutionParams.from_field(rc.field)
    else:
        params = SechSolutionParams.from_field(rc.field)
    c_p, c_q = rc.initial_value
    return match_pulse(params, c_p, c_q)


def _run_evolve(rc: RunConfig):
    ts = rc.time.samples()
    tr = evolve_schrodinger(rc.field, _initial_spinor(rc), rc.time.t_start, rc.time.t_end, rc.tolerance, t_eval=ts)
    diag = {"norm_drift": tr.norm_drift, **_stats_dict(tr.stats)}
    return {"": Table(SCHEMAS["spinor"], _spinor_rows(tr.times, tr.states))}, diag


def _run_bloch(rc: RunConfig):
    ts = rc.time.samples()
    tr = evolve_bloch(rc.field, _initial_spin(rc), rc.time.t_start, rc.time.t_end, rc.tolerance, t_eval=ts)
    rows = [[t, *q] for t, q in zip(tr.times, tr.q)]
    return {"": Table(SCHEMAS["bloch"], rows)}, {"purity_drift": tr.purity_drift, **_stats_dict(tr.stats)}


def _run_classical(rc: RunConfig):
    ts = rc.time.samples()
    s0 = chart_from_spin(_initial_spin(rc), rc.chart) if rc.initial_kind != "chart" else ChartState(rc.chart, *rc.initial_value)
    tr = hamilton_flow(rc.field, rc.chart, s0, rc.time.t_start, rc.time.t_end, rc.tolerance, t_eval=ts)
    rows = [[t, q, p, e] for t, q, p, e in zip(tr.times, tr.q, tr.p, tr.energy)]
    diag = {"pole_switches": tr.n_switches, "energy_span": float(np.ptp(tr.energy)), **_stats_dict(tr.stats)}
    if isinstance(rc.field.profile, Constant):
        diag["energy_drift"] = float(np.max(np.abs(tr.energy - tr.energy[0])))
    return {"": Table(SCHEMAS["classical"], rows)}, diag


def _run_poincare(rc: RunConfig):
    spec = rc.poincare
    desc = extend_howland(rc.field, rc.chart, spec.split, spec.coupling)
    s0 = chart_from_spin(_initial_spin(rc), rc.chart) if rc.initial_kind != "chart" else ChartState(rc.chart, *rc.initial_value)
    theta = spec.theta or (0.0,) * desc.n_angles
    _require(len(theta) == desc.n_angles, "poincare.theta", f"needs {desc.n_angles} angle(s)")
    pts = poincare_section(desc, ExtendedState(s0, theta), spec.n_crossings, spec.section_angle_index, rc.tolerance)
    rows = [[pt.q, pt.p, pt.theta2, pt.crossing_index] for pt in pts]
    diag = {"q_spread": section_spread(pts), "n_crossings": len(pts), "coupling": desc.coupling, "split": desc.split.value}
    return {"": Table(SCHEMAS["section"], rows)}, diag


def _run_exact(rc: RunConfig):
    params = _pulse_params(rc)
    cf = ClosedForm(params)
    ts = rc.time.samples()
    states = np.array([cf.spinor(t).to_array() for t in ts])
    probe = np.linspace(rc.time.t_start, rc.time.t_end, min(21, rc.time.n_samples))
    resid = max(abs(second_order_residual(cf, cf.config, t)) for t in probe)
    diag = {"max_residual": float(resid), "c1": [params.c1.real, params.c1.imag], "c2": [params.c2.real, params.c2.imag]}
    return {"": Table(SCHEMAS["spinor"], _spinor_rows(ts, states))}, diag


def _run_scatter(rc: RunConfig):
    params = _pulse_params(rc)
    rows = []
    defect = 0.0
    for state in ("lower", "upper"):
        p, s = scattering_probabilities(params, state)
        rows.append([state, p, s])
        defect = max(defect, abs(p + s - 1.0))
    return {"": Table(SCHEMAS["scatter"], rows)}, {"probability_sum_defect": defect}


def _run_compare(rc: RunConfig):
    params = _pulse_params(rc)
    cf = ClosedForm(params)
    ts = rc.time.samples()
    t_match = rc.match_time * params.T
    _require(t_match <= min(ts[0], ts[-1]), "match_time", "must not lie after the sampled window")
    psi0 = cf.spinor(t_match)
    t_far = max(ts[0], ts[-1])
    tr = evolve_schrodinger(rc.field, psi0, t_match, t_far, rc.tolerance, t_eval=np.sort(ts))
    order = np.argsort(np.argsort(ts))  # map back to the requested order
    numeric = tr.states[order]
    exact = np.array([cf.spinor(t).to_array() for t in ts])
    err1 = np.abs(exact[:, 0] - numeric[:, 0])
    err2 = np.abs(exact[:, 1] - numeric[:, 1])
    rows = [
        [t, e.real, e.imag, n.real, n.imag, d] for t, e, n, d in zip(ts, exact[:, 0], numeric[:, 0], err1)
    ]
    summary = [
        ["psi1", float(err1.max()), float(err1.mean())],
        ["psi2", float(err2.max()), float(err2.mean())],
    ]
    diag = {"max_abs_err": float(err1.max()), "max_abs_err_psi2": float(err2.max()), "norm_drift": tr.norm_drift, **_stats_dict(tr.stats)}
    return {"": Table(SCHEMAS["compare"], rows), "_summary": Table(SCHEMAS["compare_summary"], summary)}, diag


_RUNNERS = {
    "evolve": _run_evolve,
    "bloch": _run_bloch,
    "classical": _run_classical,
    "poincare": _run_poincare,
    "exact-tanh": _run_exact,
    "exact-sech": _run_exact,
    "scatter": _run_scatter,
    "compare": _run_compare,
}


def run(config: RunConfig) -> RunManifest:
    """Execute a single (non-sweep) configuration, write outputs and manifest."""
    if config.sweep is not None:
        raise ValidationError("sweep: use run_sweep for configurations with a sweep block")
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    log.info("running %s -> %s", config.scenario, config.output_path)
    try:
        tables, diagnostics = _RUNNERS[config.scenario](config)
    except TwoLevelError as exc:
        raise type(exc)(f"scenario {config.scenario!r}: {exc}") from exc

    base = Path(config.output_path)
    base.parent.mkdir(parents=True, exist_ok=True)
    meta = {"scenario": config.scenario, "version": __version__}
    digests = {}
    for suffix, table in tables.items():
        path = base.with_name(base.stem + suffix + base.suffix) if suffix else base
        path.write_text(render_table(table, config.output_format, meta))
        digests[str(path)] = _digest(path)
        log.debug("wrote %s (%d rows)", path, len(table.rows))

    manifest = RunManifest(
        config=config.document,
        version=__version__,
        started_at=started,
        duration_s=time.perf_counter() - t0,
        diagnostics=_clean(diagnostics),
        outputs=digests,
    )
    mpath = Path(manifest_path(config.output_path))
    mpath.write_text(json.dumps(manifest.to_dict(), indent=1, sort_keys=True) + "\n")
    manifest.path = str(mpath)
    log.info("manifest %s", mpath)
    return manifest


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _run_document(doc: dict) -> RunManifest:
    return run(config_from_dict(doc))


def run_sweep(config: RunConfig, jobs: int = 1) -> list[RunManifest]:
    """Run every sweep child (at most ``jobs`` at a time); results in sweep order."""
    children = config.children()
    if jobs <= 1 or len(children) == 1:
        return [run(c) for c in children]
    docs = [c.document for c in children]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_document, docs))


# -------------------------------------------------------------------- main


def _setup_logging() -> None:
    level = os.environ.get("TLDL_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(levels.get(level, logging.ERROR))
    log.propagate = False


def _special_probe(argv: Sequence[str]) -> int:
    ap = argparse.ArgumentParser(prog="tldl special-probe")
    ap.add_argument("--a", type=complex, required=True)
    ap.add_argument("--b", type=complex, required=True)
    ap.add_argument("--c", type=complex, required=True)
    ap.add_argument("--z-re", type=float, required=True)
    ap.add_argument("--z-im", type=float, default=0.0)
    args = ap.parse_args(argv)
    z = complex(args.z_re, args.z_im)
    try:
        value = hyp2f1(HypParams(args.a, args.b, args.c), z)
        out = {"hyp2f1": [value.real, value.imag]}
        for name, arg in (("a", args.a), ("b", args.b), ("c", args.c), ("z", z)):
            try:
                g = lngamma(arg)
                out[f"lngamma_{name}"] = [g.real, g.imag]
            except TwoLevelError:
                out[f"lngamma_{name}"] = None
    except TwoLevelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tldl", description="Driven two-level system simulations.")
    ap.add_argument("scenario", nargs="?", choices=SCENARIOS, help="override the config's scenario")
    ap.add_argument("--config", required=True, help="path to a JSON run configuration")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                    help="override a configuration value by dotted key path (repeatable)")
    ap.add_argument("--jobs", type=int, default=1, help="parallel sweep children")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    _setup_logging()
    if argv and argv[0] == "special-probe":
        return _special_probe(argv[1:])
    args = build_parser().parse_args(argv)
    try:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"{args.config}: cannot read ({exc.strerror})") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.config}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise ParseError(f"{args.config}: top level must be a JSON object")
        doc = apply_overrides(doc, args.overrides)
        if args.scenario:
            doc["scenario"] = args.scenario
        config = config_from_dict(doc)
        if args.jobs < 1:
            raise ValidationError("--jobs: must be at least 1")
        manifests = run_sweep(config, args.jobs)
    except ConfigError as exc:
        print(f"tldl: configuration error: {exc}", file=sys.stderr)
        return 2
    except (TwoLevelError, OSError, ValueError, ArithmeticError) as exc:
        log.debug("run failed", exc_info=True)
        print(f"tldl: run failed: {exc}", file=sys.stderr)
        return 1
    for m in manifests:
        log.info("done: %s", m.path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
