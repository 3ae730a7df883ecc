"""Parameter sweeps, grid-search design optimisation and model/experiment residuals.

Sweeps and searches work on the raw configuration mapping (CLI units), so a
swept value passes through exactly the same conversion and defaulting as a
value typed into a config file.
"""

from __future__ import annotations

import copy
import csv
import enum
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import picking
from .config import parse_config
from .cycle import Scenario, simulate_cycle
from .errors import DomainError, GripperError, InfeasibleError
from .film import DEFAULT_STATIONS, effective_area
from .pneumatics import pressure_drop

log = logging.getLogger(__name__)

RANGE_METRICS = ("d_min_mm", "d_max_mm", "deployment_ratio", "reynolds", "pressure_drop_kPa")
FORCE_METRICS = ("F_b_N", "F_s_N", "F_pick_N")
METRICS = RANGE_METRICS + FORCE_METRICS + ("area_mm2", "cycle_time_s")


def set_parameter(raw: dict, name: str, value) -> dict:
    """Copy of ``raw`` with the dotted key ``name`` (e.g. ``line.flow_rate``) set."""
    section, _, key = name.partition(".")
    if not key:
        raise DomainError(f"parameter '{name}' must look like section.key")
    out = copy.deepcopy(raw) if raw else {}
    sec = dict(out.get(section) or {})
    sec[key] = value
    out[section] = sec
    return out


def evaluate_metrics(raw: dict, metrics, stations: int = DEFAULT_STATIONS) -> dict:
    """Metric values (CLI units) for one configuration mapping."""
    cfg = parse_config(raw)
    design, line = cfg.design, cfg.line
    stations = cfg.stations or stations
    out = {}
    need_range = any(m in RANGE_METRICS for m in metrics)
    if need_range:
        flow = pressure_drop(line)
        out["reynolds"] = flow.reynolds
        out["pressure_drop_kPa"] = flow.pressure_drop / 1e3
        rng = picking.picking_range(design, line)
        out["d_min_mm"] = rng.d_min * 1e3
        out["d_max_mm"] = rng.d_max * 1e3
        out["deployment_ratio"] = rng.deployment_ratio
    if any(m in FORCE_METRICS for m in metrics):
        if cfg.object is None:
            raise DomainError("force metrics need object.distance")
        pt = picking.force_profile(design, line, [cfg.object.distance], stations)[0]
        out["F_b_N"] = pt.body_force_max
        out["F_s_N"] = pt.cup_force_max
        out["F_pick_N"] = pt.picking_force
    if "area_mm2" in metrics:
        length = cfg.object.distance - design.fixed_height if cfg.object else design.free_length
        out["area_mm2"] = effective_area(design, length, stations) * 1e6
    if "cycle_time_s" in metrics:
        if cfg.scenario is None:
            raise DomainError("cycle_time_s needs an object section")
        out["cycle_time_s"] = simulate_cycle(design, line, cfg.scenario, stations).cycle_time
    return {m: out[m] for m in metrics}


@dataclass(frozen=True)
class SweepSpec:
    axis1: tuple  # (parameter name, grid)
    axis2: tuple
    outputs: tuple = ("d_min_mm", "d_max_mm", "deployment_ratio")

    def __post_init__(self):
        for name, grid in (self.axis1, self.axis2):
            if len(grid) == 0:
                raise DomainError(f"grid for '{name}' is empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise DomainError(f"grid for '{name}' must be strictly increasing")
        if not self.outputs:
            raise DomainError("no metrics requested")
        for m in self.outputs:
            if m not in METRICS:
                raise DomainError(f"unknown metric '{m}'; choose from {', '.join(METRICS)}")


def _sweep_point(args):
    raw, spec, a, b, stations = args
    point = set_parameter(set_parameter(raw, spec.axis1[0], a), spec.axis2[0], b)
    metrics = sorted(spec.outputs)
    try:
        vals = evaluate_metrics(point, metrics, stations)
        return [(m, vals[m]) for m in metrics], None
    except GripperError as exc:
        return [(m, math.nan) for m in metrics], f"{spec.axis1[0]}={a}, {spec.axis2[0]}={b}: {exc}"


def sweep(spec: SweepSpec, raw: dict | None = None, stations: int = DEFAULT_STATIONS,
          workers: int = 1) -> list[tuple]:
    """Long-format rows (axis1 value, axis2 value, metric, value).

    Failing grid points yield NaN for every metric and a logged warning.
    """
    raw = raw or {}
    jobs = [(raw, spec, a, b, stations) for a in spec.axis1[1] for b in spec.axis2[1]]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    rows = []
    for (_, _, a, b, _), (vals, warning) in zip(jobs, results):
        if warning:
            log.warning("sweep point failed, emitting NaN: %s", warning)
        rows.extend((a, b, m, v) for m, v in vals)
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


class Objective(str, enum.Enum):
    MAX_RANGE = "max_range"
    MAX_FORCE_AT_DISTANCE = "max_force_at_distance"


@dataclass(frozen=True)
class OptimizeSpec:
    """Grid search over wire diameter (mm), spring constant (N/m) and flow (L/min).

    Each entry of ``space`` is either an explicit list of values or a
    ``(low, high)`` pair expanded to ``points`` values. A missing spring
    constant axis follows the measured springs, or the quartic wire-diameter
    law from the base spring for unmeasured diameters.
    """

    objective: Objective = Objective.MAX_RANGE
    required_force: float | None = None  # N
    max_d_min: float | None = None  # mm
    distance: float | None = None  # mm; force evaluation point, mid-range if None
    space: dict = field(default_factory=dict)
    points: int = 20

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        for key, axis in self.space.items():
            if key not in ("wire_diameter", "spring_constant", "flow_rate"):
                raise DomainError(f"unknown search axis '{key}'")
            if isinstance(axis, dict):
                lo, hi = axis["min"], axis["max"]
                if lo > hi:
                    raise DomainError(f"search bounds for '{key}' are not ordered")
        if self.objective is Objective.MAX_FORCE_AT_DISTANCE and self.distance is None:
            raise DomainError("max_force_at_distance needs a distance")

    def grid(self, key: str, base: float) -> list[float]:
        axis = self.space.get(key)
        if axis is None:
            return [base]
        if isinstance(axis, dict):
            lo, hi = float(axis["min"]), float(axis["max"])
            if lo == hi:
                return [lo]
            return [float(x) for x in np.linspace(lo, hi, self.points)]
        return sorted(float(x) for x in axis)


@dataclass(frozen=True)
class Candidate:
    wire_diameter: float
    spring_constant: float
    flow_rate: float
    metrics: dict
    margins: dict
    objective: float

    @property
    def feasible(self) -> bool:
        return all(v >= 0 for v in self.margins.values())


def _candidate_raw(raw, base_cfg, t, k, q):
    point = set_parameter(raw, "outer_spring.wire_diameter", t)
    if k is None:
        from .core import OUTER_SPRING_CONSTANTS, OUTER_WIRE_DIAMETERS
        for tm, km in zip(OUTER_WIRE_DIAMETERS, OUTER_SPRING_CONSTANTS):
            if math.isclose(tm * 1e3, t, rel_tol=1e-6):
                k = km
        if k is None:
            s = base_cfg.design.outer_spring
            k = s.spring_constant * (t * 1e-3 / s.wire_diameter) ** 4
    point = set_parameter(point, "outer_spring.spring_constant", k)
    return set_parameter(point, "line.flow_rate", q), k


def _evaluate_candidate(args):
    raw, base_cfg, spec, t, k, q, stations = args
    point, k = _candidate_raw(raw, base_cfg, t, k, q)
    cfg = parse_config(point)
    metrics, margins = {}, {}
    try:
        rng = picking.picking_range(cfg.design, cfg.line)
    except GripperError as exc:
        return Candidate(t, k, q, {"error": str(exc)}, {"deploys": -1.0}, -math.inf)
    metrics["d_min_mm"] = rng.d_min * 1e3
    metrics["d_max_mm"] = rng.d_max * 1e3
    metrics["range_mm"] = (rng.d_max - rng.d_min) * 1e3
    x = spec.distance * 1e-3 if spec.distance is not None else 0.5 * (rng.d_min + rng.d_max)
    force = None
    if spec.required_force is not None or spec.objective is Objective.MAX_FORCE_AT_DISTANCE:
        metrics["force_distance_mm"] = x * 1e3
        if rng.d_min <= x <= rng.d_max:
            pt = picking.force_point(cfg.design, cfg.line, x, stations)
            force = pt.picking_force
            metrics["F_pick_N"] = force
            metrics["F_s_N"] = pt.cup_force_max
            metrics["limiting"] = pt.limiting.value
        else:
            force = -math.inf
            metrics["F_pick_N"] = math.nan
            margins["in_range"] = -1.0
    if spec.required_force is not None:
        margins["required_force"] = force - spec.required_force
    if spec.max_d_min is not None:
        margins["max_d_min"] = spec.max_d_min - metrics["d_min_mm"]
    obj = metrics["range_mm"] if spec.objective is Objective.MAX_RANGE else force
    return Candidate(t, k, q, metrics, margins, obj)


def optimize(spec: OptimizeSpec, raw: dict | None = None, stations: int = DEFAULT_STATIONS,
             workers: int = 1) -> Candidate:
    """Exhaustive search; ties go to the smaller wire diameter, then smaller flow."""
    raw = raw or {}
    base = parse_config(raw)
    s = base.design.outer_spring
    ts = spec.grid("wire_diameter", s.wire_diameter * 1e3)
    ks = spec.grid("spring_constant", None) if "spring_constant" in spec.space else [None]
    qs = spec.grid("flow_rate", base.line.flow_rate * 60000.0)
    jobs = [(raw, base, spec, t, k, q, stations) for t, k, q in itertools.product(ts, ks, qs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cands = list(pool.map(_evaluate_candidate, jobs))
    else:
        cands = [_evaluate_candidate(j) for j in jobs]

    feasible = [c for c in cands if c.feasible]
    if not feasible:
        raise InfeasibleError(*_binding(spec, cands, base))
    feasible.sort(key=lambda c: (-c.objective, c.wire_diameter, c.flow_rate, c.spring_constant))
    return feasible[0]


def _binding(spec: OptimizeSpec, cands, base) -> tuple[str, str]:
    names = sorted({n for c in cands for n, v in c.margins.items() if v < 0})
    always = [n for n in names if all(c.margins.get(n, 0) < 0 for c in cands)]
    name = (always or names or ["unknown"])[0]
    if name == "required_force":
        cap = base.design.suction_cup_effective_area * -base.line.vacuum_gauge
        if spec.required_force > cap:
            return (f"required force {spec.required_force:.1f} N exceeds the suction-cup holding "
                    f"limit {cap:.1f} N (cup-limited)", "cup_limit")
        best = max((c.metrics.get("F_pick_N", -math.inf) for c in cands), default=math.nan)
        return (f"required force {spec.required_force:.1f} N exceeds the best achievable "
                f"{best:.1f} N", "required_force")
    if name == "max_d_min":
        best = min(c.metrics.get("d_min_mm", math.inf) for c in cands)
        return f"max_d_min {spec.max_d_min:.1f} mm is below the smallest d_min {best:.1f} mm", name
    if name == "in_range":
        return "force evaluation distance lies outside every candidate's picking range", name
    return "no candidate design can deploy", "deploys"


def _norm_key(value: str):
    try:
        return float(f"{float(value):.9g}")
    except ValueError:
        return value.strip()


def residuals(model_rows: list[dict], experiment_rows: list[dict], keys, value: str = "value"):
    """Per-row (keys, model, experiment, residual) plus per-group error summary.

    Every experiment row must find a model row with equal keys; extra model
    rows are ignored. Summaries are grouped by ``metric`` when that column is
    part of the keys.
    """
    keys = list(keys)
    index = {}
    for r in model_rows:
        index[tuple(_norm_key(r[k]) for k in keys)] = r
    missing = []
    out = []
    for r in experiment_rows:
        kk = tuple(_norm_key(r[k]) for k in keys)
        if kk not in index:
            missing.append(kk)
            continue
        mv, ev = float(index[kk][value]), float(r[value])
        out.append((tuple(r[k] for k in keys), mv, ev, mv - ev))
    if missing:
        raise KeyError(missing)
    groups = {}
    gi = keys.index("metric") if "metric" in keys else None
    for kv, _, _, res in out:
        g = kv[gi] if gi is not None else "all"
        groups.setdefault(g, []).append(abs(res))
    summary = {g: (max(v), sum(v) / len(v)) for g, v in sorted(groups.items())}
    return out, summary


def read_csv(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        return list(reader.fieldnames or []), rows
