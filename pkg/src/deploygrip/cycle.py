"""Quasi-static simulation of one pick-and-place cycle.

The connected gas volume (body, air tube, cup, hoses) is a single isothermal
node. The pump removes a constant volumetric flow down to its vacuum limit.
Atmospheric air enters through the open cup with a square-root pressure law
calibrated so that inflow and pump balance in mass exactly at the line loss
of :func:`deploygrip.pneumatics.pressure_drop`, which makes the steady
deployed length match :func:`deploygrip.picking.max_distance`.

The spring length follows the force balance at every step; there is no
inertia. While deploying the body pulls with its full area, once sealed with
the area left free of adhered film, as in :mod:`deploygrip.picking`.
"""

from __future__ import annotations

import bisect
import enum
import functools
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .core import GripperDesign, ObjectSpec, PneumaticLine
from .errors import DomainError, NumericError
from .film import DEFAULT_STATIONS, effective_area_fraction
from .pneumatics import pressure_drop

DISCHARGE_COEFFICIENT = 0.61
AREA_TABLE_STEP = 2e-3  # m between tabulated effective-area fractions
READY_BAND = 500.0  # Pa below atmosphere at which the vented cup counts as released
SETTLE_WINDOW = 0.05  # s without a 1 Pa pressure change that counts as steady


class CyclePhase(str, enum.Enum):
    READY_TO_PICK = "ready_to_pick"
    DEPLOYING = "deploying"
    SEALED_RETRACTING = "sealed_retracting"
    HOLDING = "holding"
    RELEASING = "releasing"


LEGAL_TRANSITIONS = {
    (CyclePhase.READY_TO_PICK, CyclePhase.DEPLOYING),
    (CyclePhase.DEPLOYING, CyclePhase.SEALED_RETRACTING),
    (CyclePhase.SEALED_RETRACTING, CyclePhase.HOLDING),
    (CyclePhase.HOLDING, CyclePhase.RELEASING),
    (CyclePhase.RELEASING, CyclePhase.READY_TO_PICK),
}


class Outcome(str, enum.Enum):
    PICKED = "picked"
    DROPPED = "dropped"
    NO_CONTACT = "no_contact"


@dataclass(frozen=True)
class Scenario:
    """One pick attempt.

    ``valve_switch_times`` holds the pick switch and, optionally, the release
    switch. Without a release time the valve releases ``hold_time`` after
    the holding phase is reached.
    """

    object: ObjectSpec
    valve_switch_times: tuple = (0.0, None)
    seal_leak_area: float = 0.0
    timestep: float = 1e-3
    hold_time: float = 0.1
    dead_volume: float = 10e-6  # m^3: hoses, end-caps, cup at solid length
    cup_volume: float = 2e-6  # m^3: cup and air tube vented on release
    max_time: float = 10.0

    @property
    def pick_time(self) -> float:
        return float(self.valve_switch_times[0])

    @property
    def release_time(self):
        times = tuple(self.valve_switch_times)
        return None if len(times) < 2 or times[1] is None else float(times[1])


@dataclass
class CycleTrace:
    t: np.ndarray
    phase: list
    body_pressure: np.ndarray
    cup_pressure: np.ndarray
    length: np.ndarray
    body_force: np.ndarray
    outcome: Outcome
    cycle_time: float
    drop_reason: str | None = None
    events: dict = field(default_factory=dict)

    def digest(self) -> str:
        h = hashlib.sha256()
        for arr in (self.t, self.body_pressure, self.cup_pressure, self.length, self.body_force):
            h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
        h.update("|".join(p.value for p in self.phase).encode())
        h.update(f"{self.outcome.value}|{self.cycle_time!r}|{self.drop_reason}".encode())
        return h.hexdigest()

    def rows(self, atmospheric_pressure: float):
        """CSV rows: t_s, phase, P_b_kPa, P_s_kPa, l_mm, F_b_N (gauge pressures)."""
        for i in range(len(self.t)):
            yield (self.t[i], self.phase[i].value,
                   (self.body_pressure[i] - atmospheric_pressure) / 1e3,
                   (self.cup_pressure[i] - atmospheric_pressure) / 1e3,
                   self.length[i] * 1e3, self.body_force[i])


@dataclass(frozen=True)
class CycleSummary:
    outcomes: tuple
    cycle_times: tuple
    min_body_pressure: tuple
    max_cup_pressure: tuple
    digests: tuple

    @property
    def identical(self) -> bool:
        return len(set(self.digests)) == 1


class _AreaTable:
    """Effective-area fraction tabulated over the stroke, linear in between."""

    def __init__(self, design: GripperDesign, stations: int):
        lo, hi = design.solid_length, design.free_length
        n = max(2, math.ceil((hi - lo) / AREA_TABLE_STEP))
        self.x = [lo + (hi - lo) * i / n for i in range(n + 1)]
        self.y = [effective_area_fraction(design, x, stations) for x in self.x]

    def __call__(self, length: float) -> float:
        x = self.x
        if length <= x[0]:
            return self.y[0]
        if length >= x[-1]:
            return self.y[-1]
        i = bisect.bisect_right(x, length) - 1
        w = (length - x[i]) / (x[i + 1] - x[i])
        return self.y[i] + w * (self.y[i + 1] - self.y[i])


@functools.lru_cache(maxsize=64)
def _area_table(design: GripperDesign, stations: int) -> _AreaTable:
    return _AreaTable(design, stations)


class _LiftCurve:
    """Gas content versus length while a lifted load retracts.

    Along the curve the body pull balances spring plus load, so pressure and
    length are tied; content P*V grows monotonically with length, which lets
    a step invert content to (P, l) by table lookup.
    """

    def __init__(self, model: "_Model", load: float, top: float, nodes: int = 400):
        lo = model.solid
        self._volume = model.volume
        self._flat = top <= lo
        if self._flat:
            # nothing left to retract: the body already sits at solid length
            self.l = [lo]
            return
        self.l = [lo + (top - lo) * i / nodes for i in range(nodes + 1)]
        self.p = [model.lift_pressure(x, load) for x in self.l]
        self.m = [p * model.volume(x) for p, x in zip(self.p, self.l)]

    def invert(self, m: float) -> tuple[float, float]:
        if self._flat:
            return m / self._volume(self.l[0]), self.l[0]
        i = bisect.bisect_right(self.m, m) - 1
        i = min(max(i, 0), len(self.m) - 2)
        w = (m - self.m[i]) / (self.m[i + 1] - self.m[i])
        length = self.l[i] + w * (self.l[i + 1] - self.l[i])
        return m / self._volume(length), length


class _Model:
    def __init__(self, design: GripperDesign, line: PneumaticLine, scenario: Scenario, stations: int):
        self.design = design
        self.line = line
        self.sc = scenario
        self.patm = line.atmospheric_pressure
        self.pvac = line.vacuum_pressure
        self.k = design.stiffness
        self.L = design.free_length
        self.solid = design.solid_length
        self.Ab = design.body_effective_area_full
        self.As = design.suction_cup_effective_area
        self.Q = line.flow_rate
        self.dp_ref = pressure_drop(line).pressure_drop
        # atmospheric-volume inflow at dp_ref that carries the pump's mass flow
        self.q_in = self.Q * (self.patm - self.dp_ref) / self.patm
        self.frac = _area_table(design, stations)
        self.v0 = scenario.dead_volume

    def volume(self, length: float) -> float:
        return self.v0 + self.Ab * (length - self.solid)

    def inflow(self, p: float) -> float:
        """Volumetric inflow (atmospheric conditions) through the open cup."""
        return self.q_in * math.sqrt(max(self.patm - p, 0.0) / self.dp_ref)

    def leak(self, p: float) -> float:
        a = self.sc.seal_leak_area
        if a <= 0.0:
            return 0.0
        return DISCHARGE_COEFFICIENT * a * math.sqrt(2.0 * max(self.patm - p, 0.0) / self.line.air_density)

    def pump(self, p: float) -> float:
        return self.Q if p > self.pvac else 0.0

    def free_length_at(self, p: float, top: float) -> float:
        """Unsealed equilibrium length with the full body area."""
        x = self.L - (self.patm - p) * self.Ab / self.k
        return min(max(x, self.solid), top)

    def pull(self, p: float, length: float) -> float:
        return (self.patm - p) * self.Ab * self.frac(length) - self.k * (self.L - length)

    def lift_pressure(self, length: float, load: float) -> float:
        return self.patm - (load + self.k * (self.L - length)) / (self.Ab * self.frac(length))

    def deploy_state(self, m: float, top: float) -> tuple[float, float]:
        """(P, l) with content ``m`` while unsealed; the length follows P."""
        p_solid = self.patm - self.k * (self.L - self.solid) / self.Ab
        if p_solid > 0 and m <= p_solid * self.volume(self.solid):
            return m / self.volume(self.solid), self.solid
        p_top = self.patm - self.k * (self.L - top) / self.Ab
        v_top = self.volume(top)
        if m >= p_top * v_top:
            return m / v_top, top
        # V = a + b P on the free segment; solve b P^2 + a P - m = 0
        b = self.Ab * self.Ab / self.k
        a = self.v0 + self.Ab * (self.L - self.solid) - self.patm * b
        p = 2.0 * m / (a + math.sqrt(a * a + 4.0 * b * m))
        return p, self.free_length_at(p, top)

    def unloaded_length(self, p: float) -> float:
        """Sealed equilibrium length without load (body pull equals spring)."""
        lo, hi = self.solid, self.L
        if self.pull(p, lo) >= 0.0:
            return lo
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if self.pull(p, mid) >= 0.0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)


def simulate_cycle(design: GripperDesign, line: PneumaticLine, scenario: Scenario,
                   stations: int = DEFAULT_STATIONS) -> CycleTrace:
    if not scenario.timestep > 0:
        raise DomainError("timestep must be positive")
    if scenario.seal_leak_area < 0:
        raise DomainError("seal_leak_area must be non-negative")
    if not scenario.object.distance > 0:
        raise DomainError("object distance must be positive")
    if not line.flow_rate > 0:
        raise DomainError("the pump flow rate must be positive to run a cycle")

    M = _Model(design, line, scenario, stations)
    dt = scenario.timestep
    load = scenario.object.weight
    l_obj = scenario.object.distance - design.fixed_height
    top = min(max(l_obj, M.solid), M.L)
    t_pick = scenario.pick_time
    t_rel_fixed = scenario.release_time

    ts, phases, pbs, pss, ls, fbs = [], [], [], [], [], []

    def record(t, ph, pb, ps, length):
        if not (math.isfinite(pb) and math.isfinite(ps) and math.isfinite(length)):
            raise NumericError(f"non-finite state at step {len(ts)}", step=len(ts))
        ts.append(t)
        phases.append(ph)
        pbs.append(pb)
        pss.append(ps)
        ls.append(length)
        fbs.append(max(M.pull(pb, length), 0.0))

    phase = CyclePhase.READY_TO_PICK
    pb = M.pvac
    ps = M.patm
    length = M.unloaded_length(pb)
    m = pb * M.volume(length)
    lifted = False
    outcome = None
    drop_reason = None
    events = {}
    t_hold = None
    t_release = None
    curve = None
    settle_ref = (pb, 0.0)
    step = 0
    t = 0.0

    while True:
        record(t, phase, pb, ps, length)
        if phase is CyclePhase.READY_TO_PICK and "released" in events:
            break
        step += 1
        t = step * dt
        if t > t_pick + scenario.max_time:
            raise NumericError(f"cycle did not finish within {scenario.max_time} s", step=step)

        if phase is CyclePhase.READY_TO_PICK:
            if t >= t_pick:
                phase = CyclePhase.DEPLOYING
                events["valve_pick"] = t
            continue

        if phase is CyclePhase.DEPLOYING:
            rate = M.patm * M.inflow(pb) - pb * M.pump(pb)
            m = max(m + dt * rate, M.pvac * M.volume(M.solid))
            pb, length = M.deploy_state(m, top)
            if pb < M.pvac:
                pb = M.pvac
                m = pb * M.volume(length)
            if length >= l_obj - 1e-9:
                phase = CyclePhase.SEALED_RETRACTING
                events["seal"] = t
                ps = pb
                settle_ref = (pb, t)
            elif abs(pb - settle_ref[0]) > 1.0:
                settle_ref = (pb, t)
            elif t - settle_ref[1] >= SETTLE_WINDOW:
                outcome = Outcome.NO_CONTACT
                record(t, phase, pb, ps, length)
                break
            continue

        if phase is CyclePhase.SEALED_RETRACTING:
            rate = M.patm * M.leak(pb) - pb * M.pump(pb)
            m = m + dt * rate
            if not lifted:
                pb = m / M.volume(length)
                pb = min(max(pb, M.pvac), M.patm)
                m = pb * M.volume(length)
                cup = (M.patm - pb) * M.As
                pull = M.pull(pb, length)
                # the cup carries the body pull until the load comes off the ground
                if min(max(pull, 0.0), load) > cup:
                    outcome = Outcome.DROPPED
                    drop_reason = "cup_limited"
                    events["detach"] = t
                    ps = pb
                    record(t, phase, pb, ps, length)
                    break
                if pull >= load:
                    lifted = True
                    events["lift"] = t
                    curve = _LiftCurve(M, load, length)
            else:
                pb, length = curve.invert(m)
                if length <= M.solid:
                    length = M.solid
                    pb = m / M.volume(length)
                if pb < M.pvac:
                    pb = M.pvac
                    m = pb * M.volume(length)
                if (M.patm - pb) * M.As < load:
                    outcome = Outcome.DROPPED
                    drop_reason = "cup_limited"
                    events["detach"] = t
                    ps = pb
                    record(t, phase, pb, ps, length)
                    break
            ps = pb
            if abs(pb - settle_ref[0]) > 1.0:
                settle_ref = (pb, t)
            if pb <= M.pvac or t - settle_ref[1] >= SETTLE_WINDOW:
                phase = CyclePhase.HOLDING
                t_hold = t
                events["holding"] = t
                if not lifted:
                    outcome = Outcome.DROPPED
                    drop_reason = "cup_limited" if (M.patm - pb) * M.As < load else "body_limited"
                else:
                    outcome = Outcome.PICKED
            continue

        if phase is CyclePhase.HOLDING:
            rate = M.patm * M.leak(pb) - pb * M.pump(pb)
            pb = min(max(pb + dt * rate / M.volume(length), M.pvac), M.patm)
            ps = pb
            due = t_rel_fixed if t_rel_fixed is not None else t_hold + scenario.hold_time
            if t >= due:
                phase = CyclePhase.RELEASING
                t_release = t
                events["valve_release"] = t
            continue

        if phase is CyclePhase.RELEASING:
            # cup vents to atmosphere; body stays on the pump and contracts unloaded
            ms = ps * scenario.cup_volume + dt * M.patm * M.inflow(ps)
            ps = min(ms / scenario.cup_volume, M.patm)
            pb = M.pvac
            length = M.unloaded_length(pb)
            if ps >= M.patm - READY_BAND:
                phase = CyclePhase.READY_TO_PICK
                events["released"] = t
            continue

    cycle_time = (t_hold - t_pick) if t_hold is not None else math.nan
    if outcome is Outcome.DROPPED and t_hold is None:
        cycle_time = events["detach"] - t_pick
    return CycleTrace(np.array(ts), phases, np.array(pbs), np.array(pss), np.array(ls),
                      np.array(fbs), outcome, cycle_time, drop_reason, events)


def repeat_cycles(design: GripperDesign, line: PneumaticLine, scenario: Scenario, count: int,
                  stations: int = DEFAULT_STATIONS) -> CycleSummary:
    """Replay ``count`` identical cycles and summarise each one."""
    if count < 1:
        raise DomainError("count must be at least 1")
    outcomes, times, pmin, pmax, digests = [], [], [], [], []
    for _ in range(count):
        tr = simulate_cycle(design, line, scenario, stations)
        sealed = [i for i, ph in enumerate(tr.phase)
                  if ph in (CyclePhase.SEALED_RETRACTING, CyclePhase.HOLDING)]
        outcomes.append(tr.outcome)
        times.append(tr.cycle_time)
        pmin.append(float(tr.body_pressure[sealed].min()) if sealed else math.nan)
        pmax.append(float(tr.cup_pressure.max()))
        digests.append(tr.digest())
    return CycleSummary(tuple(outcomes), tuple(times), tuple(pmin), tuple(pmax), tuple(digests))
