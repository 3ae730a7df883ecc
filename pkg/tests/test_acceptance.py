"""Acceptance gate: one test per criterion, verdicts listed in the terminal summary."""

import math

import numpy as np
import pytest

from deploygrip import (PneumaticLine, Scenario, can_pick, default_design, effective_area,
                        force_profile, helix_stiffness, picking_range, repeat_cycles,
                        reynolds_number, simulate_cycle, solve_station, table1_outer_spring)
from deploygrip.core import OUTER_SPRING_CONSTANTS, OUTER_WIRE_DIAMETERS, ObjectSpec, with_outer_spring
from deploygrip.cycle import CyclePhase, Outcome
from deploygrip.film import StationInput, contact_boundaries
from deploygrip.picking import Limiting, distance_grid

from . import oracles
from .conftest import criterion

LPM = 1 / 60000


def test_ac1_reynolds_anchor():
    with criterion(1, "Reynolds number 4453.3 at 4 L/min") as info:
        q = 4 * LPM
        rho, mu = 1.204, 1.825e-5
        diameter = 4 * rho * q / (math.pi * mu * 4453.3)
        re = reynolds_number(PneumaticLine(tube_diameter=diameter, flow_rate=q,
                                           air_density=rho, dynamic_viscosity=mu))
        info["note"] = f"D = {diameter * 1e3:.4f} mm, Re = {re:.3f}"
        assert abs(re - 4453.3) <= 0.1


def test_ac2_zero_slack_area():
    with criterion(2, "effective area at full deployment equals pi R^2"):
        for t in OUTER_WIRE_DIAMETERS:
            d = default_design(t)
            disc = math.pi * d.endcap_radius**2
            assert abs(effective_area(d, d.free_length) - disc) / disc <= 1e-12


def test_ac3_film_oracle_equivalence():
    with criterion(3, "film solver matches polyline oracle on 200 stations") as info:
        rng = np.random.default_rng(2024)
        R = 15.5e-3
        worst = 0.0
        for _ in range(200):
            t = rng.uniform(0.5e-3, 2.5e-3)
            delta = rng.uniform(0.0, 1e-3)
            l1p = rng.uniform(max(delta, t / 2), 15e-3)
            _, l_sd = contact_boundaries(StationInput(l1p, l1p, t, delta, R))
            l1 = rng.uniform(l1p, l_sd + 0.5 * (l_sd - l1p) + 1e-3)
            sol = solve_station(StationInput(l1, l1p, t, delta, R))
            state, d_ref = oracles.contact_distance(l1, l1p, t, delta, R)
            assert sol.state.value == state
            worst = max(worst, abs(sol.contact_distance - d_ref))
            for edge in contact_boundaries(StationInput(l1, l1p, t, delta, R)):
                lo = solve_station(StationInput(edge * (1 - 1e-12), l1p, t, delta, R)).contact_distance
                hi = solve_station(StationInput(edge * (1 + 1e-12), l1p, t, delta, R)).contact_distance
                assert abs(hi - lo) <= 1e-6
        info["note"] = f"max |d - d_oracle| = {worst:.2e} m"
        assert worst <= 1e-6


def test_ac4_quadrature_convergence():
    with criterion(4, "N vs 2N stations within 0.1% over 20 lengths") as info:
        d = default_design()
        worst = 0.0
        for length in np.linspace(d.solid_length, d.free_length, 20):
            a = effective_area(d, length, 360)
            b = effective_area(d, length, 720)
            worst = max(worst, abs(a - b) / b)
        info["note"] = f"max relative difference {worst:.2e}"
        assert worst < 1e-3


def test_ac5_range_trends():
    with criterion(5, "range grows with wire, d_max falls with Q, ratio in [1.5, 3]") as info:
        flows = (4.0, 9.0, 14.0)
        table = {(t, q): picking_range(default_design(t), PneumaticLine(flow_rate=q * LPM))
                 for t in OUTER_WIRE_DIAMETERS for q in flows}
        for q in flows:
            col = [table[t, q] for t in OUTER_WIRE_DIAMETERS]
            assert all(b.d_min > a.d_min for a, b in zip(col, col[1:]))
            assert all(b.d_max > a.d_max for a, b in zip(col, col[1:]))
        for t in OUTER_WIRE_DIAMETERS:
            row = [table[t, q] for q in flows]
            assert all(b.d_max < a.d_max for a, b in zip(row, row[1:]))
        ratios = [r.deployment_ratio for r in table.values()]
        info["note"] = f"ratios {min(ratios):.2f}..{max(ratios):.2f}"
        assert all(1.5 <= x <= 3.0 for x in ratios)


def test_ac6_force_cap_and_crossover():
    with criterion(6, "force below 45 N cap, one body->cup flip, falls with k"):
        line = PneumaticLine()
        for t in OUTER_WIRE_DIAMETERS:
            d = default_design(t)
            pts = force_profile(d, line, distance_grid(picking_range(d, line), 2e-3), stations=120)
            assert all(p.picking_force <= 45.0 + 1e-9 for p in pts)
            tags = [p.limiting for p in pts]
            flips = sum(a is not b for a, b in zip(tags, tags[1:]))
            assert flips <= 1 and (flips == 0 or tags[0] is Limiting.BODY)
        base = default_design()
        designs = [with_outer_spring(base, spring_constant=k) for k in (150.0, 198.0, 250.0, 326.0)]
        ranges = [picking_range(d, line) for d in designs]
        lo, hi = max(r.d_min for r in ranges), min(r.d_max for r in ranges)
        for x in np.linspace(lo, hi, 6):
            pts = [force_profile(d, line, [x], stations=120)[0] for d in designs]
            body = [p for p in pts if p.limiting is Limiting.BODY]
            assert all(b.picking_force < a.picking_force for a, b in zip(body, body[1:]))


def test_ac7_pick_predicate():
    with criterion(7, "4.4 kg pickable somewhere, 10 kg nowhere") as info:
        d, line = default_design(), PneumaticLine()
        grid = distance_grid(picking_range(d, line), 1e-3)
        ok = [x for x in grid if can_pick(d, line, ObjectSpec(4.4, x), stations=120)[0]]
        assert ok
        assert not any(can_pick(d, line, ObjectSpec(10.0, x), stations=120)[0] for x in grid)
        info["note"] = f"4.4 kg from {min(ok) * 1e3:.1f} mm"


def test_ac8_cycle_ordering():
    with criterion(8, "cycle time 65 < 95 < 125 mm, all < 3 s, 65 mm <= 1.2 s") as info:
        d, line = default_design(), PneumaticLine()
        times = []
        for x in (65e-3, 95e-3, 125e-3):
            tr = simulate_cycle(d, line, Scenario(ObjectSpec(0.005, x)))
            assert tr.outcome is Outcome.PICKED
            times.append(tr.cycle_time)
        info["note"] = ", ".join(f"{t:.3f} s" for t in times)
        assert times[0] < times[1] < times[2] < 3.0
        assert times[0] <= 1.2


def test_ac9_determinism():
    with criterion(9, "1000 identical cycles with a -91 kPa floor"):
        d, line = default_design(), PneumaticLine()
        s = repeat_cycles(d, line, Scenario(ObjectSpec(0.005, 95e-3)), 1000)
        assert s.identical
        assert set(s.outcomes) == {Outcome.PICKED}
        floor = line.atmospheric_pressure - 91e3
        assert all(p == pytest.approx(floor, abs=1e-6) for p in s.min_body_pressure)
        tr = simulate_cycle(d, line, Scenario(ObjectSpec(0.005, 95e-3)))
        sealed = [p for p, ph in zip(tr.body_pressure, tr.phase)
                  if ph in (CyclePhase.SEALED_RETRACTING, CyclePhase.HOLDING)]
        assert min(sealed) >= floor - 1e-6


def test_ac10_spring_stiffness():
    with criterion(10, "helix rate within 20% of measured springs") as info:
        errs = []
        for t, k in zip(OUTER_WIRE_DIAMETERS, OUTER_SPRING_CONSTANTS):
            s = table1_outer_spring(t)
            assert s.active_coils == round(s.free_length / s.pitch) - 2
            errs.append(helix_stiffness(s) / k - 1)
        info["note"] = "errors " + ", ".join(f"{e:+.1%}" for e in errs)
        assert all(abs(e) <= 0.2 for e in errs)
