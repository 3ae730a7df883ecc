import math
import random

import pytest

from deploygrip import PneumaticLine, default_design, picking_range
from deploygrip.errors import DomainError, InfeasibleError
from deploygrip.picking import force_point
from deploygrip.study import OptimizeSpec, SweepSpec, optimize, residuals, set_parameter, sweep

WIRES = [1.4, 1.6, 1.8, 2.0]


def test_set_parameter_does_not_mutate():
    raw = {"line": {"flow_rate": 4}}
    out = set_parameter(raw, "line.tube_diameter", 3)
    assert raw == {"line": {"flow_rate": 4}}
    assert out == {"line": {"flow_rate": 4, "tube_diameter": 3}}
    with pytest.raises(DomainError):
        set_parameter(raw, "flow_rate", 1)


@pytest.mark.parametrize("axis", [("line.flow_rate", []), ("line.flow_rate", [4, 4]), ("line.flow_rate", [9, 4])])
def test_bad_grids_rejected(axis):
    with pytest.raises(DomainError):
        SweepSpec(("outer_spring.wire_diameter", WIRES), axis)


def test_unknown_metric_rejected():
    with pytest.raises(DomainError, match="unknown metric"):
        SweepSpec(("a.b", [1]), ("c.d", [1]), ("speed",))


def test_sweep_matches_direct_evaluation_and_is_ordered():
    spec = SweepSpec(("outer_spring.wire_diameter", WIRES), ("line.flow_rate", [4.0, 9.0, 14.0]),
                     ("d_max_mm", "d_min_mm"))
    rows = sweep(spec)
    assert len(rows) == 4 * 3 * 2
    assert rows == sorted(rows, key=lambda r: (r[0], r[1], r[2]))
    t, q, metric, value = rows[0]
    r = picking_range(default_design(t * 1e-3), PneumaticLine(flow_rate=q / 60000))
    assert (metric, value) == ("d_max_mm", pytest.approx(r.d_max * 1e3))


def test_sweep_failing_points_are_nan(caplog):
    spec = SweepSpec(("outer_spring.wire_diameter", [1.4]), ("line.flow_rate", [14.0, 60.0]),
                     ("d_max_mm",))
    rows = sweep(spec)
    assert not math.isnan(rows[0][3]) and math.isnan(rows[1][3])
    assert "line.flow_rate=60.0" in caplog.text


def test_sweep_parallel_equals_serial():
    spec = SweepSpec(("outer_spring.wire_diameter", WIRES), ("line.flow_rate", [4.0, 14.0]),
                     ("deployment_ratio",))
    assert sweep(spec, workers=2) == sweep(spec)


def test_optimize_agrees_with_enumeration():
    spec = OptimizeSpec("max_range", required_force=20.0, space={"wire_diameter": WIRES})
    best = optimize(spec)
    feasible = []
    for t in WIRES:
        d = default_design(t * 1e-3)
        r = picking_range(d, PneumaticLine())
        f = force_point(d, PneumaticLine(), 0.5 * (r.d_min + r.d_max)).picking_force
        if f >= 20.0:
            feasible.append((r.d_max - r.d_min, t))
    assert best.wire_diameter == max(feasible)[1]
    assert best.margins["required_force"] >= 0


def test_optimize_is_invariant_to_grid_order():
    wires = list(WIRES)
    flows = [4.0, 9.0, 14.0]
    ref = optimize(OptimizeSpec(space={"wire_diameter": wires, "flow_rate": flows}))
    random.Random(0).shuffle(wires)
    random.Random(1).shuffle(flows)
    again = optimize(OptimizeSpec(space={"wire_diameter": wires, "flow_rate": flows}))
    assert (again.wire_diameter, again.flow_rate) == (ref.wire_diameter, ref.flow_rate)


def test_ties_go_to_smaller_wire_then_smaller_flow():
    # zero flow: every candidate deploys fully, so d_max - d_min ties across flow values
    best = optimize(OptimizeSpec(space={"wire_diameter": [1.6], "flow_rate": [0.0, 0.0]}))
    assert best.flow_rate == 0.0
    spec = OptimizeSpec(space={"wire_diameter": [1.6, 1.8], "spring_constant": [200.0]},
                        objective="max_range")
    best = optimize(spec, {"line": {"flow_rate": 0.0}})
    assert best.wire_diameter == 1.6


def test_single_point_search_returns_it():
    best = optimize(OptimizeSpec(space={"wire_diameter": [1.6], "flow_rate": [9.0]}))
    assert (best.wire_diameter, best.spring_constant, best.flow_rate) == (1.6, 198.0, 9.0)


def test_infeasible_force_names_cup_limit():
    with pytest.raises(InfeasibleError) as exc:
        optimize(OptimizeSpec(required_force=100.0, space={"wire_diameter": WIRES}))
    assert exc.value.binding == "cup_limit"


def test_infeasible_d_min_named():
    with pytest.raises(InfeasibleError) as exc:
        optimize(OptimizeSpec(max_d_min=10.0, space={"wire_diameter": WIRES}))
    assert exc.value.binding == "max_d_min"


def test_bounds_expand_to_points():
    spec = OptimizeSpec(space={"flow_rate": {"min": 4, "max": 14}}, points=5)
    assert spec.grid("flow_rate", 0) == [4.0, 6.5, 9.0, 11.5, 14.0]
    with pytest.raises(DomainError):
        OptimizeSpec(space={"flow_rate": {"min": 14, "max": 4}})
    with pytest.raises(DomainError):
        OptimizeSpec(objective="max_force_at_distance")


def test_residuals_self_comparison_is_zero():
    rows = [{"q": "4", "metric": "d_max_mm", "value": "150.5"},
            {"q": "9", "metric": "d_max_mm", "value": "140.0"}]
    out, summary = residuals(rows, rows, ["q", "metric"])
    assert all(r[3] == 0.0 for r in out)
    assert summary == {"d_max_mm": (0.0, 0.0)}


def test_residuals_report_unmatched_keys():
    model = [{"q": "4.0", "value": "1"}]
    with pytest.raises(KeyError):
        residuals(model, [{"q": "5", "value": "1"}], ["q"])
    out, _ = residuals(model, [{"q": "4", "value": "0.5"}], ["q"])
    assert out[0][3] == 0.5
