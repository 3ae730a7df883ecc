import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deploygrip import PneumaticLine, can_pick, default_design, force_profile, picking_range
from deploygrip.core import ObjectSpec, with_outer_spring
from deploygrip.errors import DegenerateDesignError, DomainError
from deploygrip.picking import (Limiting, MinCase, PickReason, body_lifting_force,
                                cup_holding_force_max, deployed_contraction, distance_grid,
                                force_point, max_distance, min_distance)
from deploygrip.pneumatics import pressure_drop

LINE = PneumaticLine()


def test_min_distance_takes_the_binding_case():
    d = default_design()
    x, case = min_distance(d)
    assert case is MinCase.SOLID_LENGTH
    assert x == pytest.approx(d.solid_length + d.fixed_height)
    # a much stiffer spring stops short of solid under a full vacuum
    stiff = with_outer_spring(d, spring_constant=5000.0)
    x, case = min_distance(stiff)
    assert case is MinCase.EQUILIBRIUM
    eq = stiff.free_length - 101325.0 * stiff.body_effective_area_full / 5000.0 + stiff.fixed_height
    assert x == pytest.approx(eq)


def test_max_distance_is_free_length_less_line_loss_contraction():
    d = default_design()
    dp = pressure_drop(LINE).pressure_drop
    assert max_distance(d, LINE) == pytest.approx(
        d.free_length + d.fixed_height - dp * d.body_effective_area_full / d.stiffness)


def test_range_and_ratio():
    r = picking_range(default_design(), LINE)
    assert r.d_min < r.d_max
    assert r.deployment_ratio == pytest.approx(r.d_max / r.d_min)


def test_no_flow_means_full_deployment():
    d = default_design()
    assert deployed_contraction(d, PneumaticLine(flow_rate=0.0)) == 0.0
    assert max_distance(d, PneumaticLine(flow_rate=0.0)) == pytest.approx(d.free_length + d.fixed_height)


def test_line_loss_larger_than_stroke_is_degenerate():
    with pytest.raises(DegenerateDesignError, match="cannot deploy"):
        picking_range(default_design(1.4e-3), PneumaticLine(flow_rate=60 / 60000))


def test_body_force_at_free_length_is_full_area():
    d = default_design()
    f = body_lifting_force(d, 101325.0 - 91e3, d.free_length)
    assert f == pytest.approx(91e3 * d.body_effective_area_full, rel=1e-12)


def test_body_force_never_negative():
    d = default_design()
    assert body_lifting_force(d, 101325.0 - 100.0, d.solid_length) == 0.0


def test_pressure_above_atmosphere_rejected():
    d = default_design()
    with pytest.raises(DomainError):
        body_lifting_force(d, 2e5, d.free_length)
    with pytest.raises(DomainError):
        cup_holding_force_max(d, 2e5)


def test_cup_force_at_pump_limit_is_cap():
    assert cup_holding_force_max(default_design(), LINE.vacuum_pressure) == pytest.approx(45.0)


def test_force_point_limiting_tag():
    d = default_design()
    r = picking_range(d, LINE)
    low = force_point(d, LINE, r.d_min)
    assert low.limiting is Limiting.BODY and low.picking_force == low.body_force_max
    high = force_point(d, LINE, r.d_max)
    assert high.limiting is Limiting.CUP and high.picking_force == pytest.approx(45.0)


def test_force_profile_outside_range_names_interval():
    d = default_design()
    r = picking_range(d, LINE)
    with pytest.raises(DomainError, match="outside the picking range"):
        force_profile(d, LINE, [r.d_max + 1e-3])


def test_can_pick_reasons():
    d = default_design()
    r = picking_range(d, LINE)
    assert can_pick(d, LINE, ObjectSpec(0.1, r.d_max + 0.01)) == (False, PickReason.OUT_OF_RANGE)
    assert can_pick(d, LINE, ObjectSpec(0.1, r.d_max)) == (True, PickReason.OK)
    assert can_pick(d, LINE, ObjectSpec(10.0, r.d_max)) == (False, PickReason.CUP_LIMITED)
    assert can_pick(d, LINE, ObjectSpec(4.4, r.d_min)) == (False, PickReason.BODY_LIMITED)


def test_distance_grid_covers_range():
    r = picking_range(default_design(), LINE)
    g = distance_grid(r, 1e-3)
    assert g[0] == r.d_min and g[-1] == pytest.approx(r.d_max)
    assert max(b - a for a, b in zip(g, g[1:])) <= 1e-3 + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.0, 1.0))
def test_forces_scale_with_areas(c, u):
    base = default_design()
    scaled = dataclasses.replace(base, body_effective_area_full=base.body_effective_area_full * c,
                                 suction_cup_effective_area=base.suction_cup_effective_area * c,
                                 outer_spring=dataclasses.replace(base.outer_spring,
                                                                  spring_constant=base.stiffness * c))
    r = picking_range(base, LINE)
    x = r.d_min + u * (r.d_max - r.d_min)
    a = force_point(base, LINE, x, stations=60)
    b = force_point(scaled, LINE, x, stations=60)
    assert b.body_force_max == pytest.approx(c * a.body_force_max, rel=1e-9, abs=1e-12)
    assert b.cup_force_max == pytest.approx(c * a.cup_force_max, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([1.4e-3, 1.6e-3, 1.8e-3, 2.0e-3]), st.floats(1.0, 14.0))
def test_range_invariants(t, q_lpm):
    r = picking_range(default_design(t), PneumaticLine(flow_rate=q_lpm / 60000))
    assert 0 < r.d_min < r.d_max
    assert r.deployment_ratio > 1
    assert math.isfinite(r.deployment_ratio)
