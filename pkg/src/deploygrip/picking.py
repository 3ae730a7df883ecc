"""Picking-distance range and picking force of the gripper."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import P_ATM, GripperDesign, ObjectSpec, PneumaticLine
from .errors import DegenerateDesignError, DomainError
from .film import DEFAULT_STATIONS, effective_area_fraction
from .pneumatics import pressure_drop

_RANGE_TOL = 1e-9  # m, slack on range membership for round-off


class MinCase(str, enum.Enum):
    EQUILIBRIUM = "equilibrium"
    SOLID_LENGTH = "solid_length"


class Limiting(str, enum.Enum):
    BODY = "body"
    CUP = "cup"


class PickReason(str, enum.Enum):
    OUT_OF_RANGE = "out_of_range"
    BODY_LIMITED = "body_limited"
    CUP_LIMITED = "cup_limited"
    OK = "ok"


@dataclass(frozen=True)
class PickingRange:
    d_min: float
    d_max: float
    deployment_ratio: float
    min_case: MinCase


@dataclass(frozen=True)
class ForcePoint:
    distance: float
    body_force_max: float
    cup_force_max: float
    picking_force: float
    limiting: Limiting


def min_distance(design: GripperDesign, atmospheric_pressure: float = P_ATM) -> tuple[float, MinCase]:
    """Distance of the fully contracted gripper.

    Contraction stops either where the spring balances a full vacuum or at
    the solid length, whichever comes first (the larger distance).
    """
    h = design.fixed_height
    equilibrium = design.free_length - atmospheric_pressure * design.body_effective_area_full / design.stiffness + h
    solid = design.solid_length + h
    if equilibrium > solid:
        return equilibrium, MinCase.EQUILIBRIUM
    return solid, MinCase.SOLID_LENGTH


def deployed_contraction(design: GripperDesign, line: PneumaticLine) -> float:
    """Spring shortening caused by the line loss while air flows through the cup."""
    dp = pressure_drop(line).pressure_drop
    return dp * design.body_effective_area_full / design.stiffness


def max_distance(design: GripperDesign, line: PneumaticLine) -> float:
    shrink = deployed_contraction(design, line)
    stroke = design.free_length - design.solid_length
    if shrink >= stroke:
        raise DegenerateDesignError(
            f"line loss contracts the body by {shrink * 1e3:.2f} mm, more than its "
            f"{stroke * 1e3:.2f} mm stroke; the gripper cannot deploy")
    return design.free_length - shrink + design.fixed_height


def picking_range(design: GripperDesign, line: PneumaticLine) -> PickingRange:
    d_min, case = min_distance(design, line.atmospheric_pressure)
    d_max = max_distance(design, line)
    if not d_min < d_max:
        raise DegenerateDesignError(f"d_min {d_min * 1e3:.2f} mm is not below d_max {d_max * 1e3:.2f} mm")
    return PickingRange(d_min, d_max, d_max / d_min, case)


def body_lifting_force(design: GripperDesign, body_pressure: float, length: float,
                       atmospheric_pressure: float = P_ATM, stations: int = DEFAULT_STATIONS) -> float:
    """Net upward pull of the evacuated body at spring length ``length``.

    The full body area is scaled by the fraction of the end-cap left free of
    adhered film; negative values (spring wins) are reported as 0.
    """
    if body_pressure > atmospheric_pressure:
        raise DomainError("body pressure above atmosphere")
    area = design.body_effective_area_full * effective_area_fraction(design, length, stations)
    force = (atmospheric_pressure - body_pressure) * area - design.stiffness * (design.free_length - length)
    return max(force, 0.0)


def cup_holding_force_max(design: GripperDesign, cup_pressure: float, atmospheric_pressure: float = P_ATM) -> float:
    if cup_pressure > atmospheric_pressure:
        raise DomainError("cup pressure above atmosphere")
    return (atmospheric_pressure - cup_pressure) * design.suction_cup_effective_area


def force_point(design: GripperDesign, line: PneumaticLine, distance: float,
                stations: int = DEFAULT_STATIONS) -> ForcePoint:
    """Forces at the pump's deepest vacuum with the cup sealed at ``distance``."""
    length = min(max(distance - design.fixed_height, design.solid_length), design.free_length)
    p_vac = line.vacuum_pressure
    fb = body_lifting_force(design, p_vac, length, line.atmospheric_pressure, stations)
    fs = cup_holding_force_max(design, p_vac, line.atmospheric_pressure)
    if fb < fs:
        return ForcePoint(distance, fb, fs, fb, Limiting.BODY)
    return ForcePoint(distance, fb, fs, fs, Limiting.CUP)


def force_profile(design: GripperDesign, line: PneumaticLine, distances,
                  stations: int = DEFAULT_STATIONS) -> list[ForcePoint]:
    rng = picking_range(design, line)
    for x in distances:
        if not rng.d_min - _RANGE_TOL <= x <= rng.d_max + _RANGE_TOL:
            raise DomainError(
                f"distance {x * 1e3:.3f} mm outside the picking range "
                f"[{rng.d_min * 1e3:.3f}, {rng.d_max * 1e3:.3f}] mm")
    return [force_point(design, line, x, stations) for x in distances]


def can_pick(design: GripperDesign, line: PneumaticLine, obj: ObjectSpec,
             stations: int = DEFAULT_STATIONS) -> tuple[bool, PickReason]:
    rng = picking_range(design, line)
    if not rng.d_min - _RANGE_TOL <= obj.distance <= rng.d_max + _RANGE_TOL:
        return False, PickReason.OUT_OF_RANGE
    pt = force_point(design, line, obj.distance, stations)
    if pt.picking_force >= obj.weight:
        return True, PickReason.OK
    if pt.limiting is Limiting.CUP:
        return False, PickReason.CUP_LIMITED
    return False, PickReason.BODY_LIMITED


def distance_grid(rng: PickingRange, step: float = 1e-3) -> list[float]:
    """Evenly spaced distances covering ``rng`` with spacing at most ``step``."""
    n = max(1, math.ceil((rng.d_max - rng.d_min) / step))
    return [rng.d_min + (rng.d_max - rng.d_min) * i / n for i in range(n + 1)]
