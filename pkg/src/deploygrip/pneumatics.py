"""Friction losses along the supply tube.

Darcy-Weisbach with an explicit Haaland friction factor in turbulent flow and
64/Re below the transition. Minor losses are ignored and the air is treated
as incompressible along the line.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .core import PneumaticLine
from .errors import DomainError

RE_TRANSITION = 2300.0


class Regime(str, enum.Enum):
    LAMINAR = "laminar"
    TURBULENT = "turbulent"


@dataclass(frozen=True)
class FlowSolution:
    reynolds: float
    friction_factor: float
    pressure_drop: float
    regime: Regime


def reynolds_number(line: PneumaticLine) -> float:
    return 4.0 * line.air_density * line.flow_rate / (line.dynamic_viscosity * math.pi * line.tube_diameter)


def friction_factor(reynolds: float, relative_roughness: float = 0.0) -> float:
    if not reynolds > 0:
        raise DomainError(f"friction factor needs a positive Reynolds number, got {reynolds!r}")
    if reynolds < RE_TRANSITION:
        return 64.0 / reynolds
    inv_sqrt = -1.8 * math.log10(6.9 / reynolds + (relative_roughness / 3.7) ** 1.11)
    return 1.0 / inv_sqrt**2


def pressure_drop(line: PneumaticLine) -> FlowSolution:
    re = reynolds_number(line)
    if re == 0.0:
        # no flow: friction factor is undefined, report 0
        return FlowSolution(0.0, 0.0, 0.0, Regime.LAMINAR)
    f = friction_factor(re, line.roughness / line.tube_diameter)
    dp = 8.0 * f * line.tube_length * line.flow_rate**2 * line.air_density / (math.pi**2 * line.tube_diameter**5)
    regime = Regime.LAMINAR if re < RE_TRANSITION else Regime.TURBULENT
    return FlowSolution(re, f, dp, regime)


def diameter_for_reynolds(reynolds: float, flow_rate: float, air_density: float = 1.204,
                          dynamic_viscosity: float = 1.825e-5) -> float:
    """Tube diameter giving ``reynolds`` at ``flow_rate``."""
    return 4.0 * air_density * flow_rate / (dynamic_viscosity * math.pi * reynolds)


def line_at(line: PneumaticLine, flow_rate: float) -> PneumaticLine:
    return replace(line, flow_rate=flow_rate)
