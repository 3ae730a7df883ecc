"""Models of a deployable, film-sealed suction gripper: spring-body picking
range, picking force, film contact on the end-caps and pick-cycle timing."""

from .core import (GRAVITY, P_ATM, GripperDesign, ObjectSpec, PneumaticLine, SpringParams,
                   default_design, helix_stiffness, table1_inner_spring, table1_outer_spring,
                   validate_design)
from .cycle import CyclePhase, Outcome, Scenario, repeat_cycles, simulate_cycle
from .errors import DegenerateDesignError, DomainError, GripperError, InfeasibleError, NumericError
from .film import ContactState, StationInput, effective_area, solve_station, solve_stations
from .picking import can_pick, force_profile, picking_range
from .pneumatics import pressure_drop, reynolds_number

__all__ = [
    "GRAVITY", "P_ATM", "GripperDesign", "ObjectSpec", "PneumaticLine", "SpringParams",
    "default_design", "helix_stiffness", "table1_inner_spring", "table1_outer_spring",
    "validate_design", "CyclePhase", "Outcome", "Scenario", "repeat_cycles", "simulate_cycle",
    "DegenerateDesignError", "DomainError", "GripperError", "InfeasibleError", "NumericError",
    "ContactState", "StationInput", "effective_area", "solve_station", "solve_stations",
    "can_pick", "force_profile", "picking_range", "pressure_drop", "reynolds_number",
]
