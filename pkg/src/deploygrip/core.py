"""Design records for the deployable suction gripper.

All values are SI (m, m^2, Pa, N/m, m^3/s). Unit conversion happens only in
:mod:`deploygrip.config` and the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

GRAVITY = 9.81  # m/s^2
P_ATM = 101325.0  # Pa

# Measured springs: free length 150 mm, outer coil radius 15 mm, pitch 11.5 mm.
OUTER_WIRE_DIAMETERS = (1.4e-3, 1.6e-3, 1.8e-3, 2.0e-3)
OUTER_SPRING_CONSTANTS = (125.0, 198.0, 326.0, 522.0)

# Fallbacks for dimensions that were never measured. See README "Defaults".
DEFAULT_ENDCAP_HEIGHTS = 22e-3
DEFAULT_SUCTION_HEIGHT = 20e-3
DEFAULT_RADIAL_CLEARANCE = 0.5e-3
DEFAULT_FILM_THICKNESS = 60e-6
DEFAULT_VACUUM_GAUGE = -91e3
DEFAULT_CUP_CAP = 45.0  # N, holding-force ceiling at DEFAULT_VACUUM_GAUGE


@dataclass(frozen=True)
class SpringParams:
    """Helical compression spring.

    ``active_coils`` defaults to ``round(L/p) - end_coils``; the full coil
    count (``total_coils``) sets the solid length.
    """

    free_length: float
    coil_radius: float
    pitch: float
    wire_diameter: float
    spring_constant: float
    shear_modulus: float = 79.3e9
    active_coils: int | None = None
    end_coils: int = 2

    def __post_init__(self):
        if self.active_coils is None:
            n = round(self.free_length / self.pitch) - self.end_coils
            object.__setattr__(self, "active_coils", n)

    @property
    def total_coils(self) -> int:
        return self.active_coils + self.end_coils


@dataclass(frozen=True)
class GripperDesign:
    outer_spring: SpringParams
    inner_spring: SpringParams
    film_thickness: float = DEFAULT_FILM_THICKNESS
    endcap_heights_total: float = DEFAULT_ENDCAP_HEIGHTS
    suction_cup_height: float = DEFAULT_SUCTION_HEIGHT
    suction_cup_effective_area: float = DEFAULT_CUP_CAP / -DEFAULT_VACUUM_GAUGE
    body_effective_area_full: float | None = None
    endcap_radius: float | None = None
    radial_clearance: float = DEFAULT_RADIAL_CLEARANCE
    # Gap between the lowest coil and the end-cap at the azimuth where the
    # helix starts its climb.
    coil_clearance: float = 0.0

    def __post_init__(self):
        rs = self.outer_spring.coil_radius
        if self.endcap_radius is None:
            object.__setattr__(self, "endcap_radius", rs + self.radial_clearance)
        if self.body_effective_area_full is None:
            object.__setattr__(self, "body_effective_area_full", math.pi * rs**2)

    @property
    def free_length(self) -> float:
        return self.outer_spring.free_length

    @property
    def stiffness(self) -> float:
        return self.outer_spring.spring_constant

    @property
    def fixed_height(self) -> float:
        """End-caps plus suction cup: everything that does not compress."""
        return self.endcap_heights_total + self.suction_cup_height

    @property
    def contact_wire(self) -> float:
        """Wire diameter seen by the film, including one film layer each side."""
        return self.outer_spring.wire_diameter + 2.0 * self.film_thickness

    @property
    def solid_length(self) -> float:
        n = self.outer_spring.total_coils
        return n * self.outer_spring.wire_diameter + 2 * (n - 1) * self.film_thickness


@dataclass(frozen=True)
class PneumaticLine:
    """Supply tube between the valve and the pump.

    ``vacuum_gauge`` is the deepest body pressure the pump sustains,
    relative to atmosphere (negative).
    """

    tube_diameter: float = 2.0e-3
    tube_length: float = 0.27
    roughness: float = 0.0
    flow_rate: float = 14.0 / 60000.0
    air_density: float = 1.204
    dynamic_viscosity: float = 1.825e-5
    atmospheric_pressure: float = P_ATM
    vacuum_gauge: float = DEFAULT_VACUUM_GAUGE

    @property
    def vacuum_pressure(self) -> float:
        return self.atmospheric_pressure + self.vacuum_gauge


@dataclass(frozen=True)
class ObjectSpec:
    mass: float
    distance: float

    @property
    def weight(self) -> float:
        return self.mass * GRAVITY


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


def table1_outer_spring(wire_diameter: float = 1.6e-3) -> SpringParams:
    """One of the four measured outer springs, selected by wire diameter."""
    for t, k in zip(OUTER_WIRE_DIAMETERS, OUTER_SPRING_CONSTANTS):
        if math.isclose(t, wire_diameter, rel_tol=1e-6):
            return SpringParams(150e-3, 15e-3, 11.5e-3, t, k)
    raise ValueError(f"no measured outer spring with wire diameter {wire_diameter!r} m")


def table1_inner_spring() -> SpringParams:
    return SpringParams(150e-3, 5e-3, 5.36e-3, 0.5e-3, 22.3)


def default_design(wire_diameter: float = 1.6e-3, **overrides) -> GripperDesign:
    design = GripperDesign(table1_outer_spring(wire_diameter), table1_inner_spring())
    return replace(design, **overrides) if overrides else design


def with_outer_spring(design: GripperDesign, **changes) -> GripperDesign:
    """Copy of ``design`` with outer-spring fields replaced.

    The inner spring keeps sharing the free length, and the end-cap radius
    follows the coil radius when it was derived from it.
    """
    outer = replace(design.outer_spring, **changes)
    if "free_length" in changes:
        inner = replace(design.inner_spring, free_length=outer.free_length)
    else:
        inner = design.inner_spring
    radius = outer.coil_radius + design.radial_clearance
    return replace(design, outer_spring=outer, inner_spring=inner, endcap_radius=radius)


def _check_spring(name: str, s: SpringParams) -> list[Violation]:
    out = []
    for attr in ("free_length", "coil_radius", "pitch", "wire_diameter", "spring_constant", "shear_modulus"):
        if not getattr(s, attr) > 0:
            out.append(Violation(f"{name}.{attr}", "must be strictly positive"))
    if not s.pitch > s.wire_diameter:
        out.append(Violation(f"{name}.pitch", "must exceed wire_diameter"))
    if s.active_coils < 1:
        out.append(Violation(f"{name}.active_coils", "must be at least 1"))
    if s.end_coils < 0:
        out.append(Violation(f"{name}.end_coils", "must be non-negative"))
    if s.wire_diameter > 0 and s.total_coils > s.free_length / s.wire_diameter + 1e-9:
        out.append(Violation(f"{name}.active_coils", "solid length exceeds free_length"))
    return out


def validate_design(design: GripperDesign, line: PneumaticLine | None = None) -> list[Violation]:
    """Every broken invariant of ``design`` and ``line``; empty when sane."""
    out = _check_spring("outer_spring", design.outer_spring)
    out += _check_spring("inner_spring", design.inner_spring)
    if not math.isclose(design.inner_spring.free_length, design.outer_spring.free_length, rel_tol=1e-9):
        out.append(Violation("inner_spring.free_length", "must equal outer_spring.free_length"))
    for attr in ("endcap_heights_total", "suction_cup_height", "suction_cup_effective_area",
                 "body_effective_area_full", "endcap_radius"):
        if not getattr(design, attr) > 0:
            out.append(Violation(attr, "must be strictly positive"))
    if design.film_thickness < 0:
        out.append(Violation("film_thickness", "must be non-negative"))
    if design.coil_clearance < 0:
        out.append(Violation("coil_clearance", "must be non-negative"))
    if design.radial_clearance < 0:
        out.append(Violation("radial_clearance", "must be non-negative"))
    elif not math.isclose(design.endcap_radius,
                          design.outer_spring.coil_radius + design.radial_clearance,
                          rel_tol=1e-9, abs_tol=1e-12):
        out.append(Violation("endcap_radius", "must equal outer coil_radius + radial_clearance"))
    if design.body_effective_area_full > math.pi * design.endcap_radius**2 * (1 + 1e-12):
        out.append(Violation("body_effective_area_full", "must not exceed the end-cap disc pi*R^2"))
    if design.solid_length > design.free_length:
        out.append(Violation("film_thickness", "solid length with film exceeds free_length"))

    if line is not None:
        for attr in ("tube_diameter", "tube_length", "flow_rate", "air_density",
                     "dynamic_viscosity", "atmospheric_pressure"):
            if not getattr(line, attr) > 0:
                out.append(Violation(attr, "must be strictly positive"))
        if line.roughness < 0:
            out.append(Violation("roughness", "must be non-negative"))
        elif not line.roughness < line.tube_diameter:
            out.append(Violation("roughness", "must be smaller than tube_diameter"))
        if not -line.atmospheric_pressure < line.vacuum_gauge < 0:
            out.append(Violation("vacuum_gauge", "must lie between -atmospheric_pressure and 0"))
    return out


def helix_stiffness(spring: SpringParams) -> float:
    """Rate of a close-wound helix, G t^4 / (8 D^3 n) with D the coil diameter."""
    d = 2.0 * spring.coil_radius
    return spring.shear_modulus * spring.wire_diameter**4 / (8.0 * d**3 * spring.active_coils)
