"""Human-editable YAML configuration.

Keys match the dataclass field names. Units at this boundary:

==================  ==========================================
lengths             mm
areas               mm^2
volumes             mL
flow rate           L/min
pressures           kPa (``vacuum_gauge`` relative to atmosphere)
shear modulus       GPa
spring constant     N/m
mass                kg
times               s
density, viscosity  kg/m^3, Pa s
==================  ==========================================

Every section is optional. Missing values fall back to the 1.6 mm measured
gripper; an outer spring whose ``wire_diameter`` matches one of the measured
springs picks up that spring's constant unless one is given.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, replace
from pathlib import Path

import yaml

from .core import (OUTER_SPRING_CONSTANTS, OUTER_WIRE_DIAMETERS, GripperDesign, ObjectSpec,
                   PneumaticLine, SpringParams, default_design)
from .cycle import Scenario
from .errors import GripperError

MM = 1e-3
MM2 = 1e-6
ML = 1e-6
LPM = 1.0 / 60000.0
KPA = 1e3
GPA = 1e9

SPRING_UNITS = {
    "free_length": MM, "coil_radius": MM, "pitch": MM, "wire_diameter": MM,
    "spring_constant": 1.0, "shear_modulus": GPA, "active_coils": None, "end_coils": None,
}
GRIPPER_UNITS = {
    "film_thickness": MM, "endcap_heights_total": MM, "suction_cup_height": MM,
    "suction_cup_effective_area": MM2, "body_effective_area_full": MM2,
    "endcap_radius": MM, "radial_clearance": MM, "coil_clearance": MM,
}
LINE_UNITS = {
    "tube_diameter": MM, "tube_length": MM, "roughness": MM, "flow_rate": LPM,
    "air_density": 1.0, "dynamic_viscosity": 1.0, "atmospheric_pressure": KPA, "vacuum_gauge": KPA,
}
OBJECT_UNITS = {"mass": 1.0, "distance": MM}
SCENARIO_UNITS = {
    "valve_switch_times": None, "seal_leak_area": MM2, "timestep": 1.0, "hold_time": 1.0,
    "dead_volume": ML, "cup_volume": ML, "max_time": 1.0,
}
SECTIONS = ("outer_spring", "inner_spring", "gripper", "line", "object", "scenario", "analysis")


class ConfigError(GripperError):
    """Missing file, unparsable text, or a bad key/value."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class Config:
    design: GripperDesign
    line: PneumaticLine
    object: ObjectSpec | None = None
    scenario: Scenario | None = None
    stations: int | None = None


def _convert(section: str, raw, units: dict) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"section '{section}' must be a mapping", key=section)
    out = {}
    for key, value in raw.items():
        if key not in units:
            raise ConfigError(f"unknown key '{section}.{key}'", key=f"{section}.{key}")
        scale = units[key]
        if scale is None:
            out[key] = value
            continue
        try:
            out[key] = float(value) * scale
        except (TypeError, ValueError):
            raise ConfigError(f"'{section}.{key}' must be a number, got {value!r}", key=f"{section}.{key}") from None
    return out


def _spring(section: str, raw, base: SpringParams, measured: bool) -> SpringParams:
    vals = _convert(section, raw, SPRING_UNITS)
    if "wire_diameter" in vals and "spring_constant" not in vals:
        k = None
        if measured:
            for t, kt in zip(OUTER_WIRE_DIAMETERS, OUTER_SPRING_CONSTANTS):
                if math.isclose(t, vals["wire_diameter"], rel_tol=1e-6):
                    k = kt
        if k is None and not math.isclose(vals["wire_diameter"], base.wire_diameter, rel_tol=1e-9):
            raise ConfigError(f"'{section}.spring_constant' is required for this wire_diameter",
                              key=f"{section}.spring_constant")
        if k is not None:
            vals["spring_constant"] = k
    for key in ("active_coils", "end_coils"):
        if key in vals:
            try:
                vals[key] = int(vals[key])
            except (TypeError, ValueError):
                raise ConfigError(f"'{section}.{key}' must be an integer", key=f"{section}.{key}") from None
    if "active_coils" not in vals and ({"free_length", "pitch", "end_coils"} & vals.keys()):
        vals["active_coils"] = None
    return replace(base, **vals)


def parse_config(data) -> Config:
    """Build records from an already-parsed mapping (see module docstring)."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a mapping")
    for key in data:
        if key not in SECTIONS:
            raise ConfigError(f"unknown section '{key}'", key=key)

    base = default_design()
    outer = _spring("outer_spring", data.get("outer_spring"), base.outer_spring, measured=True)
    inner = _spring("inner_spring", data.get("inner_spring"), base.inner_spring, measured=False)
    if "inner_spring" not in data or "free_length" not in (data.get("inner_spring") or {}):
        inner = replace(inner, free_length=outer.free_length)
    g = _convert("gripper", data.get("gripper"), GRIPPER_UNITS)
    g.setdefault("endcap_radius", None)
    g.setdefault("body_effective_area_full", None)
    design = GripperDesign(outer, inner, **{**_gripper_defaults(base), **g})

    line = PneumaticLine(**_convert("line", data.get("line"), LINE_UNITS))

    obj = None
    if data.get("object") is not None:
        o = _convert("object", data["object"], OBJECT_UNITS)
        for key in ("mass", "distance"):
            if key not in o:
                raise ConfigError(f"'object.{key}' is required", key=f"object.{key}")
        obj = ObjectSpec(**o)

    scenario = None
    if data.get("scenario") is not None:
        if obj is None:
            raise ConfigError("'scenario' needs an 'object' section", key="object")
        s = _convert("scenario", data["scenario"], SCENARIO_UNITS)
        if "valve_switch_times" in s:
            times = s["valve_switch_times"]
            if not isinstance(times, (list, tuple)) or not 1 <= len(times) <= 2:
                raise ConfigError("'scenario.valve_switch_times' must list one or two times",
                                  key="scenario.valve_switch_times")
            s["valve_switch_times"] = tuple(None if x is None else float(x) for x in times)
        scenario = Scenario(obj, **s)
    elif obj is not None:
        scenario = Scenario(obj)

    stations = None
    analysis = data.get("analysis") or {}
    if not isinstance(analysis, dict):
        raise ConfigError("section 'analysis' must be a mapping", key="analysis")
    for key, value in analysis.items():
        if key != "stations":
            raise ConfigError(f"unknown key 'analysis.{key}'", key=f"analysis.{key}")
        stations = int(value)
    return Config(design, line, obj, scenario, stations)


def _gripper_defaults(base: GripperDesign) -> dict:
    return {k: getattr(base, k) for k in GRIPPER_UNITS}


def load_raw(path) -> dict:
    """Parsed but unconverted mapping from a YAML file."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}", key=str(p))
    try:
        data = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{p}: configuration root must be a mapping")
    return data


def load_config(path) -> Config:
    return parse_config(load_raw(path))


def _export(obj, units: dict) -> dict:
    out = {}
    for f in dataclasses.fields(obj):
        if f.name not in units:
            continue
        v = getattr(obj, f.name)
        scale = units[f.name]
        out[f.name] = v if scale is None or v is None else v / scale
    return out


def dump_config(design: GripperDesign, line: PneumaticLine) -> dict:
    """Inverse of :func:`parse_config` for the design and line sections."""
    return {
        "outer_spring": _export(design.outer_spring, SPRING_UNITS),
        "inner_spring": _export(design.inner_spring, SPRING_UNITS),
        "gripper": _export(design, GRIPPER_UNITS),
        "line": _export(line, LINE_UNITS),
    }
