"""``deploygrip`` command line.

Every subcommand writes CSV to standard output (or ``--out``). Units at this
boundary are mm, kPa, L/min, N and s.

Exit codes: 0 ok, 2 input or validation error, 3 numeric failure,
4 infeasible optimisation.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import replace

import numpy as np

from . import picking, study
from .config import ConfigError, load_raw, parse_config
from .core import validate_design
from .cycle import repeat_cycles, simulate_cycle
from .errors import DomainError, GripperError, InfeasibleError, NumericError
from .film import DEFAULT_STATIONS, effective_area, solve_stations

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 2, 3, 4

log = logging.getLogger("deploygrip")


class InputError(GripperError):
    """Bad command-line input that is not a config problem."""


def _fmt(v) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    if hasattr(v, "value"):
        return str(v.value)
    return str(v)


def _write(args, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _raw(args) -> dict:
    return load_raw(args.config) if args.config else {}


def _load(args):
    cfg = parse_config(_raw(args))
    problems = validate_design(cfg.design, cfg.line)
    if problems:
        raise ConfigError("invalid design: " + "; ".join(str(v) for v in problems),
                          key=problems[0].field)
    stations = args.stations or cfg.stations or DEFAULT_STATIONS
    if stations < 2:
        raise InputError("--stations must be at least 2")
    if cfg.scenario is not None and args.timestep is not None:
        cfg = replace(cfg, scenario=replace(cfg.scenario, timestep=args.timestep))
    return cfg, stations


def _grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:count``."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return [float(x) for x in np.linspace(float(lo), float(hi), int(n))]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"cannot read grid '{text}'; use a,b,c or start:stop:count") from None


def _axis(text: str) -> tuple:
    name, sep, grid = text.partition("=")
    if not sep:
        raise InputError(f"axis '{text}' must look like section.key=GRID")
    return name.strip(), _grid(grid)


def cmd_range(args) -> int:
    cfg, _ = _load(args)
    r = picking.picking_range(cfg.design, cfg.line)
    _write(args, ["d_min_mm", "d_max_mm", "deployment_ratio", "min_case"],
           [(r.d_min * 1e3, r.d_max * 1e3, r.deployment_ratio, r.min_case)])
    return EXIT_OK


def cmd_force_profile(args) -> int:
    cfg, stations = _load(args)
    if args.distances:
        xs = [x * 1e-3 for x in _grid(args.distances)]
    else:
        xs = picking.distance_grid(picking.picking_range(cfg.design, cfg.line), args.step * 1e-3)
    pts = picking.force_profile(cfg.design, cfg.line, xs, stations)
    _write(args, ["distance_mm", "F_b_N", "F_s_N", "F_pick_N", "limiting"],
           [(p.distance * 1e3, p.body_force_max, p.cup_force_max, p.picking_force, p.limiting)
            for p in pts])
    return EXIT_OK


def cmd_area(args) -> int:
    cfg, stations = _load(args)
    length = cfg.design.free_length if args.length is None else args.length * 1e-3
    if args.dump_stations:
        sols = solve_stations(cfg.design, length, stations)
        _write(args, ["phi", "state", "r", "theta", "d"],
               [(f, s.state, s.free_radius, s.wrap_angle, s.contact_distance) for f, s in sols])
    else:
        _write(args, ["A_e_mm2"], [(effective_area(cfg.design, length, stations) * 1e6,)])
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg, stations = _load(args)
    if cfg.scenario is None:
        raise ConfigError("simulate needs an 'object' section", key="object")
    if args.repeat > 1:
        s = repeat_cycles(cfg.design, cfg.line, cfg.scenario, args.repeat, stations)
        patm = cfg.line.atmospheric_pressure
        _write(args, ["cycle", "outcome", "cycle_time_s", "min_P_b_kPa", "max_P_s_kPa", "digest"],
               [(i, o, ct, (pb - patm) / 1e3, (ps - patm) / 1e3, d)
                for i, (o, ct, pb, ps, d) in enumerate(zip(
                    s.outcomes, s.cycle_times, s.min_body_pressure, s.max_cup_pressure, s.digests))])
        return EXIT_OK
    tr = simulate_cycle(cfg.design, cfg.line, cfg.scenario, stations)
    _write(args, ["t_s", "phase", "P_b_kPa", "P_s_kPa", "l_mm", "F_b_N", "outcome"],
           [row + (tr.outcome,) for row in tr.rows(cfg.line.atmospheric_pressure)])
    return EXIT_OK


def cmd_sweep(args) -> int:
    raw = _raw(args)
    spec = study.SweepSpec(_axis(args.axis1), _axis(args.axis2),
                           tuple(m.strip() for m in args.metrics.split(",")))
    parse_config(raw)
    stations = args.stations or DEFAULT_STATIONS
    if args.timestep is not None:
        raw = study.set_parameter(raw, "scenario.timestep", args.timestep)
    rows = study.sweep(spec, raw, stations, workers=args.workers)
    _write(args, ["axis1", "axis2", "metric", "value"], rows)
    return EXIT_OK


def cmd_optimize(args) -> int:
    raw = _raw(args)
    space = {}
    for key in ("wire_diameter", "spring_constant", "flow_rate"):
        text = getattr(args, key)
        if text is None:
            continue
        if ".." in text:
            lo, hi = text.split("..")
            try:
                space[key] = {"min": float(lo), "max": float(hi)}
            except ValueError:
                raise InputError(f"cannot read bounds '{text}'") from None
        else:
            space[key] = _grid(text)
    spec = study.OptimizeSpec(args.objective, args.required_force, args.max_d_min, args.distance,
                              space, args.points)
    best = study.optimize(spec, raw, args.stations or DEFAULT_STATIONS, workers=args.workers)
    metrics = {k: v for k, v in best.metrics.items()}
    header = ["wire_diameter_mm", "spring_constant_N_m", "flow_rate_L_min", "objective"]
    header += list(metrics) + [f"margin_{k}" for k in best.margins]
    row = [best.wire_diameter, best.spring_constant, best.flow_rate, best.objective]
    row += list(metrics.values()) + list(best.margins.values())
    _write(args, header, [row])
    return EXIT_OK


def cmd_validate(args) -> int:
    mcols, mrows = study.read_csv(args.model)
    ecols, erows = study.read_csv(args.experiment)
    if args.value not in mcols or args.value not in ecols:
        raise InputError(f"both CSVs need a '{args.value}' column")
    if args.keys:
        keys = [k.strip() for k in args.keys.split(",")]
    else:
        keys = [c for c in ecols if c in mcols and c != args.value]
    unknown = [k for k in keys if k not in mcols or k not in ecols]
    if not keys or unknown:
        raise InputError(f"join keys missing from a CSV: {', '.join(unknown) or '(none shared)'}")
    try:
        out, summary = study.residuals(mrows, erows, keys, args.value)
    except KeyError as exc:
        listed = "; ".join(",".join(str(v) for v in kk) for kk in exc.args[0])
        raise InputError(f"experiment rows without a model match on ({','.join(keys)}): {listed}") from None
    _write(args, keys + ["model", "experiment", "residual"],
           [list(kv) + [mv, ev, res] for kv, mv, ev, res in out])
    for group, (mx, mean) in summary.items():
        print(f"{group}: max_abs_error={mx:.6g} mean_abs_error={mean:.6g}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML design/scenario file")
    common.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    common.add_argument("--stations", type=int, metavar="N", help="azimuthal stations per area integral")
    common.add_argument("--timestep", type=float, metavar="S", help="cycle simulation step")

    p = argparse.ArgumentParser(prog="deploygrip", description=__doc__.splitlines()[0],
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("range", parents=[common], help="minimum/maximum picking distance")
    s.set_defaults(func=cmd_range)

    s = sub.add_parser("force-profile", parents=[common], help="picking force over the range")
    s.add_argument("--step", type=float, default=1.0, help="distance spacing in mm (default 1)")
    s.add_argument("--distances", help="explicit distances in mm: a,b,c or start:stop:count")
    s.set_defaults(func=cmd_force_profile)

    s = sub.add_parser("area", parents=[common], help="effective end-cap area at a spring length")
    s.add_argument("--length", type=float, help="spring length in mm (default: free length)")
    s.add_argument("--dump-stations", action="store_true", help="per-station phi,state,r,theta,d")
    s.set_defaults(func=cmd_area)

    s = sub.add_parser("simulate", parents=[common], help="one pick-and-place cycle trace")
    s.add_argument("--repeat", type=int, default=1, help="replay N cycles and summarise each")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", parents=[common], help="two-parameter grid, long-format CSV")
    s.add_argument("--axis1", required=True, help="section.key=GRID, e.g. outer_spring.wire_diameter=1.4,1.6")
    s.add_argument("--axis2", required=True, help="section.key=GRID, e.g. line.flow_rate=4:14:6")
    s.add_argument("--metrics", default="d_min_mm,d_max_mm,deployment_ratio",
                   help=f"comma list from: {', '.join(study.METRICS)}")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("optimize", parents=[common], help="exhaustive design grid search")
    s.add_argument("--objective", choices=[o.value for o in study.Objective], default="max_range")
    s.add_argument("--required-force", type=float, help="minimum picking force in N")
    s.add_argument("--max-d-min", type=float, help="largest acceptable d_min in mm")
    s.add_argument("--distance", type=float, help="force evaluation distance in mm (default mid-range)")
    s.add_argument("--wire-diameter", help="mm: list a,b or bounds lo..hi")
    s.add_argument("--spring-constant", help="N/m: list a,b or bounds lo..hi")
    s.add_argument("--flow-rate", help="L/min: list a,b or bounds lo..hi")
    s.add_argument("--points", type=int, default=20, help="grid points per bounded axis")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("validate", parents=[common], help="model minus experiment residuals")
    s.add_argument("model")
    s.add_argument("experiment")
    s.add_argument("--keys", help="join columns (default: all shared columns except the value)")
    s.add_argument("--value", default="value", help="compared column (default 'value')")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.addHandler(handler)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc} [binding: {exc.binding}]", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"config error ({exc.key}): {exc}" if exc.key else f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
