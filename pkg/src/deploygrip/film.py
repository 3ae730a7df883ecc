"""Film contact against the lower end-cap and the resulting effective area.

Cross-section at one azimuth, with x measured inward from the end-cap rim and
z up from the end-cap face. The lowest coil is a circle of diameter ``t``
centred at ``(delta + t/2, l1p)``. Going up from the rim the film

1. lies on the end-cap for a length ``d`` (the contact distance),
2. lifts off along a free arc of radius ``r`` tangent to the end-cap,
3. wraps the coil through the angle ``theta`` and leaves it vertically.

The film length from the rim to that vertical tangent is ``l1``. Short films
never reach the end-cap (non-contact). Once the free arc has shrunk to half
the coil height (``r = l1p/2``) the film is in contact with itself, and any
further slack lies on the end-cap as a doubled layer (double contact).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import GripperDesign
from .errors import DomainError, NumericError

DEFAULT_STATIONS = 360
NEWTON_MAX_ITER = 100
NEWTON_TOL = 1e-14  # m


class ContactState(str, enum.Enum):
    NON_CONTACT = "non_contact"
    SINGLE_CONTACT = "single_contact"
    DOUBLE_CONTACT = "double_contact"


@dataclass(frozen=True)
class StationInput:
    l1: float
    l1p: float
    t: float
    delta: float
    R: float


@dataclass(frozen=True)
class FilmContactSolution:
    """Contact configuration at one station.

    ``free_radius`` and ``wrap_angle`` are NaN in the non-contact state,
    where the film never touches the end-cap.
    """

    state: ContactState
    free_radius: float
    wrap_angle: float
    contact_distance: float
    clamped: bool = False
    residual: float = 0.0


def _onset(inp: StationInput) -> tuple[float, float]:
    """Free radius and wrap angle when the free arc touches down at the rim."""
    h = 0.5 * inp.t
    wx = inp.delta + h
    r = (wx * wx + inp.l1p * inp.l1p - h * h) / (2.0 * inp.l1p + inp.t)
    return r, math.atan2(inp.l1p - r, wx)


def _fold_angle(inp: StationInput) -> float:
    return math.pi - math.asin(inp.l1p / (inp.l1p + inp.t))


def _family(inp: StationInput, theta: float) -> tuple[float, float, float]:
    """(r, d, l1) of the single-contact configuration with wrap angle ``theta``."""
    h = 0.5 * inp.t
    s = math.sin(theta)
    r = (inp.l1p - h * s) / (1.0 + s)
    d = inp.delta + h - (r + h) * math.cos(theta)
    return r, d, r * (theta + 0.5 * math.pi) + h * theta + d


def _check(inp: StationInput) -> None:
    for name in ("l1", "l1p", "t", "R"):
        if not getattr(inp, name) > 0:
            raise DomainError(f"station {name} must be positive, got {getattr(inp, name)!r}")
    if inp.delta < 0:
        raise DomainError(f"station delta must be non-negative, got {inp.delta!r}")
    if inp.l1 < inp.l1p * (1 - 1e-12):
        raise DomainError(f"film length l1={inp.l1!r} is shorter than the coil height l1p={inp.l1p!r}")


def contact_boundaries(inp: StationInput) -> tuple[float, float]:
    """Film lengths at which contact starts (l_ns) and the film folds (l_sd)."""
    _check(inp)
    if inp.l1p < inp.delta:
        raise DomainError(
            f"l_ns undefined: coil centre height {inp.l1p:.6g} m is below the radial "
            f"clearance {inp.delta:.6g} m, the free arc cannot touch down at the rim")
    r0, th0 = _onset(inp)
    l_ns = r0 * (th0 + 0.5 * math.pi) + 0.5 * inp.t * th0
    th1 = _fold_angle(inp)
    if not th1 > th0:
        raise DomainError(f"l_sd undefined: fold angle {th1:.6g} does not exceed onset angle {th0:.6g}")
    _, _, l_sd = _family(inp, th1)
    return l_ns, l_sd


def approximate_boundaries(inp: StationInput) -> tuple[float, float]:
    """Closed-form thresholds with the simplified onset radius.

    The onset radius drops ``t`` from its denominator and uses
    ``(l1p^2 + t*delta + delta^2) / (2*l1p)``; everything else matches
    :func:`contact_boundaries`. Kept for comparison only.
    """
    _check(inp)
    h = 0.5 * inp.t
    r = (inp.l1p**2 + inp.t * inp.delta + inp.delta**2) / (2.0 * inp.l1p)
    th_ns = math.acos(min(1.0, (h + inp.delta) / (r + h)))
    l_ns = r * (th_ns + 0.5 * math.pi) + h * th_ns
    th_sd = _fold_angle(inp)
    l_sd = 0.5 * (inp.t * (th_sd + 1 + math.sin(th_sd - 0.5 * math.pi))
                  + inp.l1p * (th_sd + 0.5 * math.pi + math.sin(th_sd - 0.5 * math.pi))) + inp.delta
    return l_ns, l_sd


def approximate_double_contact(inp: StationInput) -> float:
    """Contact distance from the simplified double-contact closed form."""
    return 0.5 * (inp.l1 - 0.5 * math.pi * inp.l1p - (0.5 * math.pi - 1) * inp.t + inp.delta)


def classify_state(inp: StationInput) -> ContactState:
    l_ns, l_sd = contact_boundaries(inp)
    if inp.l1 < l_ns:
        return ContactState.NON_CONTACT
    if inp.l1 < l_sd:
        return ContactState.SINGLE_CONTACT
    return ContactState.DOUBLE_CONTACT


def contact_residual(inp: StationInput, r: float, theta: float, d: float) -> tuple[float, float, float]:
    """Residuals of the three single-contact relations (height, length, reach)."""
    h = 0.5 * inp.t
    return (
        r + (r + h) * math.sin(theta) - inp.l1p,
        r * (theta + 0.5 * math.pi) + h * theta + d - inp.l1,
        inp.delta + h - (r + h) * math.cos(theta) - d,
    )


def _solve3(J, F):
    (a, b, c), (d, e, f), (g, h, i) = J
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det == 0.0 or not math.isfinite(det):
        raise NumericError("singular Jacobian in film contact solve")
    u, v, w = F
    x = (u * (e * i - f * h) - b * (v * i - f * w) + c * (v * h - e * w)) / det
    y = (a * (v * i - f * w) - u * (d * i - f * g) + c * (d * w - v * g)) / det
    z = (a * (e * w - v * h) - b * (d * w - v * g) + u * (d * h - e * g)) / det
    return x, y, z


def _newton(inp: StationInput, r: float, theta: float, d: float):
    h = 0.5 * inp.t
    F = contact_residual(inp, r, theta, d)
    norm = max(map(abs, F))
    for _ in range(NEWTON_MAX_ITER):
        if norm < NEWTON_TOL:
            return r, theta, d, norm
        s, c = math.sin(theta), math.cos(theta)
        J = ((1.0 + s, (r + h) * c, 0.0),
             (theta + 0.5 * math.pi, r + h, 1.0),
             (-c, (r + h) * s, -1.0))
        dr, dth, dd = _solve3(J, (-F[0], -F[1], -F[2]))
        lam = 1.0
        while True:
            rn, thn, dn = r + lam * dr, theta + lam * dth, d + lam * dd
            if rn > 0 and 0.0 <= thn <= math.pi:
                Fn = contact_residual(inp, rn, thn, dn)
                nn = max(map(abs, Fn))
                if nn < norm or lam < 1e-6:
                    break
            lam *= 0.5
            if lam < 1e-12:
                raise NumericError("film contact Newton step collapsed", residual=norm)
        r, theta, d, F, norm = rn, thn, dn, Fn, nn
    if norm < NEWTON_TOL * 100:
        return r, theta, d, norm
    raise NumericError(f"film contact Newton did not converge, residual {norm:.3e} m", residual=norm)


def _bracketed_start(inp: StationInput, lo: float, hi: float) -> float:
    """Wrap angle from bisection on the one-parameter contact family."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _family(inp, mid)[2] < inp.l1:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def solve_station(inp: StationInput) -> FilmContactSolution:
    l_ns, l_sd = contact_boundaries(inp)
    if inp.l1 < l_ns:
        return FilmContactSolution(ContactState.NON_CONTACT, math.nan, math.nan, 0.0)

    if inp.l1 < l_sd:
        state = ContactState.SINGLE_CONTACT
        th_lo, th_hi = _onset(inp)[1], _fold_angle(inp)
        try:
            r, theta, d, res = _newton(inp, 0.5 * inp.l1p, 0.25 * math.pi, 0.0)
            ok = th_lo - 1e-9 <= theta <= th_hi + 1e-9
        except NumericError:
            ok = False
        if not ok:
            # landed on a spurious root; restart from the bracketed family point
            theta = _bracketed_start(inp, th_lo, th_hi)
            r, d, _ = _family(inp, theta)
            r, theta, d, res = _newton(inp, r, theta, d)
    else:
        state = ContactState.DOUBLE_CONTACT
        theta = _fold_angle(inp)
        r, d_fold, _ = _family(inp, theta)
        d = d_fold + 0.5 * (inp.l1 - l_sd)
        res = 0.0

    clamped = d > inp.R
    if clamped:
        d = inp.R
    return FilmContactSolution(state, r, theta, max(d, 0.0), clamped, res)


def station_inputs(design: GripperDesign, length: float, stations: int = DEFAULT_STATIONS):
    """(azimuth, StationInput) pairs on ``stations`` equal intervals of [0, 2pi].

    The lowest coil climbs one compressed pitch ``length/n`` per turn, and the
    film slack ``(L - length)/n`` is shared equally by the coils.
    """
    if stations < 1:
        raise DomainError("need at least one azimuthal interval")
    n = design.outer_spring.total_coils
    t = design.contact_wire
    pitch = length / n
    slack = (design.free_length - length) / n
    base = 0.5 * t + design.coil_clearance
    out = []
    for k in range(stations + 1):
        phi = 2.0 * math.pi * k / stations
        l1p = base + pitch * k / stations
        out.append((phi, StationInput(l1p + slack, l1p, t, design.radial_clearance, design.endcap_radius)))
    return out


def _check_length(design: GripperDesign, length: float) -> None:
    lo, hi = design.solid_length, design.free_length
    if not lo * (1 - 1e-12) <= length <= hi * (1 + 1e-12):
        raise DomainError(f"length {length!r} m outside [solid {lo:.6g}, free {hi:.6g}] m")


def solve_stations(design: GripperDesign, length: float, stations: int = DEFAULT_STATIONS):
    """(azimuth, FilmContactSolution) for every station at body length ``length``."""
    _check_length(design, length)
    out = []
    for phi, inp in station_inputs(design, length, stations):
        try:
            out.append((phi, solve_station(inp)))
        except DomainError as exc:
            raise DomainError(f"{exc} (station at azimuth {phi:.6f} rad)") from exc
        except NumericError as exc:
            raise NumericError(f"{exc} (station at azimuth {phi:.6f} rad)", residual=exc.residual) from exc
    return out


def effective_area(design: GripperDesign, length: float, stations: int = DEFAULT_STATIONS) -> float:
    """Pressure-bearing end-cap area left uncovered by adhered film."""
    sols = solve_stations(design, length, stations)
    R = design.endcap_radius
    vals = [0.5 * (R - s.contact_distance) ** 2 for _, s in sols]
    h = 2.0 * math.pi / stations
    return h * (sum(vals) - 0.5 * (vals[0] + vals[-1]))


def effective_area_fraction(design: GripperDesign, length: float, stations: int = DEFAULT_STATIONS) -> float:
    return effective_area(design, length, stations) / (math.pi * design.endcap_radius**2)
