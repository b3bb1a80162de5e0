"""The reflex navigation rule: facet widening and escape-direction selection.

Each obstacle class carries a widening function that maps facet distance to an
angular margin; nearby facets are widened more.  When the desired bearing is
blocked by a widened facet, the commanded direction snaps to the nearest
qualifying facet endpoint, counter-clockwise winning ties.  The robot always
drives at full speed; only the direction is chosen.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geom import ANGLE_TOL, TWO_PI, Vec2, unit, wrap_angle
from .sensor import Facet

# Shipped default widening fracture table: piecewise linear in distance,
# constant beyond the last fracture.
DEFAULT_DELTA_TABLE: tuple[tuple[float, float], ...] = (
    (0.0, 1.52),
    (0.5, 1.27),
    (1.0, 1.21),
    (1.5, 0.43),
    (2.0, 0.2),
    (2.5, 0.02),
    (3.0, 0.01),
    (100.0, 0.003),
)


class NoEscapeDirection(RuntimeError):
    """No qualifying endpoint exists (surrounded or over-widened scene)."""


@dataclass(frozen=True)
class DeltaFunction:
    """Continuous nonincreasing widening angle as a function of distance.

    Piecewise linear between fracture points, constant beyond the last one,
    valued in [0, pi/2).
    """

    distances: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if len(d) == 0 or len(d) != len(v):
            raise ValueError("need matching, nonempty fracture arrays")
        if np.any(d < 0.0) or np.any(np.diff(d) <= 0.0):
            raise ValueError("fracture distances must be nonnegative and increasing")
        if np.any(v < 0.0) or np.any(v >= math.pi / 2.0):
            raise ValueError("widening values must lie in [0, pi/2)")
        if np.any(np.diff(v) > 1e-12):
            raise ValueError("widening must be nonincreasing in distance")

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "DeltaFunction":
        return cls(tuple(float(p[0]) for p in pairs), tuple(float(p[1]) for p in pairs))

    @classmethod
    def default(cls) -> "DeltaFunction":
        return cls.from_pairs(DEFAULT_DELTA_TABLE)

    @classmethod
    def constant(cls, value: float) -> "DeltaFunction":
        return cls((0.0,), (float(value),))

    def __call__(self, d: float) -> float:
        return float(np.interp(d, self.distances, self.values))

    def pairs(self) -> list[list[float]]:
        return [[d, v] for d, v in zip(self.distances, self.values)]


@dataclass
class ExtendedFacet:
    """A facet widened by delta on each side, with the clamped profile."""

    base: Facet
    delta: float

    @property
    def lo(self) -> float:
        return self.base.alpha_minus - self.delta

    @property
    def hi(self) -> float:
        return self.base.alpha_plus + self.delta

    @property
    def width(self) -> float:
        return min(self.hi - self.lo, TWO_PI)

    @property
    def full_circle(self) -> bool:
        return self.hi - self.lo >= TWO_PI - ANGLE_TOL

    def contains(self, angle: float, tol: float = ANGLE_TOL) -> bool:
        if self.full_circle:
            return True
        return (angle - self.lo) % TWO_PI <= self.width + tol

    def endpoints(self) -> tuple[float, float]:
        return wrap_angle(self.lo), wrap_angle(self.hi)

    def profile_at(self, angle: float) -> float:
        # Clamping is to the original arc, not the widened range.
        return self.base.profile_at(angle)


class Branch(enum.Enum):
    UNOBSTRUCTED = "unobstructed"
    OBSTRUCTED = "obstructed"


@dataclass
class ControlDecision:
    velocity: Vec2
    branch: Branch
    chosen_angle: float
    obstructing_index: int | None = None
    endpoint_set: list[float] = field(default_factory=list)
    tie_break: bool = False


def enlarge(facets: Sequence[Facet], classes) -> list[ExtendedFacet]:
    """Widen every facet by its class's widening at the facet's min distance."""
    if hasattr(classes, "items"):
        table = {cid: c.enlargement for cid, c in classes.items()}
    else:
        table = {c.id: c.enlargement for c in classes}
    out = []
    for f in facets:
        delta_fn = table[f.class_id]
        out.append(ExtendedFacet(f, delta_fn(f.d_min)))
    return out


def select_control(beta: float, extended: Sequence[ExtendedFacet], v: float,
                   d_star: float | None = None) -> ControlDecision:
    """Pick the commanded velocity for one scan instant.

    Unobstructed desired bearing: drive straight at it.  Otherwise take the
    nearest (ccw on ties) endpoint, among endpoints of all widened facets that
    fall inside the obstructing facet's range and are at least as close as it.

    With `d_star` set, the obstructed branch only engages while some facet is
    nearer than that threshold (off by default; no guarantees claimed).
    """
    obstructing = [(i, ef) for i, ef in enumerate(extended) if ef.contains(beta)]
    gated = d_star is not None and (
        not extended or min(ef.base.d_min for ef in extended) >= d_star)
    if not obstructing or gated:
        return ControlDecision(unit(beta) * v, Branch.UNOBSTRUCTED, beta)

    k_index, k = min(obstructing, key=lambda item: item[1].profile_at(beta))
    if k.full_circle:
        raise NoEscapeDirection("obstructing facet covers the full circle")

    dk = k.profile_at
    endpoints: list[float] = []
    for ef in extended:
        for a in ef.endpoints():
            if k.contains(a) and ef.profile_at(a) <= dk(a) + ANGLE_TOL:
                endpoints.append(a)
    if not endpoints:
        raise NoEscapeDirection("no qualifying facet endpoint")

    ccw_best = min(endpoints, key=lambda a: (a - beta) % TWO_PI)
    cw_best = min(endpoints, key=lambda a: (beta - a) % TWO_PI)
    d_ccw = (ccw_best - beta) % TWO_PI
    d_cw = (beta - cw_best) % TWO_PI
    tie = abs(d_ccw - d_cw) <= ANGLE_TOL
    alpha0 = ccw_best if (tie or d_ccw < d_cw) else cw_best
    return ControlDecision(unit(alpha0) * v, Branch.OBSTRUCTED, alpha0,
                           obstructing_index=k_index, endpoint_set=endpoints,
                           tie_break=tie)


def check_safety_tuning(classes, v: float) -> dict[int, tuple[bool, float]]:
    """Collision-safety tuning: widening at contact must beat arcsin(v_o/v).

    Returns per class (pass, margin) with margin = widening(0) - arcsin(v_o/v).
    """
    out: dict[int, tuple[bool, float]] = {}
    for c in classes:
        ratio = c.speed_bound / v
        if ratio >= 1.0:
            out[c.id] = (False, -math.inf)
            continue
        need = math.asin(ratio)
        margin = c.enlargement(0.0) - need
        out[c.id] = (margin > 0.0, margin)
    return out


def check_drift_tuning(classes, hat_heights, delta_star: dict[int, float],
                       v: float) -> dict[int, tuple[bool, str]]:
    """Drift tuning: widening flat on [0, h] and strictly inside the target band.

    `hat_heights` is an iterable of per-obstacle (class_id, height bound)
    pairs; the class-level bound is their maximum.  Per class requires the
    widening constant on [0, h] at its contact value, which must lie strictly
    in (arcsin(v_o/v), delta_star).
    """
    h_bound: dict[int, float] = {}
    for cid, h in hat_heights:
        h_bound[cid] = max(h_bound.get(cid, 0.0), float(h))
    out: dict[int, tuple[bool, str]] = {}
    for c in classes:
        ratio = c.speed_bound / v
        if ratio >= 1.0:
            out[c.id] = (False, "class speed bound not below robot speed")
            continue
        lo = math.asin(ratio)
        hi = delta_star[c.id]
        d0 = c.enlargement(0.0)
        h = h_bound.get(c.id, 0.0)
        if abs(c.enlargement(h) - d0) > 1e-12:
            out[c.id] = (False, f"widening not constant on [0, {h:.6g}]")
        elif not (lo < d0 < hi):
            out[c.id] = (False,
                         f"widening(0)={d0:.6g} outside ({lo:.6g}, {hi:.6g})")
        else:
            out[c.id] = (True, "ok")
    return out
