"""Declarative scenario files and generators for every shipped scene family.

A scenario file is YAML with sections `classes`, `obstacles`, `robot`, `sim`,
`goal_distance`, and free-form `metadata`.  Obstacle shapes are disks,
stadiums, thin segments, or rounded convex polygons; motions compose a center
path (static / line / sinusoid / belt), a spin, and an optional breathing
half-length.  Generators are seed-deterministic and construct scenes whose
spacing properties hold by construction, recording design intent in metadata.
"""

from __future__ import annotations

import importlib.resources
import math
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml
from scipy.optimize import brentq

from .geom import SEGMENT_RADIUS_RATIO, Vec2
from .hats import (criterion_gamma, criterion_omega, criterion_upsilon,
                   criterion_xi_fn, disk_hat_height, grid_speed_ratio_at,
                   rotating_grid_threshold, segment_hat_height)
from .navlaw import DEFAULT_DELTA_TABLE, DeltaFunction
from .sim import RobotState, SimConfig
from .world import (BeltPath, ConstantScalar, LinePath, Motion, Obstacle,
                    ObstacleClass, RampScalar, SinusoidPath, SinusoidScalar,
                    StaticPath, World)


@dataclass
class ClassSpec:
    id: int
    speed_bound: float
    delta: object = "default"   # "default" | [[d, value], ...] | float constant

    def delta_function(self) -> DeltaFunction:
        if self.delta == "default":
            return DeltaFunction.from_pairs(DEFAULT_DELTA_TABLE)
        if isinstance(self.delta, (int, float)):
            return DeltaFunction.constant(float(self.delta))
        return DeltaFunction.from_pairs(self.delta)


@dataclass
class ObstacleSpec:
    shape: dict
    motion: dict
    class_id: int = 0


@dataclass
class RobotSpec:
    start: list
    v: float
    f: list
    heading: float = 0.0


@dataclass
class ScenarioSpec:
    name: str
    classes: list
    obstacles: list
    robot: RobotSpec
    sim: dict = field(default_factory=dict)
    goal_distance: float = 25.0
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "classes": [asdict(c) for c in self.classes],
            "obstacles": [asdict(o) for o in self.obstacles],
            "robot": asdict(self.robot),
            "sim": dict(self.sim),
            "goal_distance": self.goal_distance,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        return cls(
            name=d["name"],
            classes=[ClassSpec(**c) for c in d.get("classes", [])],
            obstacles=[ObstacleSpec(**o) for o in d.get("obstacles", [])],
            robot=RobotSpec(**d["robot"]),
            sim=dict(d.get("sim", {})),
            goal_distance=float(d.get("goal_distance", 25.0)),
            metadata=dict(d.get("metadata", {})),
        )


def save_scenario(spec: ScenarioSpec, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(spec.to_dict(), sort_keys=False))


def load_scenario(path_or_name: str | Path) -> ScenarioSpec:
    """Load a scenario file; bare names resolve to the shipped scenarios."""
    p = Path(path_or_name)
    if not p.exists():
        res = importlib.resources.files("reflexnav").joinpath(
            f"data/scenarios/{path_or_name}.yaml")
        if res.is_file():
            return ScenarioSpec.from_dict(yaml.safe_load(res.read_text()))
        raise FileNotFoundError(f"no scenario file or builtin named {path_or_name!r}")
    return ScenarioSpec.from_dict(yaml.safe_load(p.read_text()))


def builtin_scenarios() -> list[str]:
    res = importlib.resources.files("reflexnav").joinpath("data/scenarios")
    return sorted(p.name[:-5] for p in res.iterdir() if p.name.endswith(".yaml"))


# -- building runtime objects ---------------------------------------------------


def _vec(xy) -> Vec2:
    return Vec2(float(xy[0]), float(xy[1]))


def _build_path(d: dict):
    kind = d["kind"]
    if kind == "static":
        return StaticPath(_vec(d["point"]))
    if kind == "line":
        return LinePath(_vec(d["start"]), _vec(d["velocity"]))
    if kind == "sinusoid":
        terms = tuple((_vec(t["amp"]), float(t["omega"]), float(t["phase"]))
                      for t in d.get("terms", []))
        return SinusoidPath(_vec(d["base"]), terms)
    if kind == "belt":
        return BeltPath(_vec(d["base"]), _vec(d["drift"]),
                        float(d["trigger_margin"]), float(d["slot_dx"]),
                        float(d["slot_dy"]), float(d["dip_y"]),
                        float(d["speed"]), float(d.get("blend", 0.2)))
    raise ValueError(f"unknown path kind {kind!r}")


def _build_scalar(d: dict | None, default: float = 0.0):
    if d is None:
        return ConstantScalar(default)
    kind = d["kind"]
    if kind == "constant":
        return ConstantScalar(float(d["value"]))
    if kind == "ramp":
        return RampScalar(float(d["base"]), float(d["rate"]))
    if kind == "sinusoid":
        terms = tuple((float(t["amp"]), float(t["omega"]), float(t["phase"]))
                      for t in d.get("terms", []))
        return SinusoidScalar(float(d["base"]), terms)
    raise ValueError(f"unknown scalar path kind {kind!r}")


def _build_obstacle(spec: ObstacleSpec) -> Obstacle:
    shape = spec.shape
    kind = shape["kind"]
    motion = spec.motion
    center = _build_path(motion["center"])
    spin = _build_scalar(motion.get("spin"), 0.0)
    length = motion.get("length")
    if kind == "disk":
        body = [[0.0, 0.0]]
        radius = float(shape["radius"])
        half_length = None
    elif kind in ("stadium", "segment"):
        L = float(shape["half_length"])
        radius = float(shape.get("radius") or SEGMENT_RADIUS_RATIO * L) \
            if kind == "segment" else float(shape["radius"])
        body = [[L, 0.0], [-L, 0.0]]
        half_length = _build_scalar(length) if length is not None else None
    elif kind == "polygon":
        body = [[float(x), float(y)] for x, y in shape["vertices"]]
        radius = float(shape["radius"])
        half_length = None
        if length is not None:
            raise ValueError("breathing length applies to stadiums only")
    else:
        raise ValueError(f"unknown shape kind {kind!r}")
    return Obstacle(body, radius, Motion(center, spin, half_length), spec.class_id)


def build(spec: ScenarioSpec) -> tuple[World, RobotState, SimConfig]:
    """Instantiate runtime objects.  Build a fresh world per run: motions with
    triggers accumulate state across a run."""
    classes = [ObstacleClass(c.id, c.speed_bound, c.delta_function())
               for c in spec.classes]
    obstacles = [_build_obstacle(o) for o in spec.obstacles]
    world = World(obstacles, classes)
    state = RobotState(_vec(spec.robot.start), spec.robot.heading,
                       spec.robot.v, _vec(spec.robot.f))
    cfg = dict(spec.sim)
    cfg.setdefault("goal_distance", spec.goal_distance)
    config = SimConfig(**cfg)
    return world, state, config


# -- generator helpers ----------------------------------------------------------


def _invert_increasing(fn, target: float, lo: float = 1e-9,
                       hi: float = 0.999999) -> float:
    """Solve fn(x) = target for an increasing fn on (lo, hi); clamps to hi."""
    if fn(hi) <= target:
        return hi
    if fn(lo) >= target:
        return lo
    return float(brentq(lambda x: fn(x) - target, lo, hi))


def _sinusoid_motion(rng: random.Random, base: tuple[float, float],
                     speed_bound: float, n_terms: int = 3,
                     axis: tuple[float, float] | None = None) -> tuple[dict, float]:
    """Random bounded sum-of-sinusoids translation; returns (dict, amplitude).

    The analytic speed bound of the result equals `speed_bound`; the returned
    amplitude bounds the positional excursion from `base`.
    """
    k = rng.randint(1, n_terms)
    dirs = []
    for _ in range(k):
        if axis is not None:
            dirs.append(axis)
        else:
            a = rng.uniform(0.0, 2.0 * math.pi)
            dirs.append((math.cos(a), math.sin(a)))
    weights = [rng.uniform(0.3, 1.0) for _ in range(k)]
    omegas = [rng.uniform(1.0, 2.0 * math.pi * 0.5) for _ in range(k)]
    wsum = sum(w * o for w, o in zip(weights, omegas))
    scale = speed_bound / wsum if wsum > 0 else 0.0
    terms = []
    amplitude = 0.0
    for (ux, uy), w, o in zip(dirs, weights, omegas):
        amp = scale * w
        amplitude += amp
        terms.append({"amp": [amp * ux, amp * uy], "omega": o,
                      "phase": rng.uniform(0.0, 2.0 * math.pi)})
    return ({"kind": "sinusoid", "base": [base[0], base[1]], "terms": terms},
            amplitude)


def _drift_class(cid: int, v_o: float, v: float, delta_bar: float,
                 delta_star: float) -> ClassSpec:
    """Constant widening strictly inside (delta_bar, delta_star)."""
    value = delta_bar + 0.5 * (delta_star - delta_bar)
    return ClassSpec(cid, v_o, value)


def _base_sim(**overrides) -> dict:
    sim = {"dt": 0.1, "rays": 40, "edge_threshold": 2.0, "max_range": 20.0,
           "horizon": 120.0}
    sim.update(overrides)
    return sim


# -- generators -----------------------------------------------------------------


class GenerationFailed(RuntimeError):
    """Placement could not satisfy the spacing constraints."""


def gen_disk_field(n: int, r_range: tuple[float, float], v_o: float,
                   spacing_factor: float, seed: int, v: float = 1.0,
                   tuning: str = "table1") -> ScenarioSpec:
    """Field of irregularly translating disks ahead of the robot.

    Pairwise surface spacing stays >= spacing_factor * Upsilon(xi) * max R at
    all times by construction (home positions separated by the requirement
    plus both motion amplitudes).  With spacing_factor < 1 the first two disks
    are pinned static and axis-aligned inside each other's hat reach, so the
    progress-guarantee check has a genuine violation to find.
    """
    rng = random.Random(seed)
    xi = v_o / v
    r_max = r_range[1]
    upsilon = criterion_upsilon(xi)
    spacing = spacing_factor * upsilon * r_max

    xi_star = _invert_increasing(criterion_upsilon,
                                 max(spacing_factor, 1.02) * upsilon / 1.02,
                                 lo=xi + 1e-6) if spacing_factor >= 1.0 else xi
    delta_bar = math.asin(xi)
    delta_star = math.asin(min(xi_star, 0.999999))

    field_x = (4.0, 17.5)
    field_y = (-6.0, 6.0)
    homes: list[tuple[float, float, float, float]] = []  # x, y, radius, amp
    obstacles: list[ObstacleSpec] = []

    if spacing_factor < 1.0 and n >= 2:
        r = r_max
        gap = spacing_factor * disk_hat_height(r, delta_bar)
        x1 = 8.0
        for k, x in enumerate((x1, x1 - 2 * r - gap)):
            homes.append((x, 0.0, r, 0.0))
            obstacles.append(ObstacleSpec({"kind": "disk", "radius": r},
                                          {"center": {"kind": "static",
                                                      "point": [x, 0.0]}}, 0))

    attempts = 0
    while len(homes) < n:
        attempts += 1
        if attempts > 10_000:
            raise GenerationFailed("disk placement exceeded attempt budget")
        r = rng.uniform(*r_range)
        motion, amp = _sinusoid_motion(rng, (0.0, 0.0), 0.95 * v_o)
        x = rng.uniform(*field_x)
        y = rng.uniform(*field_y)
        ok = all(math.hypot(x - hx, y - hy) >= r + hr + spacing + amp + ha + 0.05
                 for hx, hy, hr, ha in homes)
        # Keep the approach lane clear of hats at the start line.
        if ok and x - r - amp < 2.5:
            ok = False
        if not ok:
            continue
        motion["base"] = [x, y]
        homes.append((x, y, r, amp))
        obstacles.append(ObstacleSpec({"kind": "disk", "radius": r},
                                      {"center": motion}, 0))

    if tuning == "drift":
        classes = [_drift_class(0, v_o, v, delta_bar, delta_star)]
    else:
        classes = [ClassSpec(0, v_o, "default")]

    meta = {
        "family": "disk_field",
        "seed": seed,
        "expect": {"lemma1": True, "theorem1_speed": True, "safety": True,
                   "theorem2": spacing_factor >= 1.0,
                   "drift_tuning": tuning == "drift"},
        "theorem2": {"delta_star": {"0": delta_star},
                     "hat_height": {"0": disk_hat_height(r_max, delta_star)}},
    }
    return ScenarioSpec(f"disk_field_s{seed}", classes, obstacles,
                        RobotSpec([0.0, 0.0], v, [1.0, 0.0]),
                        _base_sim(), 22.0, meta)


def gen_corridor(groups: int, radius: float, v_o: float, d_in: float,
                 d_i: float, seed: int = 0, v: float = 1.0,
                 tuning: str = "drift") -> ScenarioSpec:
    """Corridor with walls parallel to the travel direction and disk groups.

    Disk centers within a group stay vertically aligned; each group's
    horizontal projection stays inside its own steady interval, intervals
    pairwise separated by d_i.  Requires xi < 1/sqrt(2) so the widened hats
    stay inside the strip each disk spans.
    """
    rng = random.Random(seed)
    xi = v_o / v
    if xi >= 1.0 / math.sqrt(2.0):
        raise GenerationFailed("corridor passage needs v > sqrt(2) * v_o")

    w_half = 3.0 * radius          # corridor inner half-width
    wall_r = 0.5 * radius
    wall_len = d_in + groups * (d_i + 2.2 * radius) + 14.0
    wall_x = wall_len / 2.0 - 2.0
    sway = 0.3 * radius

    obstacles = [
        ObstacleSpec({"kind": "stadium", "half_length": wall_len / 2.0,
                      "radius": wall_r},
                     {"center": {"kind": "static",
                                 "point": [wall_x, w_half + wall_r]}}, 1),
        ObstacleSpec({"kind": "stadium", "half_length": wall_len / 2.0,
                      "radius": wall_r},
                     {"center": {"kind": "static",
                                 "point": [wall_x, -(w_half + wall_r)]}}, 1),
    ]

    # Two disks per group, stacked with room to oscillate vertically.
    y_amp = (w_half - 2.0 * radius - 0.15) / 2.0
    x0 = d_in + radius + sway
    for g in range(groups):
        gx = x0 + g * (d_i + 2.0 * radius + 2.0 * sway)
        om_x = rng.uniform(0.8, 1.6)
        x_motion_terms = [{"amp": [0.4 * v_o / om_x, 0.0], "omega": om_x,
                           "phase": rng.uniform(0, 2 * math.pi)}]
        for slot, y0 in enumerate((w_half / 2.0, -w_half / 2.0)):
            om_y = rng.uniform(0.8, 1.6)
            ay = min(0.55 * v_o / om_y, y_amp)
            terms = list(x_motion_terms) + [
                {"amp": [0.0, ay], "omega": om_y,
                 "phase": rng.uniform(0, 2 * math.pi)}]
            obstacles.append(ObstacleSpec(
                {"kind": "disk", "radius": radius},
                {"center": {"kind": "sinusoid", "base": [gx, y0],
                            "terms": terms}}, 0))

    delta_bar = math.asin(xi)
    # Largest usable ratio: strip containment and both axis gaps, with margin.
    limits = [0.98 / math.sqrt(2.0)]
    limits.append(_invert_increasing(
        lambda s: disk_hat_height(radius, math.asin(s)), 0.9 * d_in,
        lo=xi + 1e-6))
    limits.append(_invert_increasing(
        lambda s: radius * ((1 + s * s) / math.sqrt(1 - s * s) - 1.0),
        0.9 * d_i, lo=xi + 1e-6))
    xi_star = max(min(limits), min(xi * 1.02 + 1e-3, 0.999))
    delta_star = math.asin(xi_star)

    if tuning == "drift":
        classes = [_drift_class(0, v_o, v, delta_bar, delta_star),
                   ClassSpec(1, 0.0, "default")]
    else:
        classes = [ClassSpec(0, v_o, "default"), ClassSpec(1, 0.0, "default")]

    meta = {
        "family": "corridor",
        "seed": seed,
        "expect": {"lemma1": True, "theorem1_speed": True, "safety": True,
                   "theorem2": xi_star > xi,
                   "drift_tuning": tuning == "drift"},
        "theorem2": {"delta_star": {"0": delta_star, "1": 0.0},
                     "hat_height": {"0": disk_hat_height(radius, delta_star),
                                    "1": 0.0}},
    }
    goal = x0 + groups * (d_i + 2.0 * radius + 2.0 * sway) + 4.0
    return ScenarioSpec(f"corridor_s{seed}", classes, obstacles,
                        RobotSpec([0.0, 0.0], v, [1.0, 0.0]),
                        _base_sim(), goal, meta)


def gen_segment_field(n: int, half_length: float, v_o: float, d_f: float,
                      d_f_perp: float, seed: int, v: float = 1.0,
                      tuning: str = "table1", rows: int = 3,
                      radius: float | None = None) -> ScenarioSpec:
    """Steady-size segments perpendicular to the travel direction.

    Segments sit on a staggered lattice; every pair keeps spacing >= d_f along
    the travel axis or >= d_f_perp across it, at all times, by confining each
    motion to its own cell.  Shipped scenes give the segments a small finite
    radius so a 40-ray scan resolves their tips at close range.
    """
    rng = random.Random(seed)
    xi = v_o / v
    L = half_length
    gamma = criterion_gamma(xi)
    xi_fn = criterion_xi_fn(xi)
    if d_f / (2 * L) <= gamma or d_f_perp / (2 * L) <= xi_fn:
        raise GenerationFailed("requested spacing below the segment criteria")

    xi_star = min(
        _invert_increasing(criterion_gamma, 0.9 * d_f / (2 * L), lo=xi + 1e-6),
        _invert_increasing(criterion_xi_fn, 0.9 * d_f_perp / (2 * L), lo=xi + 1e-6))
    delta_bar = math.asin(xi)
    delta_star = math.asin(xi_star)

    shape: dict = {"kind": "segment", "half_length": L}
    if radius is not None:
        shape["radius"] = radius
    body_r = radius if radius is not None else SEGMENT_RADIUS_RATIO * L

    amp_budget = 0.2 * min(d_f, d_f_perp)
    pitch_x = d_f + 2 * amp_budget + 2 * body_r + 0.1
    pitch_y = 2 * L + d_f_perp + 2 * amp_budget + 2 * body_r + 0.1
    x_start = 4.0 + max(gamma * L, 1.0)
    cols = max(1, math.ceil(n / rows))
    obstacles = []
    k = 0
    for col in range(cols):
        for row in range(rows):
            if k >= n:
                break
            x = x_start + col * pitch_x
            y = (row - (rows - 1) / 2.0) * pitch_y \
                + (pitch_y / 2.0 if col % 2 else 0.0)
            motion, amp = _sinusoid_motion(rng, (x, y), 0.95 * v_o)
            if amp > amp_budget:
                scale = amp_budget / amp
                for t in motion["terms"]:
                    t["amp"] = [a * scale for a in t["amp"]]
            obstacles.append(ObstacleSpec(
                dict(shape),
                {"center": motion,
                 "spin": {"kind": "constant", "value": math.pi / 2.0}}, 0))
            k += 1

    if tuning == "drift":
        classes = [_drift_class(0, v_o, v, delta_bar, delta_star)]
    else:
        classes = [ClassSpec(0, v_o, "default")]

    meta = {
        "family": "segment_field",
        "seed": seed,
        "expect": {"lemma1": True, "theorem1_speed": True, "safety": True,
                   "theorem2": True, "drift_tuning": tuning == "drift"},
        "theorem2": {"delta_star": {"0": delta_star},
                     "hat_height": {"0": segment_hat_height(L, delta_star)}},
    }
    goal = x_start + cols * pitch_x + 3.0
    return ScenarioSpec(f"segment_field_s{seed}", classes, obstacles,
                        RobotSpec([0.0, 0.0], v, [1.0, 0.0]),
                        _base_sim(), goal, meta)


def gen_rotating_grid(d_pitch: float, half_length: float, omega: float,
                      rows: int, cols: int, v: float = 1.0,
                      seed: int = 0, tuning: str = "table1",
                      radius: float | None = None) -> ScenarioSpec:
    """Grid of synchronously rotating segments; travel direction points down.

    Neighboring pivots counter-rotate with a quarter-turn phase offset, which
    keeps the ensemble collision-free exactly when the pitch exceeds
    sqrt(2) * half_length; tighter pitches are rejected as ill-posed.
    """
    L = half_length
    seg_r = radius if radius is not None else SEGMENT_RADIUS_RATIO * L
    if d_pitch <= math.sqrt(2.0) * (L + seg_r):
        raise GenerationFailed("diagonal segments collide: need D > sqrt(2) L")
    rng = random.Random(seed)
    v_class = omega * (L + seg_r) * (1.0 + 1e-9)
    xi = v_class / v
    if xi >= 1.0:
        raise GenerationFailed("robot cannot overtake the segment tips")
    delta_bar = math.asin(xi)

    ratio = d_pitch / L
    if rotating_grid_threshold(delta_bar) >= ratio / 1.05:
        delta_star = delta_bar  # claim conditions unavailable at this speed
    else:
        target = min(ratio / 1.08, rotating_grid_threshold(1.2))
        delta_star = grid_speed_ratio_at(target)[0]
        delta_star = max(delta_star, delta_bar + 1e-6)

    shape: dict = {"kind": "segment", "half_length": L}
    if radius is not None:
        shape["radius"] = radius
    phase0 = rng.uniform(0.0, 2.0 * math.pi) if seed else 0.0
    obstacles = []
    for i in range(cols):
        for j in range(rows):
            sgn = 1.0 if (i + j) % 2 == 0 else -1.0
            phase = (i + j) * math.pi / 2.0 + sgn * phase0
            obstacles.append(ObstacleSpec(
                dict(shape),
                {"center": {"kind": "static",
                            "point": [i * d_pitch, -j * d_pitch]},
                 "spin": {"kind": "ramp", "base": phase, "rate": sgn * omega}},
                0))

    start_clear = segment_hat_height(L, max(delta_star, delta_bar)) + 0.75 * d_pitch
    start_x = (cols - 1) * d_pitch / 2.0 + rng.uniform(-0.4, 0.4) * d_pitch
    goal = start_clear + (rows - 1) * d_pitch + L + 2.0

    if tuning == "drift" and delta_star > delta_bar:
        classes = [_drift_class(0, v_class, v, delta_bar, delta_star)]
    else:
        classes = [ClassSpec(0, v_class, "default")]

    meta = {
        "family": "rotating_grid",
        "seed": seed,
        "expect": {"lemma1": True, "theorem1_speed": True, "safety": True,
                   "theorem2": delta_star > delta_bar,
                   "drift_tuning": tuning == "drift" and delta_star > delta_bar},
        "theorem2": {"delta_star": {"0": delta_star},
                     "hat_height": {"0": segment_hat_height(L, delta_star)}},
    }
    return ScenarioSpec(f"rotating_grid_s{seed}", classes, obstacles,
                        RobotSpec([start_x, start_clear], v, [0.0, -1.0]),
                        _base_sim(), goal, meta)


def gen_counterexample(n_pairs: int, half_length: float, eta: float,
                       v_o: float, eps: float, v: float = 1.0,
                       rearrange: bool = True, seed: int = 0) -> ScenarioSpec:
    """Treadmill of drifting perpendicular segments that defeats net progress.

    2 * n_pairs vertical segments of half-length L drift against the travel
    direction with free gaps eta wide; alternate segments are raised by
    L + eps, so each passage costs a vertical detour of at least L - eps.
    The belt's width per segment is eta while its recession per passage is
    (L - eps) / e, which makes e = v / v_o against (L - eps) / eta the sign
    threshold for net progress.  Each segment relocates to the far end of the
    belt once the robot passes it (speed-bounded, smooth), so with e below
    the threshold the backward drift never has to end.
    """
    L = half_length
    seg_r = SEGMENT_RADIUS_RATIO * L
    pitch = eta + 2.0 * seg_r
    count = 2 * n_pairs
    x0 = 0.0
    obstacles = []
    for k in range(count):
        x = x0 + k * pitch
        y = 0.0 if k % 2 == 0 else L + eps
        if rearrange:
            # Relocation is a fast smooth dart below the belt: quick enough
            # that drifting neighbors cannot slide into the vacated lane.
            center = {"kind": "belt", "base": [x, y], "drift": [-v_o, 0.0],
                      "trigger_margin": 2.5, "slot_dx": count * pitch,
                      "slot_dy": 0.0, "dip_y": -(3.0 * L + 2.5 + eps),
                      "speed": 8.0 * v, "blend": 0.2}
        else:
            center = {"kind": "line", "start": [x, y],
                      "velocity": [-v_o, 0.0]}
        obstacles.append(ObstacleSpec(
            {"kind": "segment", "half_length": L},
            {"center": center,
             "spin": {"kind": "constant", "value": math.pi / 2.0}}, 0))

    classes = [ClassSpec(0, v_o, "default")]
    meta = {
        "family": "counterexample",
        "seed": seed,
        "speed_excess": v / v_o,
        "drift_threshold": (L - eps) / eta,
        "expect": {"lemma1": True, "theorem1_speed": True, "safety": True,
                   "theorem2": False, "drift_tuning": False},
        "theorem2": {"delta_star": {"0": math.asin(v_o / v)},
                     "hat_height": {"0": segment_hat_height(
                         L, max(math.asin(v_o / v), 1e-3))}},
    }
    return ScenarioSpec(f"counterexample_e{v / v_o:g}", classes, obstacles,
                        RobotSpec([-3.0, 0.0], v, [1.0, 0.0]),
                        _base_sim(max_range=30.0, horizon=110.0, rays=80),
                        40.0, meta)


def gen_complex_env(seed: int = 0, v: float = 1.0,
                    noise_std: float = 0.0) -> ScenarioSpec:
    """Cluttered mixed scene: translating disks, rotating and breathing
    stadiums, static boxes.  The benchmark scene for controller comparison."""
    rng = random.Random(seed)
    v_o = 0.35

    def sin_motion(base, budget, axis=None):
        m, _ = _sinusoid_motion(rng, base, budget, axis=axis)
        return m

    obstacles = [
        ObstacleSpec({"kind": "disk", "radius": 1.2},
                     {"center": sin_motion((6.0, 2.6), 0.9 * v_o)}, 0),
        ObstacleSpec({"kind": "disk", "radius": 0.9},
                     {"center": sin_motion((9.0, -3.2), 0.9 * v_o)}, 0),
        ObstacleSpec({"kind": "disk", "radius": 0.7},
                     {"center": sin_motion((13.0, 0.6), 0.9 * v_o)}, 0),
        ObstacleSpec({"kind": "disk", "radius": 1.0},
                     {"center": sin_motion((3.6, -2.6), 0.5 * v_o)}, 0),
        ObstacleSpec({"kind": "stadium", "half_length": 1.8, "radius": 0.4},
                     {"center": sin_motion((16.2, 3.2), 0.1 * v_o),
                      "spin": {"kind": "ramp", "base": 0.4, "rate": 0.15}}, 0),
        ObstacleSpec({"kind": "stadium", "half_length": 1.5, "radius": 0.35},
                     {"center": sin_motion((19.0, -3.0), 0.1 * v_o),
                      "spin": {"kind": "ramp", "base": -0.8, "rate": -0.12}}, 0),
        ObstacleSpec({"kind": "polygon", "radius": 0.3,
                      "vertices": [[1.0, 0.8], [-1.0, 0.8],
                                   [-1.0, -0.8], [1.0, -0.8]]},
                     {"center": {"kind": "static", "point": [11.6, 4.6]}}, 0),
        ObstacleSpec({"kind": "polygon", "radius": 0.3,
                      "vertices": [[0.9, 0.9], [-0.9, 0.9],
                                   [-0.9, -0.9], [0.9, -0.9]]},
                     {"center": {"kind": "static", "point": [22.0, 1.8]}}, 0),
        ObstacleSpec({"kind": "stadium", "half_length": 1.2, "radius": 0.4},
                     {"center": sin_motion((21.0, -5.2), 0.3 * v_o),
                      "spin": {"kind": "constant", "value": 0.3},
                      "length": {"kind": "sinusoid", "base": 1.2,
                                 "terms": [{"amp": 0.3, "omega": 0.5,
                                            "phase": rng.uniform(0, 6.28)}]}},
                     0),
    ]
    classes = [ClassSpec(0, v_o, "default")]
    meta = {
        "family": "complex_env",
        "seed": seed,
        "expect": {"lemma1": True, "theorem1_speed": True, "safety": True},
    }
    sim = _base_sim(noise_std=noise_std)
    return ScenarioSpec(f"complex_env_s{seed}", classes, obstacles,
                        RobotSpec([0.0, 0.0], v, [1.0, 0.0]),
                        sim, 24.0, meta)


def gen_violation_safety(v: float = 1.0) -> ScenarioSpec:
    """Fast sweeping wall with a deliberately under-sized widening.

    The widening at contact is far below the safe threshold for the declared
    speed bound, so the pursuit wall catches the robot: a designed collision.
    """
    v_o = 0.9 * v
    obstacles = [ObstacleSpec(
        {"kind": "stadium", "half_length": 10.0, "radius": 0.6},
        {"center": {"kind": "line", "start": [7.0, 0.0],
                    "velocity": [-v_o, 0.0]},
         "spin": {"kind": "constant", "value": math.pi / 2.0}}, 0)]
    classes = [ClassSpec(0, v_o, 0.05)]
    meta = {
        "family": "violation_safety",
        "expect": {"lemma1": True, "theorem1_speed": True, "safety": False},
    }
    return ScenarioSpec("violation_safety", classes, obstacles,
                        RobotSpec([0.0, 0.0], v, [1.0, 0.0]),
                        _base_sim(horizon=40.0), 20.0, meta)


BUILTIN_GENERATORS = {
    "disk_field": lambda: gen_disk_field(8, (0.6, 1.2), 0.25, 1.3, seed=1),
    "disk_field_drift": lambda: gen_disk_field(8, (0.6, 1.2), 0.25, 1.5,
                                               seed=2, tuning="drift"),
    "disk_field_tight": lambda: gen_disk_field(6, (0.8, 1.0), 0.5, 0.5, seed=3),
    "corridor": lambda: gen_corridor(2, 0.8, 0.6, 1.5 * 0.8, 1.6, seed=4),
    "segment_field": lambda: gen_segment_field(3, 1.5, 0.125, 2.0, 2.5,
                                               seed=5, radius=0.06),
    "segment_field_drift": lambda: gen_segment_field(6, 1.5, 0.125, 2.2, 1.5,
                                                     seed=6, tuning="drift",
                                                     radius=0.06),
    "rotating_grid": lambda: gen_rotating_grid(1.55, 1.0, 1.0 / 6.0, 2, 5),
    "rotating_grid_drift": lambda: gen_rotating_grid(1.7, 1.0, 1.0 / 6.0, 2, 5,
                                                     tuning="drift",
                                                     radius=0.05),
    "counterexample": lambda: gen_counterexample(4, 2.0, 0.3, 0.5, 0.05),
    "complex_env": lambda: gen_complex_env(seed=7),
    "violation_safety": gen_violation_safety,
}


def write_builtin_scenarios(directory: str | Path) -> list[Path]:
    """Regenerate the shipped scenario files (development helper)."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, gen in BUILTIN_GENERATORS.items():
        spec = gen()
        spec.name = name
        path = out / f"{name}.yaml"
        save_scenario(spec, path)
        written.append(path)
    return written
