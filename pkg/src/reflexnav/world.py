"""Obstacles as moving bodies: reference shape plus a time-parameterized motion.

Motions compose a center path, a spin about the body origin, and (for
stadiums) a breathing half-length.  Boundary-point velocities follow the
material points of that map and are analytic for every primitive; a central
finite-difference fallback is provided for verification.  The module also
hosts the speed-condition checkers used before claiming any guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geom import RoundedPolygon, Vec2, segment_segment_distance, unit
from .navlaw import DeltaFunction

FD_STEP = 1e-6  # seconds, for the finite-difference velocity fallback


class ScenarioIllPosed(RuntimeError):
    """Obstacles intersect each other: every guarantee is void."""


class BoundViolated(ValueError):
    """A declared class speed bound is smaller than the observed supremum."""


# -- time paths ---------------------------------------------------------------


@dataclass(frozen=True)
class StaticPath:
    point: Vec2

    def at(self, t: float) -> Vec2:
        return self.point

    def rate(self, t: float) -> Vec2:
        return Vec2(0.0, 0.0)

    def speed_bound(self) -> float:
        return 0.0


@dataclass(frozen=True)
class LinePath:
    start: Vec2
    velocity: Vec2

    def at(self, t: float) -> Vec2:
        return self.start + self.velocity * t

    def rate(self, t: float) -> Vec2:
        return self.velocity

    def speed_bound(self) -> float:
        return self.velocity.norm()


@dataclass(frozen=True)
class SinusoidPath:
    """base + sum of amp * sin(omega * t + phase) terms, amp a 2D vector."""

    base: Vec2
    terms: tuple[tuple[Vec2, float, float], ...]

    def at(self, t: float) -> Vec2:
        x, y = self.base.x, self.base.y
        for amp, omega, phase in self.terms:
            s = math.sin(omega * t + phase)
            x += amp.x * s
            y += amp.y * s
        return Vec2(x, y)

    def rate(self, t: float) -> Vec2:
        x = y = 0.0
        for amp, omega, phase in self.terms:
            c = omega * math.cos(omega * t + phase)
            x += amp.x * c
            y += amp.y * c
        return Vec2(x, y)

    def speed_bound(self) -> float:
        return sum(amp.norm() * abs(omega) for amp, omega, _ in self.terms)


def _smooth(x: float) -> float:
    return x * x * (3.0 - 2.0 * x)


def _smooth_rate(x: float) -> float:
    return 6.0 * x * (1.0 - x)


def _smooth_integral(x: float) -> float:
    return x * x * x - 0.5 * x * x * x * x


class BeltPath:
    """Steady drift with robot-triggered relocation to the far end of the belt.

    While untriggered the body drifts at the given velocity.  Once the robot's
    abscissa passes the body (plus a margin), the body eases out of the drift,
    dips to a clear traverse level, runs to the slot one belt pitch past the
    current far end, climbs back, and resumes drifting.  World-frame speed
    never exceeds max(|drift|, speed); every junction is velocity-continuous.

    Stateful: triggers accumulate over a run, so build a fresh world per run.
    """

    def __init__(self, base: Vec2, drift: Vec2, trigger_margin: float,
                 slot_dx: float, slot_dy: float, dip_y: float, speed: float,
                 blend: float = 0.2):
        self.base = base
        self.drift = drift
        self.trigger_margin = trigger_margin
        self.slot_dx = slot_dx
        self.slot_dy = slot_dy
        self.dip_y = dip_y
        self.speed = speed
        self.blend = blend
        # Chronological (t_start, anchor) drift epochs and relocation programs.
        self._epochs: list[tuple[float, Vec2]] = [(0.0, base)]
        self._relocations: list[dict] = []

    # -- evaluation --

    def _drift_pos(self, t: float) -> Vec2:
        t0, anchor = self._epochs[-1]
        return anchor + self.drift * (t - t0)

    def _active_relocation(self, t: float):
        for rel in reversed(self._relocations):
            if rel["t0"] <= t < rel["t_end"]:
                return rel
        return None

    def at(self, t: float) -> Vec2:
        rel = self._active_relocation(t)
        if rel is None:
            for t0, anchor in reversed(self._epochs):
                if t >= t0:
                    return anchor + self.drift * (t - t0)
            return self.base
        tau = t - rel["t0"]
        b = self.blend
        if tau < b:
            x = tau / b
            return rel["p0"] + self.drift * (tau - b * _smooth_integral(x))
        tau -= b
        for dur, a, c in rel["legs"]:
            if tau < dur:
                s = _smooth(tau / dur)
                return Vec2(a.x + (c.x - a.x) * s, a.y + (c.y - a.y) * s)
            tau -= dur
        x = min(tau / b, 1.0)
        return rel["p_exit"] + self.drift * (b * _smooth_integral(x))

    def rate(self, t: float) -> Vec2:
        rel = self._active_relocation(t)
        if rel is None:
            return self.drift
        tau = t - rel["t0"]
        b = self.blend
        if tau < b:
            return self.drift * (1.0 - _smooth(tau / b))
        tau -= b
        for dur, a, c in rel["legs"]:
            if tau < dur:
                g = _smooth_rate(tau / dur) / dur
                return Vec2((c.x - a.x) * g, (c.y - a.y) * g)
            tau -= dur
        x = min(tau / b, 1.0)
        return self.drift * _smooth(x)

    def speed_bound(self) -> float:
        return max(self.drift.norm(), self.speed)

    # -- triggering --

    def maybe_trigger(self, robot_x: float, t: float) -> bool:
        if self._relocations and t < self._relocations[-1]["t_end"]:
            return False
        p = self.at(t)
        if robot_x <= p.x + self.trigger_margin:
            return False
        self._schedule(p, t)
        return True

    def _schedule(self, p0: Vec2, t0: float) -> None:
        b = self.blend
        start = p0 + self.drift * (0.5 * b)       # after the ease-out blend
        # Damped fixed point on arrival time: the slot drifts while we travel.
        total = 0.0
        p_exit = start
        for _ in range(40):
            slot = p0 + Vec2(self.slot_dx, self.slot_dy) + self.drift * total
            p_exit = slot - self.drift * (0.5 * b)
            lens = [abs(start.y - self.dip_y),
                    abs(p_exit.x - start.x),
                    abs(p_exit.y - self.dip_y)]
            total = 0.5 * (total + 2 * b + 1.5 * sum(lens) / self.speed)
        legs = []
        pts = [start, Vec2(start.x, self.dip_y), Vec2(p_exit.x, self.dip_y), p_exit]
        for a, c in zip(pts[:-1], pts[1:]):
            ln = (c - a).norm()
            if ln > 1e-12:
                legs.append((1.5 * ln / self.speed, a, c))
        t_end = t0 + 2 * b + sum(d for d, _, _ in legs)
        self._relocations.append(
            {"t0": t0, "p0": p0, "legs": legs, "p_exit": p_exit, "t_end": t_end})
        self._epochs.append((t_end, p_exit + self.drift * (0.5 * b)))


@dataclass(frozen=True)
class ConstantScalar:
    value: float

    def at(self, t: float) -> float:
        return self.value

    def rate(self, t: float) -> float:
        return 0.0

    def rate_bound(self) -> float:
        return 0.0


@dataclass(frozen=True)
class RampScalar:
    base: float
    slope: float

    def at(self, t: float) -> float:
        return self.base + self.slope * t

    def rate(self, t: float) -> float:
        return self.slope

    def rate_bound(self) -> float:
        return abs(self.slope)


@dataclass(frozen=True)
class SinusoidScalar:
    base: float
    terms: tuple[tuple[float, float, float], ...]  # (amp, omega, phase)

    def at(self, t: float) -> float:
        v = self.base
        for amp, omega, phase in self.terms:
            v += amp * math.sin(omega * t + phase)
        return v

    def rate(self, t: float) -> float:
        v = 0.0
        for amp, omega, phase in self.terms:
            v += amp * omega * math.cos(omega * t + phase)
        return v

    def rate_bound(self) -> float:
        return sum(abs(a * w) for a, w, _ in self.terms)


@dataclass(frozen=True)
class Motion:
    """Center path + spin about the body origin + optional breathing length."""

    center: object
    spin: object = ConstantScalar(0.0)
    half_length: object | None = None

    @classmethod
    def static(cls, point: Vec2, angle: float = 0.0) -> "Motion":
        return cls(StaticPath(point), ConstantScalar(angle))


# -- obstacles ----------------------------------------------------------------


@dataclass
class ObstacleClass:
    """Declared group: shared normal-speed bound and widening function."""

    id: int
    speed_bound: float
    enlargement: DeltaFunction


@dataclass
class Obstacle:
    """Reference skeleton (body frame) + radius + motion + class membership."""

    body: np.ndarray
    radius: float
    motion: Motion
    class_id: int = 0
    _reach: float = field(init=False, repr=False)

    def __post_init__(self):
        self.body = np.atleast_2d(np.asarray(self.body, dtype=float))
        if self.motion.half_length is not None and len(self.body) != 2:
            raise ValueError("breathing length applies to stadium skeletons only")
        if self.motion.half_length is not None:
            lpath = self.motion.half_length
            # Conservative reach: base plus total oscillation span.
            reach = abs(lpath.at(0.0))
            if isinstance(lpath, SinusoidScalar):
                reach = abs(lpath.base) + sum(abs(a) for a, _, _ in lpath.terms)
            self._reach = reach + self.radius
        else:
            self._reach = float(np.max(np.hypot(*self.body.T))) + self.radius

    # -- geometry --

    def _body_vertices(self, t: float) -> np.ndarray:
        if self.motion.half_length is None:
            return self.body
        L = self.motion.half_length.at(t)
        return np.array([[L, 0.0], [-L, 0.0]])

    def _pose(self, t: float):
        c = self.motion.center.at(t)
        th = self.motion.spin.at(t)
        return c, th

    def world_vertices(self, t: float) -> np.ndarray:
        c, th = self._pose(t)
        V = self._body_vertices(t)
        co, si = math.cos(th), math.sin(th)
        return np.stack([c.x + co * V[:, 0] - si * V[:, 1],
                         c.y + si * V[:, 0] + co * V[:, 1]], axis=1)

    def shape_at(self, t: float) -> RoundedPolygon:
        return RoundedPolygon(self.world_vertices(t), self.radius)

    def distance_to(self, p: Vec2, t: float) -> float:
        V = self.world_vertices(t)
        if len(V) == 1:
            d = math.hypot(p.x - V[0, 0], p.y - V[0, 1])
        else:
            d = math.inf
            for i in range(len(V)) if len(V) >= 3 else range(1):
                a = V[i]
                b = V[(i + 1) % len(V)]
                abx, aby = b[0] - a[0], b[1] - a[1]
                apx, apy = p.x - a[0], p.y - a[1]
                denom = abx * abx + aby * aby
                u = 0.0 if denom == 0.0 else max(0.0, min(1.0, (apx * abx + apy * aby) / denom))
                d = min(d, math.hypot(apx - u * abx, apy - u * aby))
            if len(V) >= 3:
                inside = True
                for i in range(len(V)):
                    a = V[i]
                    b = V[(i + 1) % len(V)]
                    if (b[0] - a[0]) * (p.y - a[1]) - (b[1] - a[1]) * (p.x - a[0]) < 0.0:
                        inside = False
                        break
                if inside:
                    d = 0.0
        return max(0.0, d - self.radius)

    def contains(self, p: Vec2, t: float, tol: float = 0.0) -> bool:
        c = self.motion.center.at(t)
        if math.hypot(p.x - c.x, p.y - c.y) > self._reach + tol + 1e-9:
            return False
        return self.distance_to(p, t) <= tol

    def reach_from_center(self) -> float:
        return self._reach

    # -- kinematics --

    def _breathing_signs(self) -> np.ndarray:
        # Stadium template vertices are [+L, -L] along the body x axis.
        return np.array([1.0, -1.0])

    def boundary_point_velocity(self, s: float, t: float) -> Vec2:
        """Material velocity of the boundary point currently at arc length s."""
        shape = self.shape_at(t)
        kind, idx, local = shape.footprint(s)
        c = self.motion.center.at(t)
        cdot = self.motion.center.rate(t)
        thdot = self.motion.spin.rate(t)
        p = shape.point(s)
        vx = cdot.x - thdot * (p.y - c.y)
        vy = cdot.y + thdot * (p.x - c.x)
        if self.motion.half_length is not None:
            ldot = self.motion.half_length.rate(t)
            sg = self._breathing_signs()
            if kind == 0:
                bx = sg[idx] * ldot
            else:
                bx = ((1.0 - local) * sg[idx] + local * sg[(idx + 1) % 2]) * ldot
            th = self.motion.spin.at(t)
            vx += math.cos(th) * bx
            vy += math.sin(th) * bx
        return Vec2(vx, vy)

    def material_point(self, footprint, t0: float, t: float) -> Vec2:
        """World position at time t of the material point footprinted at t0."""
        kind, idx, local = footprint
        c = self.motion.center.at(t)
        th = self.motion.spin.at(t)
        V = self._body_vertices(t)
        co, si = math.cos(th), math.sin(th)
        if kind == 0:
            shape0 = self.shape_at(t0)
            th0 = self.motion.spin.at(t0)
            # Body-frame angle of the material point is fixed.
            psi0 = None
            for s0, _, k, i, psis, _ in shape0._pieces:
                if k == 0 and i == idx:
                    psi0 = psis
                    break
            psi_body = psi0 + local - th0
            wx = c.x + co * V[idx, 0] - si * V[idx, 1]
            wy = c.y + si * V[idx, 0] + co * V[idx, 1]
            return Vec2(wx + self.radius * math.cos(psi_body + th),
                        wy + self.radius * math.sin(psi_body + th))
        shape = RoundedPolygon(np.stack([V[:, 0], V[:, 1]], axis=1), self.radius)
        a, b = shape._edge_endpoints(idx)
        px = (1.0 - local) * a[0] + local * b[0]
        py = (1.0 - local) * a[1] + local * b[1]
        return Vec2(c.x + co * px - si * py, c.y + si * px + co * py)

    def boundary_point_velocity_fd(self, s: float, t: float,
                                   h: float = FD_STEP) -> Vec2:
        """Central finite-difference fallback for composed motions."""
        fp = self.shape_at(t).footprint(s)
        p_plus = self.material_point(fp, t, t + h)
        p_minus = self.material_point(fp, t, t - h)
        return (p_plus - p_minus) * (0.5 / h)

    def boundary_kinematics(self, count: int, t: float):
        """(points, velocities, inward normals) at `count` boundary samples."""
        shape = self.shape_at(t)
        bs = shape.boundary_samples(count)
        c = self.motion.center.at(t)
        cdot = self.motion.center.rate(t)
        thdot = self.motion.spin.rate(t)
        P = bs.points
        V = np.empty_like(P)
        V[:, 0] = cdot.x - thdot * (P[:, 1] - c.y)
        V[:, 1] = cdot.y + thdot * (P[:, 0] - c.x)
        if self.motion.half_length is not None:
            ldot = self.motion.half_length.rate(t)
            th = self.motion.spin.at(t)
            sg = self._breathing_signs()
            bx = np.where(bs.kind == 0,
                          sg[bs.index % 2] * ldot,
                          ((1.0 - bs.local) * sg[bs.index % 2]
                           + bs.local * sg[(bs.index + 1) % 2]) * ldot)
            V[:, 0] += math.cos(th) * bx
            V[:, 1] += math.sin(th) * bx
        return P, V, bs.normals_in

    def centroid_state(self, t: float):
        """(centroid, centroid velocity, bounding radius) at time t."""
        V = self.world_vertices(t)
        cen = V.mean(axis=0)
        c = self.motion.center.at(t)
        cdot = self.motion.center.rate(t)
        thdot = self.motion.spin.rate(t)
        vx = cdot.x - thdot * (cen[1] - c.y)
        vy = cdot.y + thdot * (cen[0] - c.x)
        if self.motion.half_length is not None:
            # Template is symmetric: breathing does not move the centroid.
            pass
        r = float(np.max(np.hypot(V[:, 0] - cen[0], V[:, 1] - cen[1]))) + self.radius
        return Vec2(cen[0], cen[1]), Vec2(vx, vy), r


def normal_velocity(obstacle: Obstacle, s: float, t: float) -> float:
    """Normal component of the boundary-point velocity (inward positive)."""
    v = obstacle.boundary_point_velocity(s, t)
    n = obstacle.shape_at(t).inward_normal(s)
    return v.dot(n)


def negative_part(a: float) -> float:
    """Outward-expansion magnitude of a normal velocity: max(0, -a)."""
    return max(0.0, -a)


# -- condition checkers -------------------------------------------------------


@dataclass
class Lemma1Report:
    passed: bool
    observed: float
    margin: float
    worst_point: Vec2


def check_lemma1(obstacle: Obstacle, t: float, v: float,
                 samples: int = 1024) -> Lemma1Report:
    """Necessary escape condition: outward boundary speed never exceeds v."""
    if samples < 256:
        raise ValueError("need at least 256 boundary samples")
    P, V, N = obstacle.boundary_kinematics(samples, t)
    vn = np.einsum("ij,ij->i", V, N)
    neg = np.maximum(0.0, -vn)
    i = int(np.argmax(neg))
    observed = float(neg[i])
    return Lemma1Report(observed <= v, observed, v - observed,
                        Vec2(P[i, 0], P[i, 1]))


def check_theorem1_speed(classes: Sequence[ObstacleClass],
                         obstacles: Sequence[Obstacle],
                         horizon: float, v: float,
                         time_step: float = 0.1,
                         samples: int = 256,
                         two_sided: bool = False) -> dict[int, float]:
    """Verify declared class speed bounds dominate the observed normal speeds.

    Samples every obstacle boundary on a (s, t) grid; with `two_sided` the
    magnitude |V^N| is bounded instead of just the outward part.  Returns the
    observed supremum per class; raises BoundViolated on a mis-declared bound.
    """
    declared = {c.id: c.speed_bound for c in classes}
    observed = {c.id: 0.0 for c in classes}
    times = np.arange(0.0, horizon + time_step / 2, time_step)
    for obs in obstacles:
        if obs.class_id not in declared:
            raise KeyError(f"obstacle class {obs.class_id} not declared")
        worst = 0.0
        for t in times:
            _, V, N = obs.boundary_kinematics(samples, float(t))
            vn = np.einsum("ij,ij->i", V, N)
            val = np.max(np.abs(vn)) if two_sided else np.max(np.maximum(0.0, -vn))
            worst = max(worst, float(val))
        observed[obs.class_id] = max(observed[obs.class_id], worst)
    for cid, bound in declared.items():
        if bound >= v:
            raise BoundViolated(
                f"class {cid}: declared bound {bound} not below robot speed {v}")
        if observed[cid] > bound + 1e-9:
            raise BoundViolated(
                f"class {cid}: declared {bound} < observed {observed[cid]:.6g}")
    return observed


def pairwise_min_clearance(obstacles: Sequence[Obstacle], t: float):
    """Minimum surface clearance over all obstacle pairs at time t."""
    shapes = None
    best = math.inf
    pair = None
    n = len(obstacles)
    centers = [o.motion.center.at(t) for o in obstacles]
    for i in range(n):
        for j in range(i + 1, n):
            reach = obstacles[i]._reach + obstacles[j]._reach
            ci, cj = centers[i], centers[j]
            gap = math.hypot(ci.x - cj.x, ci.y - cj.y) - reach
            if gap >= best:
                continue
            if shapes is None:
                shapes = {}
            for k in (i, j):
                if k not in shapes:
                    shapes[k] = obstacles[k].world_vertices(t)
            d = _skeleton_pair_distance(shapes[i], shapes[j]) \
                - obstacles[i].radius - obstacles[j].radius
            if d < best:
                best = d
                pair = (i, j)
    return best, pair


def _edges_of(V: np.ndarray):
    if len(V) == 1:
        return [(V[0], V[0])]
    return [(V[i], V[(i + 1) % len(V)]) for i in range(len(V))]


def _skeleton_pair_distance(Va: np.ndarray, Vb: np.ndarray) -> float:
    best = math.inf
    for a0, a1 in _edges_of(Va):
        for b0, b1 in _edges_of(Vb):
            best = min(best, segment_segment_distance(a0, a1, b0, b1))
            if best == 0.0:
                return 0.0
    # Containment without edge contact.
    if len(Va) >= 3 and _inside_convex(Vb[0], Va):
        return 0.0
    if len(Vb) >= 3 and _inside_convex(Va[0], Vb):
        return 0.0
    return best


def _inside_convex(p: np.ndarray, V: np.ndarray) -> bool:
    for i in range(len(V)):
        a = V[i]
        b = V[(i + 1) % len(V)]
        if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < 0.0:
            return False
    return True


def assert_disjoint(obstacles: Sequence[Obstacle], t: float) -> None:
    clear, pair = pairwise_min_clearance(obstacles, t)
    if pair is not None and clear <= 0.0:
        raise ScenarioIllPosed(
            f"obstacles {pair[0]} and {pair[1]} intersect at t={t:.3f}")


def notify_robot_position(obstacles: Sequence[Obstacle], robot_pos: Vec2,
                          t: float) -> None:
    """Feed the robot position to motions with triggers (belt relocation)."""
    for obs in obstacles:
        path = obs.motion.center
        if hasattr(path, "maybe_trigger"):
            path.maybe_trigger(robot_pos.x, t)


@dataclass
class World:
    """Scene: obstacles plus their declared classes."""

    obstacles: list[Obstacle]
    classes: list[ObstacleClass]

    def __post_init__(self):
        declared = {c.id for c in self.classes}
        for i, obs in enumerate(self.obstacles):
            if obs.class_id not in declared:
                raise KeyError(f"obstacle {i} references undeclared class "
                               f"{obs.class_id}")

    def class_map(self) -> dict[int, int]:
        """obstacle index -> class id, for facet labeling."""
        return {i: obs.class_id for i, obs in enumerate(self.obstacles)}

    def assert_disjoint(self, t: float) -> None:
        assert_disjoint(self.obstacles, t)

    def notify(self, robot_pos: Vec2, t: float) -> None:
        notify_robot_position(self.obstacles, robot_pos, t)
