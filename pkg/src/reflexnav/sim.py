"""Sampled-data closed loop: vehicle models, stepping, traces, and the
velocity-obstacle baseline controller.

The control is recomputed every `dt` seconds and held constant in between
(zero-order hold); positions integrate through 10 substeps per period with a
collision check at each substep while obstacles advance continuously.
"""

from __future__ import annotations

import enum
import io
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geom import Vec2, unit, wrap_angle
from .navlaw import Branch, NoEscapeDirection, enlarge, select_control
from .sensor import RobotInsideObstacle, extract_facets, scan
from .world import ScenarioIllPosed, World

SUBSTEPS = 10

VEHICLE_POINT = "point"
VEHICLE_UNICYCLE = "unicycle"
CONTROLLER_PCL = "pcl"
CONTROLLER_VOM = "vom"


@dataclass
class SimConfig:
    dt: float = 0.1
    rays: int = 40
    edge_threshold: float = 2.0
    max_range: float = 20.0
    horizon: float = 120.0
    vehicle: str = VEHICLE_POINT
    turn_rate_limit: float = 1.0
    noise_std: float = 0.0
    seed: int = 0
    controller: str = CONTROLLER_PCL
    vom_lookahead: float = 10.0
    vom_offset: float = 1.0
    vom_weight: float = 2.0
    goal_distance: float = 25.0
    d_star: float | None = None

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.horizon < self.dt:
            raise ValueError("horizon must cover at least one period")
        if self.vehicle not in (VEHICLE_POINT, VEHICLE_UNICYCLE):
            raise ValueError(f"unknown vehicle model {self.vehicle!r}")
        if self.controller not in (CONTROLLER_PCL, CONTROLLER_VOM):
            raise ValueError(f"unknown controller {self.controller!r}")


@dataclass
class RobotState:
    position: Vec2
    heading: float = 0.0
    v_max: float = 1.0
    f: Vec2 = Vec2(1.0, 0.0)

    def __post_init__(self):
        if self.v_max <= 0.0:
            raise ValueError("v_max must be positive")
        self.f = self.f.normalized()

    @property
    def beta(self) -> float:
        """Bearing of the desired direction (robot frame is world-aligned)."""
        return self.f.angle()


class Status(enum.Enum):
    REACHED = "reached"
    TIMEOUT = "timeout"
    COLLISION = "collision"
    ABORTED_ILLPOSED = "aborted_illposed"


BRANCH_HELD = "held"   # fallback when no escape direction exists


@dataclass
class StepRecord:
    t: float
    x: float
    y: float
    vx: float
    vy: float
    branch: str
    min_clearance: float
    drift: float
    nearest_id: int


@dataclass
class Trace:
    """Per-period records plus the terminal outcome.

    Recorded velocity and drift are the commanded values from the control law,
    before actuation noise and vehicle dynamics.
    """

    records: list[StepRecord] = field(default_factory=list)
    status: Status = Status.TIMEOUT
    t_end: float = 0.0
    collision_obstacle: int | None = None
    reached_time: float | None = None
    final_position: Vec2 | None = None

    @property
    def drift_infimum(self) -> float:
        return min((r.drift for r in self.records), default=math.inf)

    @property
    def min_clearance(self) -> float:
        return min((r.min_clearance for r in self.records), default=math.inf)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,x,y,vx,vy,branch,min_clearance,drift,nearest_id\n")
        for r in self.records:
            clear = "" if math.isinf(r.min_clearance) else f"{r.min_clearance:.10g}"
            buf.write(f"{r.t:.10g},{r.x:.10g},{r.y:.10g},{r.vx:.10g},"
                      f"{r.vy:.10g},{r.branch},{clear},{r.drift:.10g},"
                      f"{r.nearest_id}\n")
        return buf.getvalue()

    def summary_lines(self) -> list[str]:
        lines = [f"status={self.status.value}", f"t_end={self.t_end:.10g}"]
        if self.reached_time is not None:
            lines.append(f"time_to_goal={self.reached_time:.10g}")
        if self.collision_obstacle is not None:
            lines.append(f"collision_obstacle={self.collision_obstacle}")
        if self.records:
            lines.append(f"min_clearance={self.min_clearance:.10g}")
            lines.append(f"drift_infimum={self.drift_infimum:.10g}")
        return lines


def heading_noise(rng: random.Random, std_dev: float, dt: float) -> float:
    """Per-period Gaussian heading perturbation with std `std_dev * dt`."""
    if std_dev <= 0.0:
        return 0.0
    return rng.gauss(0.0, std_dev * dt)


def _collision_index(world: World, p: Vec2, t: float) -> int | None:
    for idx, obs in enumerate(world.obstacles):
        c = obs.motion.center.at(t)
        if math.hypot(p.x - c.x, p.y - c.y) > obs.reach_from_center() + 1e-9:
            continue
        if obs.distance_to(p, t) <= 0.0:
            return idx
    return None


def _clearance_and_nearest(world: World, p: Vec2, t: float) -> tuple[float, int]:
    best = math.inf
    nearest = -1
    for idx, obs in enumerate(world.obstacles):
        d = obs.distance_to(p, t)
        if d < best:
            best = d
            nearest = idx
    return best, nearest


def vom_obstacle_states(world: World, t: float):
    """(centroid, bounding radius, true centroid velocity) per obstacle."""
    out = []
    for obs in world.obstacles:
        c, v, r = obs.centroid_state(t)
        out.append((c, r, v))
    return out


def vom_control(state: RobotState, obstacle_states, config: SimConfig) -> Vec2:
    """Velocity-obstacle baseline: sampled velocities, cones from true motion.

    Candidates on a 64 x 16 polar grid are rejected when linear extrapolation
    of the obstacle over the lookahead brings it within its bounding radius;
    the survivor minimizing goal-progress loss plus a separation penalty at
    the desired offset wins.  All candidates inadmissible: stop (zero velocity).
    """
    v = state.v_max
    n_ang, n_spd = 64, 16
    angles = np.linspace(-math.pi, math.pi, n_ang, endpoint=False)
    speeds = np.linspace(v / n_spd, v, n_spd)
    W = np.stack([np.outer(speeds, np.cos(angles)).ravel(),
                  np.outer(speeds, np.sin(angles)).ravel()], axis=1)
    admissible = np.ones(len(W), dtype=bool)
    penalty = np.zeros(len(W))
    T = config.vom_lookahead
    pos = state.position
    for c, r, vel in obstacle_states:
        p_rel = np.array([c.x - pos.x, c.y - pos.y])
        d = np.array([vel.x, vel.y])[None, :] - W      # relative obstacle motion
        a = np.einsum("ij,ij->i", d, d)
        b = d @ p_rel
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.where(a > 1e-12, -b / np.maximum(a, 1e-12), 0.0)
        tau = np.clip(tau, 0.0, T)
        rel = p_rel[None, :] + tau[:, None] * d
        dmin = np.hypot(rel[:, 0], rel[:, 1])
        admissible &= dmin > r
        gap = dmin - r
        short = np.maximum(0.0, (config.vom_offset - gap) / config.vom_offset)
        penalty += short * short
    progress = (W @ np.array([state.f.x, state.f.y])) / v
    cost = -progress + config.vom_weight * penalty
    cost = np.where(admissible, cost, np.inf)
    k = int(np.argmin(cost))
    if not np.isfinite(cost[k]):
        return Vec2(0.0, 0.0)
    return Vec2(float(W[k, 0]), float(W[k, 1]))


def step(world: World, state: RobotState, config: SimConfig, t: float,
         rng: random.Random | None = None,
         prev_velocity: Vec2 | None = None) -> tuple[RobotState, StepRecord]:
    """One control period: sense, decide, hold the command, integrate.

    Raises RobotInsideObstacle when a collision occurs during the period and
    ScenarioIllPosed when obstacles intersect each other.
    """
    min_clear, nearest = _clearance_and_nearest(world, state.position, t)

    if config.controller == CONTROLLER_VOM:
        vel_cmd = vom_control(state, vom_obstacle_states(world, t), config)
        branch = CONTROLLER_VOM
    else:
        sc = scan(world.obstacles, state.position, t, config.rays,
                  config.max_range)
        facets = extract_facets(sc, config.edge_threshold, world.class_map())
        extended = enlarge(facets, world.classes)
        try:
            decision = select_control(state.beta, extended, state.v_max,
                                      config.d_star)
            vel_cmd = decision.velocity
            branch = decision.branch.value
        except NoEscapeDirection:
            vel_cmd = prev_velocity if prev_velocity is not None else Vec2(0.0, 0.0)
            branch = BRANCH_HELD

    record = StepRecord(t, state.position.x, state.position.y,
                        vel_cmd.x, vel_cmd.y, branch, min_clear,
                        vel_cmd.dot(state.f), nearest)

    applied = vel_cmd
    eps = heading_noise(rng, config.noise_std, config.dt) if rng is not None else 0.0

    pos = state.position
    psi = state.heading
    h = config.dt / SUBSTEPS
    if config.vehicle == VEHICLE_POINT:
        if eps != 0.0 and applied.norm() > 0.0:
            applied = applied.rotated(eps)
        for i in range(SUBSTEPS):
            pos = pos + applied * h
            t_sub = t + (i + 1) * h
            hit = _collision_index(world, pos, t_sub)
            if hit is not None:
                raise RobotInsideObstacle(hit, t_sub)
        psi = applied.angle() if applied.norm() > 0.0 else psi
    else:
        target = applied.angle() + eps if applied.norm() > 0.0 else psi
        speed = state.v_max if applied.norm() > 0.0 else 0.0
        for i in range(SUBSTEPS):
            err = wrap_angle(target - psi)
            max_turn = config.turn_rate_limit * h
            psi = wrap_angle(psi + max(-max_turn, min(max_turn, err)))
            pos = pos + unit(psi) * (speed * h)
            t_sub = t + (i + 1) * h
            hit = _collision_index(world, pos, t_sub)
            if hit is not None:
                raise RobotInsideObstacle(hit, t_sub)

    new_state = RobotState(pos, psi, state.v_max, state.f)
    return new_state, record


def run(world: World, state: RobotState, config: SimConfig) -> Trace:
    """Drive the loop until the goal half-plane, the horizon, or a failure."""
    rng = random.Random(config.seed)
    trace = Trace()
    r0 = state.position
    prev_vel: Vec2 | None = None
    steps = int(round(config.horizon / config.dt))
    t = 0.0
    for k in range(steps):
        t = k * config.dt
        try:
            world.assert_disjoint(t)
            state, record = step(world, state, config, t, rng, prev_vel)
        except RobotInsideObstacle as exc:
            trace.status = Status.COLLISION
            trace.t_end = exc.t
            trace.collision_obstacle = exc.obstacle_id
            trace.final_position = state.position
            return trace
        except ScenarioIllPosed:
            trace.status = Status.ABORTED_ILLPOSED
            trace.t_end = t
            trace.final_position = state.position
            return trace
        trace.records.append(record)
        prev_vel = Vec2(record.vx, record.vy)
        world.notify(state.position, t + config.dt)
        progress = (state.position - r0).dot(state.f)
        if progress >= config.goal_distance:
            trace.status = Status.REACHED
            trace.t_end = t + config.dt
            trace.reached_time = t + config.dt
            trace.final_position = state.position
            return trace
    trace.status = Status.TIMEOUT
    trace.t_end = config.horizon
    trace.final_position = state.position
    return trace
