"""Hat regions over convex obstacles and the closed-form spacing criteria.

A delta-hat is the wedge behind a convex body (relative to the desired travel
direction) bounded by two tangent rays at angle pi/2 - delta from that
direction and the near boundary arc.  Hats must stay clear of other obstacles
for the steady-progress guarantee to hold; extending a hat sweeps its tangency
segments outward by a further angle.  The module also provides the scale-free
spacing criteria for disks, perpendicular segments, and rotating grids, plus
the sampled checker for the progress-guarantee hypotheses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .geom import TWO_PI, RoundedPolygon, Vec2, unit, wrap_angle


class DegenerateHat(RuntimeError):
    """Tangent lines failed to intersect (cannot occur for delta < pi/2)."""


@dataclass
class Hat:
    """Wedge bounded by two tangency segments and the near boundary arc."""

    vertex: Vec2
    q_ccw: Vec2
    q_cw: Vec2
    s_ccw: float
    s_cw: float
    height: float
    delta: float
    f_angle: float
    shape: RoundedPolygon

    @property
    def seg_ccw(self) -> float:
        return (self.q_ccw - self.vertex).norm()

    @property
    def seg_cw(self) -> float:
        return (self.q_cw - self.vertex).norm()

    def contains_points(self, P: np.ndarray) -> np.ndarray:
        """Closed wedge minus the open obstacle interior."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        tri = _in_triangle(P, self.vertex.as_array(), self.q_ccw.as_array(),
                           self.q_cw.as_array())
        interior = self.shape.skeleton_distances(P) < self.shape.radius - 1e-12
        return tri & ~interior

    def contains(self, p: Vec2) -> bool:
        return bool(self.contains_points(p.as_array()[None, :])[0])

    def boundary_points(self, count: int = 128) -> np.ndarray:
        """Samples along both tangency segments and the near boundary arc."""
        k = max(count // 3, 4)
        v = self.vertex.as_array()
        seg1 = v + np.linspace(0.0, 1.0, k)[:, None] * (self.q_ccw.as_array() - v)
        seg2 = v + np.linspace(0.0, 1.0, k)[:, None] * (self.q_cw.as_array() - v)
        arc_len = (self.s_cw - self.s_ccw) % self.shape.perimeter
        arc = self.shape.points_at(self.s_ccw + np.linspace(0.0, arc_len, k))
        return np.vstack([seg1, seg2, arc])


@dataclass
class ExtendedHat:
    """Hat unioned with the two sectors swept by its tangency segments."""

    base: Hat
    delta1: float

    @property
    def sweep(self) -> float:
        return self.base.delta + self.delta1

    def _sectors(self):
        v = self.base.vertex
        a_ccw = (self.base.q_ccw - v).angle()
        a_cw = (self.base.q_cw - v).angle()
        return ((v, self.base.seg_ccw, a_ccw, self.sweep, True),
                (v, self.base.seg_cw, a_cw, self.sweep, False))

    def contains_points(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        out = self.base.contains_points(P)
        for center, radius, start, sweep, ccw in self._sectors():
            out |= _in_sector(P, center.as_array(), radius, start, sweep, ccw)
        return out

    def contains(self, p: Vec2) -> bool:
        return bool(self.contains_points(p.as_array()[None, :])[0])

    def boundary_points(self, count: int = 160) -> np.ndarray:
        pts = [self.base.boundary_points(count * 3 // 5)]
        k = max(count // 5, 4)
        for center, radius, start, sweep, ccw in self._sectors():
            if radius <= 0.0:
                continue
            c = center.as_array()
            angs = start + (np.linspace(0.0, sweep, k) if ccw
                            else -np.linspace(0.0, sweep, k))
            pts.append(c + radius * np.stack([np.cos(angs), np.sin(angs)], axis=1))
            far = start + (sweep if ccw else -sweep)
            ray = c + np.linspace(0.0, radius, k)[:, None] \
                * np.array([math.cos(far), math.sin(far)])[None, :]
            pts.append(ray)
        return np.vstack(pts)

    def distance_lower_bound(self, P: np.ndarray, near: float = 1.0) -> np.ndarray:
        """Distance from points to the covering pieces (0 if possibly inside).

        The whole cover sits in the disk around the hat vertex of radius
        max segment length; points with a radial gap beyond `near` keep that
        coarse (still valid) bound instead of the exact piecewise distance.
        """
        P = np.atleast_2d(np.asarray(P, dtype=float))
        b = self.base
        v = b.vertex.as_array()
        r_cover = max(b.seg_ccw, b.seg_cw)
        coarse = np.hypot(P[:, 0] - v[0], P[:, 1] - v[1]) - r_cover
        out = np.maximum(coarse, 0.0)
        sel = coarse < near
        if np.any(sel):
            Q = P[sel]
            d = _dist_to_triangle(Q, v, b.q_ccw.as_array(), b.q_cw.as_array())
            for center, radius, start, sweep, ccw in self._sectors():
                d = np.minimum(d, _dist_to_sector(Q, center.as_array(), radius,
                                                  start, sweep, ccw))
            out[sel] = d
        return out

    def bound_radius_from(self, point: np.ndarray) -> float:
        b = self.base
        v = b.vertex.as_array()
        reach = float(np.hypot(*(v - point))) + max(b.seg_ccw, b.seg_cw)
        return max(reach, b.shape.bound_radius + float(
            np.hypot(*(b.shape.centroid - point))))


def _in_triangle(P: np.ndarray, a, b, c) -> np.ndarray:
    ab = b - a
    bc = c - b
    ca = a - c
    orient = ab[0] * (c - a)[1] - ab[1] * (c - a)[0]
    sgn = 1.0 if orient >= 0 else -1.0
    tol = -1e-12 * max(1.0, abs(orient))
    d1 = (ab[0] * (P[:, 1] - a[1]) - ab[1] * (P[:, 0] - a[0])) * sgn
    d2 = (bc[0] * (P[:, 1] - b[1]) - bc[1] * (P[:, 0] - b[0])) * sgn
    d3 = (ca[0] * (P[:, 1] - c[1]) - ca[1] * (P[:, 0] - c[0])) * sgn
    return (d1 >= tol) & (d2 >= tol) & (d3 >= tol)


def _in_sector(P: np.ndarray, center, radius, start, sweep, ccw) -> np.ndarray:
    d = P - center[None, :]
    rr = np.hypot(d[:, 0], d[:, 1])
    ang = np.arctan2(d[:, 1], d[:, 0])
    rel = (ang - start) % TWO_PI if ccw else (start - ang) % TWO_PI
    return (rr <= radius + 1e-12) & ((rel <= sweep + 1e-12) | (rr <= 1e-12))


def _dist_to_segment(P: np.ndarray, a, b) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(P[:, 0] - a[0], P[:, 1] - a[1])
    u = np.clip((P - a) @ ab / denom, 0.0, 1.0)
    q = a[None, :] + u[:, None] * ab[None, :]
    return np.hypot(P[:, 0] - q[:, 0], P[:, 1] - q[:, 1])


def _dist_to_triangle(P: np.ndarray, a, b, c) -> np.ndarray:
    inside = _in_triangle(P, a, b, c)
    d = np.minimum(np.minimum(_dist_to_segment(P, a, b),
                              _dist_to_segment(P, b, c)),
                   _dist_to_segment(P, c, a))
    return np.where(inside, 0.0, d)


def _dist_to_sector(P: np.ndarray, center, radius, start, sweep, ccw) -> np.ndarray:
    if radius <= 0.0:
        return np.hypot(P[:, 0] - center[0], P[:, 1] - center[1])
    inside = _in_sector(P, center, radius, start, sweep, ccw)
    d = P - center[None, :]
    rr = np.hypot(d[:, 0], d[:, 1])
    ang = np.arctan2(d[:, 1], d[:, 0])
    rel = (ang - start) % TWO_PI if ccw else (start - ang) % TWO_PI
    in_span = rel <= sweep
    arc_d = np.where(in_span, np.abs(rr - radius), np.inf)
    far = start + (sweep if ccw else -sweep)
    e0 = center + radius * np.array([math.cos(start), math.sin(start)])
    e1 = center + radius * np.array([math.cos(far), math.sin(far)])
    seg_d = np.minimum(_dist_to_segment(P, center, e0),
                       _dist_to_segment(P, center, e1))
    return np.where(inside, 0.0, np.minimum(arc_d, seg_d))


# -- construction -------------------------------------------------------------


def build_hat(shape: RoundedPolygon, f: Vec2, delta: float) -> Hat:
    """Hat of a convex body for travel direction f and opening angle delta.

    The two bounding rays leave the (computed) vertex at angles
    f_angle +- (pi/2 - delta) and touch the boundary where the tangent polar
    angle equals f_angle + 3*pi/2 -+ delta; the height is the vertex's
    distance to the body.
    """
    if not (0.0 < delta < math.pi / 2.0):
        raise ValueError("delta must lie in (0, pi/2)")
    f_angle = f.angle()
    s_ccw_hits = shape.tangent_arc_params(wrap_angle(f_angle + 1.5 * math.pi - delta))
    s_cw_hits = shape.tangent_arc_params(wrap_angle(f_angle + 1.5 * math.pi + delta))
    if not s_ccw_hits or not s_cw_hits:
        raise DegenerateHat("tangent direction not attained on the boundary")
    s_ccw = s_ccw_hits[-1]   # largest parameter on a flat stretch
    s_cw = s_cw_hits[0]      # smallest parameter on a flat stretch
    q_ccw = shape.point(s_ccw)
    q_cw = shape.point(s_cw)
    u_ccw = unit(f_angle + math.pi / 2.0 - delta)
    u_cw = unit(f_angle - math.pi / 2.0 + delta)
    denom = u_ccw.cross(u_cw)
    if abs(denom) < 1e-12:
        raise DegenerateHat("tangent rays are parallel")
    rel = q_cw - q_ccw
    a = rel.cross(u_cw) / denom
    vertex = q_ccw + u_ccw * a
    height = shape.distance(vertex)
    return Hat(vertex, q_ccw, q_cw, s_ccw, s_cw, height, delta, f_angle, shape)


def extend_hat(hat: Hat, delta1: float) -> ExtendedHat:
    """Widen a hat by sweeping its tangency segments through delta + delta1."""
    if not (0.0 <= delta1 < math.pi / 2.0):
        raise ValueError("delta1 must lie in [0, pi/2)")
    return ExtendedHat(hat, delta1)


def hat_max_distance(hat: Hat, shape: RoundedPolygon | None = None,
                     grid_pitch: float | None = None,
                     max_points: int = 2_000_000) -> float:
    """Maximum obstacle distance over the hat, by dense wedge sampling.

    The wedge is sampled on a barycentric grid with the given pitch (default
    1e-3 of the hat height); the vertex is always included.  The result must
    equal the hat height up to the sampling resolution.
    """
    shape = shape if shape is not None else hat.shape
    if grid_pitch is None:
        grid_pitch = 1e-3 * max(hat.height, 1e-12)
    v = hat.vertex.as_array()
    e1 = hat.q_ccw.as_array() - v
    e2 = hat.q_cw.as_array() - v
    span = max(np.hypot(*e1), np.hypot(*e2), 1e-12)
    k = int(math.ceil(span / grid_pitch))
    if (k + 1) * (k + 2) // 2 > max_points:
        k = int((2 * max_points) ** 0.5)
    axis = np.linspace(0.0, 1.0, k + 1)
    A, B = np.meshgrid(axis, axis)
    keep = (A + B) <= 1.0 + 1e-12
    P = v[None, :] + A[keep][:, None] * e1[None, :] + B[keep][:, None] * e2[None, :]
    d = shape.distances(P)
    return float(np.max(d))


# -- closed-form spacing criteria ---------------------------------------------


def _check_ratio(xi: float) -> float:
    if not (0.0 <= xi < 1.0):
        raise ValueError("speed ratio must lie in [0, 1)")
    return float(xi)


def criterion_omega(xi: float) -> float:
    """Initial-clearance requirement for disks, per unit radius."""
    xi = _check_ratio(xi)
    return 1.0 / math.sqrt(1.0 - xi * xi) - 1.0


def criterion_upsilon(xi: float) -> float:
    """Disk spacing requirement, per unit of the larger radius."""
    xi = _check_ratio(xi)
    c = math.sqrt(1.0 - xi * xi)
    return (math.sqrt(1.0 + 3.0 * xi * xi) - c) / c


def criterion_gamma(xi: float) -> float:
    """Along-track spacing requirement for perpendicular segments, per 2L."""
    xi = _check_ratio(xi)
    return xi / math.sqrt(1.0 - xi * xi)


def criterion_xi_fn(xi: float) -> float:
    """Cross-track spacing requirement for perpendicular segments, per 2L."""
    xi = _check_ratio(xi)
    c = math.sqrt(1.0 - xi * xi)
    return (1.0 - c) / (2.0 * c)


def rotating_grid_threshold(delta: float) -> float:
    """Pitch-to-half-length lower bound D/L for the rotating grid."""
    if not (0.0 <= delta < math.pi / 2.0):
        raise ValueError("delta must lie in [0, pi/2)")
    return 2.0 * math.sin(delta) + 1.0 / math.cos(delta)


def grid_speed_ratio_at(dl_ratio: float) -> tuple[float, float]:
    """Solve 2 sin d + sec d = D/L; returns (delta, required speed ratio 1/sin d)."""
    if dl_ratio <= 1.0:
        raise ValueError("threshold equation has no root for D/L <= 1")
    delta = brentq(lambda d: rotating_grid_threshold(d) - dl_ratio, 1e-12, 1.5)
    return float(delta), 1.0 / math.sin(delta)


def segment_hat_height(half_length: float, delta: float) -> float:
    """Hat height of a segment perpendicular to the travel direction."""
    return half_length * (1.0 - math.cos(2.0 * delta)) / math.sin(2.0 * delta)


def disk_hat_height(radius: float, delta: float) -> float:
    """Hat height of a disk."""
    return radius * (1.0 - math.cos(delta)) / math.cos(delta)


# -- rotating-grid neighbor inequalities ---------------------------------------

# Largest grid opening angle for which the neighbor inequalities are derived;
# beyond it the D < 2L regime of interest is excluded anyway.
GRID_DELTA_MAX = math.radians(26.26)


def appendix_c_validate(d_over_l: float, delta: float,
                        grid_step: float = 1e-4) -> dict:
    """Numerically verify the five neighbor-clearance inequality families.

    Each family is maximized over the segment phase on a fine grid; a neighbor
    passes when the supplied D/L exceeds the maximized requirement.  Margins
    are returned as D/L minus the requirement.
    """
    if not (0.0 < delta < GRID_DELTA_MAX + 1e-9):
        raise ValueError("delta must lie in (0, 26.26 degrees)")
    alphas = np.arange(-delta, delta + grid_step, grid_step)
    alphas = np.clip(alphas, -delta, delta)
    pos = alphas[alphas >= 0.0]

    # Facing neighbor on the travel axis.
    req0 = np.maximum(np.sin(delta + pos) + np.abs(np.cos(delta - pos)),
                      np.sin(delta - pos) + np.abs(np.cos(delta + pos)))
    req0 = float(np.max(req0)) / math.cos(delta)

    # Diagonal neighbors: Theta profile.
    s2d = math.sin(2.0 * delta)
    theta = (2.0 / s2d) * (math.cos(2.0 * delta) * np.sin(alphas)
                           + math.sin(delta) - math.cos(delta) * np.tan(alphas))
    i1 = int(np.argmax(theta))
    req1 = float(theta[i1])

    # Side neighbors on the cross axis.
    lhs_scale = np.cos(alphas) - np.sin(alphas)
    rhs = np.cos(alphas) / math.cos(delta) * np.maximum(np.sin(delta - alphas),
                                                        np.sin(delta + alphas))
    req3 = float(np.max(rhs / lhs_scale))

    result = {}
    for name, req in (("o0", req0), ("o1", req1), ("o2", req1),
                      ("o3", req3), ("o4", req3)):
        margin = d_over_l - req
        result[name] = (margin > 0.0, margin)
    result["theta_argmax"] = float(alphas[i1])
    result["passed"] = all(result[n][0] for n in ("o0", "o1", "o2", "o3", "o4"))
    return result


# -- sampled hypothesis checker -------------------------------------------------


@dataclass
class Theorem2Report:
    passed: bool
    hats_disjoint: bool
    robot_outside: bool
    first_violation: dict | None
    min_margin: float
    times_checked: int


def check_theorem2(obstacles: Sequence, classes: Sequence,
                   delta_star: Mapping[int, float], f: Vec2,
                   robot_pos0: Vec2, horizon: float,
                   time_step: float = 0.1,
                   boundary_samples: int = 192) -> Theorem2Report:
    """Sampled verification of the steady-progress hypotheses.

    (a) for every obstacle of class i, its delta_i*-hat extended by delta_j*
    stays disjoint from every class-j obstacle at all sampled times; (b) the
    robot start lies outside every delta_i*-hat at t = 0.  Classes whose
    delta* is zero have degenerate hats: their conditions reduce to obstacle
    disjointness and to the robot starting outside the bodies, both checked.
    """
    class_ids = sorted({c.id for c in classes})
    active = {cid: delta_star.get(cid, 0.0) for cid in class_ids}
    times = np.arange(0.0, horizon + time_step / 2, time_step)
    first_violation = None
    min_margin = math.inf
    hats_ok = True
    robot_ok = True

    r0 = robot_pos0.as_array()
    for i, obs in enumerate(obstacles):
        shape0 = obs.shape_at(0.0)
        if active[obs.class_id] <= 0.0:
            if shape0.contains(robot_pos0):
                robot_ok = False
                first_violation = first_violation or {
                    "kind": "robot_inside_obstacle", "t": 0.0, "obstacle": i}
        else:
            hat = build_hat(shape0, f, active[obs.class_id])
            if hat.contains(robot_pos0):
                robot_ok = False
                first_violation = first_violation or {
                    "kind": "robot_in_hat", "t": 0.0, "obstacle": i}

    for t in times:
        t = float(t)
        shapes = [obs.shape_at(t) for obs in obstacles]
        bnds = [shape.boundary_samples(boundary_samples).points for shape in shapes]
        for i, obs in enumerate(obstacles):
            di = active[obs.class_id]
            if di <= 0.0:
                continue
            hat = build_hat(shapes[i], f, di)
            for dj in sorted({active[c] for c in class_ids}):
                ehat = extend_hat(hat, dj)
                bound = ehat.bound_radius_from(shapes[i].centroid)
                ehat_bnd = None
                for j, other in enumerate(obstacles):
                    if j == i or active[other.class_id] != dj:
                        continue
                    gap = float(np.hypot(*(shapes[j].centroid - shapes[i].centroid)))
                    if gap > bound + shapes[j].bound_radius + 1e-9:
                        continue
                    if ehat_bnd is None:
                        ehat_bnd = ehat.boundary_points()
                    # Obstacles are pairwise disjoint, so another obstacle's
                    # boundary meets the hat exactly when it meets the cover.
                    dlb = ehat.distance_lower_bound(bnds[j])
                    margin = float(np.min(dlb))
                    hit = margin <= 0.0 or \
                        bool(np.any(shapes[j].contains_points(ehat_bnd)))
                    if hit:
                        hats_ok = False
                        if first_violation is None:
                            first_violation = {"kind": "hat_overlap", "t": t,
                                               "obstacle": i, "other": j}
                    else:
                        min_margin = min(min_margin, margin)
        if not hats_ok:
            break

    return Theorem2Report(hats_ok and robot_ok, hats_ok, robot_ok,
                          first_violation, min_margin, len(times))
