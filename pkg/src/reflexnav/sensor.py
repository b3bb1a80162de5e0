"""Panoramic range scanner and facet extraction.

A scan casts M uniformly spaced rays from the robot position and records, per
ray, the distance to the nearest obstacle boundary and which obstacle returned
it.  Facets are the maximal angular arcs over which the measured distance
profile is continuous at scan resolution; they are the unit the control law
reasons about.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .geom import TWO_PI, Vec2

NO_RETURN = math.inf
NO_OBSTACLE = -1

DEFAULT_RAY_COUNT = 40
DEFAULT_MAX_RANGE = 20.0
DEFAULT_EDGE_THRESHOLD = 2.0

_MIN_RAYS = 8


class RobotInsideObstacle(RuntimeError):
    """The scan origin lies inside an obstacle: a collision already occurred."""

    def __init__(self, obstacle_id: int, t: float):
        super().__init__(f"robot inside obstacle {obstacle_id} at t={t:.3f}")
        self.obstacle_id = obstacle_id
        self.t = t


def ray_angles(count: int) -> np.ndarray:
    """Cell-centered bearings, strictly increasing, uniform 2*pi/count apart."""
    return -math.pi + (np.arange(count) + 0.5) * (TWO_PI / count)


@dataclass
class RangeScan:
    """One panoramic sweep: bearings, ranges, and per-ray obstacle ids."""

    angles: np.ndarray
    dists: np.ndarray
    obstacle_ids: np.ndarray
    t: float
    max_range: float

    def __post_init__(self):
        m = len(self.angles)
        if m < _MIN_RAYS:
            raise ValueError(f"need at least {_MIN_RAYS} rays, got {m}")
        if len(self.dists) != m or len(self.obstacle_ids) != m:
            raise ValueError("ray arrays must have equal length")
        spacing = TWO_PI / m
        if not np.allclose(np.diff(self.angles), spacing, atol=1e-9):
            raise ValueError("ray bearings must be uniform and increasing")

    @property
    def spacing(self) -> float:
        return TWO_PI / len(self.angles)


def scan(obstacles: Sequence, origin: Vec2, t: float,
         rays: int = DEFAULT_RAY_COUNT,
         max_range: float = DEFAULT_MAX_RANGE) -> RangeScan:
    """Cast `rays` bearings from `origin` against all obstacle boundaries.

    Obstacles expose ``shape_at(t)`` returning a ``RoundedPolygon``.  Per ray
    the smallest positive boundary intersection wins; beyond `max_range` the
    ray reports NO_RETURN.
    """
    shapes = [obs.shape_at(t) for obs in obstacles]
    o = origin.as_array()
    for i, shape in enumerate(shapes):
        if shape.contains(Vec2(o[0], o[1])):
            raise RobotInsideObstacle(i, t)

    alphas = ray_angles(rays)
    U = np.stack([np.cos(alphas), np.sin(alphas)], axis=1)

    centers = []
    radii = []
    circ_ids = []
    seg_a = []
    seg_b = []
    seg_ids = []
    for i, shape in enumerate(shapes):
        V, r, a, b = shape.ray_primitives()
        centers.append(V)
        radii.append(np.full(len(V), r))
        circ_ids.append(np.full(len(V), i, dtype=np.int64))
        if len(a):
            seg_a.append(a)
            seg_b.append(b)
            seg_ids.append(np.full(len(a), i, dtype=np.int64))

    best = np.full(rays, np.inf)
    best_id = np.full(rays, NO_OBSTACLE, dtype=np.int64)

    if centers:
        C = np.concatenate(centers)
        R = np.concatenate(radii)
        cid = np.concatenate(circ_ids)
        F = o[None, :] - C                      # (K, 2)
        B = U @ F.T                             # (M, K) = <u, o - c>
        Cq = np.einsum("ij,ij->i", F, F) - R * R
        disc = B * B - Cq[None, :]
        ok = disc >= 0.0
        sq = np.sqrt(np.where(ok, disc, 0.0))
        t_entry = -B - sq                       # first root along the ray
        t_entry = np.where(ok & (t_entry > 1e-12), t_entry, np.inf)
        k = np.argmin(t_entry, axis=1)
        tmin = t_entry[np.arange(rays), k]
        upd = tmin < best
        best = np.where(upd, tmin, best)
        best_id = np.where(upd, cid[k], best_id)

    if seg_a:
        A = np.concatenate(seg_a)
        Bseg = np.concatenate(seg_b)
        sid = np.concatenate(seg_ids)
        D = Bseg - A                            # (S, 2)
        AO = A - o[None, :]
        denom = U[:, 0:1] * D[None, :, 1] - U[:, 1:2] * D[None, :, 0]   # (M, S)
        with np.errstate(divide="ignore", invalid="ignore"):
            tt = (AO[None, :, 0] * D[None, :, 1] - AO[None, :, 1] * D[None, :, 0]) / denom
            uu = (AO[None, :, 0] * U[:, 1:2] - AO[None, :, 1] * U[:, 0:1]) / denom
        valid = (np.abs(denom) > 1e-15) & (uu >= 0.0) & (uu <= 1.0) & (tt > 1e-12)
        tt = np.where(valid, tt, np.inf)
        k = np.argmin(tt, axis=1)
        tmin = tt[np.arange(rays), k]
        upd = tmin < best
        best = np.where(upd, tmin, best)
        best_id = np.where(upd, sid[k], best_id)

    out = best > max_range
    dists = np.where(out, NO_RETURN, best)
    ids = np.where(out, NO_OBSTACLE, best_id)
    return RangeScan(alphas, dists, ids, t, max_range)


def scan_to_csv(s: RangeScan) -> str:
    """One CSV row per ray: t,ray_index,alpha,dist,obstacle_id (empty dist = no return)."""
    buf = io.StringIO()
    buf.write("t,ray_index,alpha,dist,obstacle_id\n")
    for i in range(len(s.angles)):
        d = s.dists[i]
        dtxt = "" if math.isinf(d) else f"{d:.9g}"
        oid = int(s.obstacle_ids[i])
        otxt = "" if oid == NO_OBSTACLE else str(oid)
        buf.write(f"{s.t:.9g},{i},{s.angles[i]:.9g},{dtxt},{otxt}\n")
    return buf.getvalue()


@dataclass
class Facet:
    """Maximal continuous arc of the scan attributable to one obstacle.

    `alpha_minus`/`alpha_plus` are unwrapped (alpha_minus <= alpha_plus) so the
    arc may straddle the +-pi seam; `ray_angles` increase within that window.
    """

    alpha_minus: float
    alpha_plus: float
    ray_angles: np.ndarray
    ray_dists: np.ndarray
    d_min: float = field(init=False)
    obstacle_id: int = NO_OBSTACLE
    class_id: int = 0

    def __post_init__(self):
        if len(self.ray_angles) == 0:
            raise ValueError("facet needs at least one ray")
        self.d_min = float(np.min(self.ray_dists))

    @property
    def width(self) -> float:
        return self.alpha_plus - self.alpha_minus

    def nearest_arc_angle(self, angle: float) -> float:
        """Point of the arc angularly nearest to `angle`, in arc coordinates."""
        rel = (angle - self.alpha_minus) % TWO_PI
        if rel <= self.width:
            return self.alpha_minus + rel
        beyond = rel - self.width            # ccw travel past alpha_plus
        wrap_back = TWO_PI - rel             # cw travel before alpha_minus
        return self.alpha_plus if beyond <= wrap_back else self.alpha_minus

    def profile_at(self, angle: float) -> float:
        """Distance profile at the arc point nearest to `angle` (any bearing)."""
        a = self.nearest_arc_angle(angle)
        return float(np.interp(a, self.ray_angles, self.ray_dists))


def extract_facets(s: RangeScan, edge_threshold: float = DEFAULT_EDGE_THRESHOLD,
                   class_of: Mapping[int, int] | Callable[[int], int] | None = None,
                   ) -> list[Facet]:
    """Split the scan circle at discontinuities into facets.

    A new arc starts between adjacent rays when the range jumps by at least
    `edge_threshold`, when a finite return meets NO_RETURN, or when the
    returning obstacle changes.  Arcs of pure NO_RETURN rays are dismissed.
    Arc endpoints sit at the midpoint between the two discordant rays.
    """
    m = len(s.angles)
    d = s.dists
    ids = s.obstacle_ids
    finite = np.isfinite(d)
    if not np.any(finite):
        return []

    def lookup(oid: int) -> int:
        if class_of is None:
            return 0
        if callable(class_of):
            return class_of(oid)
        return class_of[oid]

    # break[i]: arc boundary between ray i and ray (i + 1) % m
    brk = np.zeros(m, dtype=bool)
    nxt = np.roll(np.arange(m), -1)
    both = finite & finite[nxt]
    brk |= finite != finite[nxt]
    brk[both] |= np.abs(d[nxt][both] - d[both]) >= edge_threshold
    brk[both] |= ids[nxt][both] != ids[both]

    half = s.spacing / 2.0
    facets: list[Facet] = []

    if not np.any(brk):
        # Single facet covering the whole circle (everything finite here).
        a0 = s.angles[0] - half
        facets.append(Facet(a0, a0 + TWO_PI,
                            np.concatenate([s.angles, [s.angles[0] + TWO_PI]]),
                            np.concatenate([d, [d[0]]]),
                            obstacle_id=int(ids[0]), class_id=lookup(int(ids[0]))))
        return facets

    starts = (np.flatnonzero(brk) + 1) % m
    for st in starts:
        if not finite[st]:
            continue
        run = [st]
        j = st
        while not brk[j]:
            j = (j + 1) % m
            run.append(j)
        idx = np.array(run)
        angles = s.angles[idx].copy()
        # Unwrap across the seam so the profile is increasing in angle.
        jumps = np.diff(angles) < 0
        if np.any(jumps):
            k = int(np.flatnonzero(jumps)[0]) + 1
            angles[k:] += TWO_PI
        facets.append(Facet(angles[0] - half, angles[-1] + half,
                            angles, d[idx],
                            obstacle_id=int(ids[st]), class_id=lookup(int(ids[st]))))

    facets.sort(key=lambda f: ((f.alpha_minus + math.pi) % TWO_PI))
    return facets
