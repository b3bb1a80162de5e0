"""Planar geometry: cyclic angles, 2D vectors, and smooth convex boundary curves.

Angles are plain floats in radians and treated as cyclic (a and a +- 2*pi name
the same direction); the normalized representative lives in (-pi, pi].  Convex
bodies are represented as a convex polygon skeleton inflated by a radius
("rounded polygon"), which covers disks, stadiums ("cigars"), near-degenerate
thin segments, and boxes with rounded corners while keeping tangents, normals,
and support points analytic.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Absolute tolerance for angle equality and tie-breaking.
ANGLE_TOL = 1e-9


def wrap_angle(a: float) -> float:
    """Normalize an angle to its representative in (-pi, pi]."""
    a = math.remainder(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    return a


def angle_cw_ccw_distance(from_angle: float, to_angle: float) -> tuple[float, float]:
    """Counter-clockwise and clockwise angular travel between two directions.

    Returns ``(ccw, cw)``, both in [0, 2*pi).  For distinct directions they sum
    to 2*pi; coincident directions give (0, 0).
    """
    ccw = (to_angle - from_angle) % TWO_PI
    cw = (from_angle - to_angle) % TWO_PI
    return ccw, cw


def in_ccw_arc(angle: float, start: float, width: float, tol: float = ANGLE_TOL) -> bool:
    """True if `angle` lies within the arc swept ccw from `start` by `width`."""
    if width >= TWO_PI - tol:
        return True
    return (angle - start) % TWO_PI <= width + tol


@dataclass(frozen=True, slots=True)
class Vec2:
    """Immutable 2D vector (meters for positions, m/s for velocities)."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec2(self.x / n, self.y / n)

    def perp(self) -> "Vec2":
        """Counter-clockwise quarter turn."""
        return Vec2(-self.y, self.x)

    def rotated(self, angle: float) -> "Vec2":
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    def as_array(self) -> np.ndarray:
        return np.array((self.x, self.y), dtype=float)


def unit(angle: float) -> Vec2:
    """Unit vector at the given polar angle."""
    return Vec2(math.cos(angle), math.sin(angle))


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    u = float((p - a) @ ab) / denom
    u = min(1.0, max(0.0, u))
    d = p - (a + u * ab)
    return float(np.hypot(d[0], d[1]))


def segment_segment_distance(a0: np.ndarray, a1: np.ndarray,
                             b0: np.ndarray, b1: np.ndarray) -> float:
    """Minimum distance between two closed 2D segments (0 if they cross)."""
    d1 = a1 - a0
    d2 = b1 - b0
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    r = b0 - a0
    if denom != 0.0:
        t = (r[0] * d2[1] - r[1] * d2[0]) / denom
        u = (r[0] * d1[1] - r[1] * d1[0]) / denom
        if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
            return 0.0
    return min(
        _point_segment_distance(b0, a0, a1),
        _point_segment_distance(b1, a0, a1),
        _point_segment_distance(a0, b0, b1),
        _point_segment_distance(a1, b0, b1),
    )


class BoundarySamples:
    """Uniform boundary sampling with the data needed by velocity queries."""

    __slots__ = ("s", "points", "tangents", "normals_in", "kind", "index", "local")

    def __init__(self, s, points, tangents, normals_in, kind, index, local):
        self.s = s
        self.points = points            # (n, 2)
        self.tangents = tangents        # (n, 2) unit, ccw traversal
        self.normals_in = normals_in    # (n, 2) unit, into the body
        self.kind = kind                # (n,) 0 = vertex arc, 1 = edge
        self.index = index              # (n,) vertex/edge index
        self.local = local              # (n,) arc angle offset or edge fraction


class RoundedPolygon:
    """Convex body: a convex polygon skeleton inflated by a positive radius.

    The boundary is a smooth Jordan curve made of straight offset edges and
    circular arcs at the skeleton vertices, parameterized by arc length with
    the interior on the left (counter-clockwise traversal).  A single-vertex
    skeleton is a disk; a two-vertex skeleton is a stadium.
    """

    __slots__ = ("vertices", "radius", "n", "edge_dirs", "edge_lens", "normals",
                 "psi", "sweeps", "_pieces", "_starts", "perimeter",
                 "centroid", "bound_radius")

    def __init__(self, vertices, radius: float):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if V.shape[1] != 2:
            raise ValueError("vertices must be (n, 2)")
        if not (radius > 0.0) or not math.isfinite(radius):
            raise ValueError("radius must be positive (smooth boundary)")
        n = len(V)
        if n >= 2:
            if np.min(np.hypot(*(np.roll(V, -1, axis=0) - V).T)) <= 0.0:
                raise ValueError("skeleton vertices must be distinct")
        if n >= 3:
            area2 = float(np.sum(V[:, 0] * np.roll(V[:, 1], -1)
                                 - np.roll(V[:, 0], -1) * V[:, 1]))
            if area2 < 0.0:
                V = V[::-1].copy()
            E = np.roll(V, -1, axis=0) - V
            crosses = E[:, 0] * np.roll(E[:, 1], -1) - E[:, 1] * np.roll(E[:, 0], -1)
            if np.any(crosses < -1e-12 * np.max(np.abs(E)) ** 2):
                raise ValueError("skeleton must be convex")

        self.vertices = V
        self.radius = float(radius)
        self.n = n
        self.centroid = V.mean(axis=0)
        self.bound_radius = float(np.max(np.hypot(*(V - self.centroid).T))) + self.radius

        if n >= 2:
            E = np.roll(V, -1, axis=0) - V
            L = np.hypot(E[:, 0], E[:, 1])
            U = E / L[:, None]
            Mn = np.stack([U[:, 1], -U[:, 0]], axis=1)  # outward for ccw skeleton
            self.edge_dirs = U
            self.edge_lens = L
            self.normals = Mn
            self.psi = np.arctan2(Mn[:, 1], Mn[:, 0])
            prev = np.roll(self.psi, 1)
            self.sweeps = np.mod(self.psi - prev, TWO_PI)
            if n == 2:
                # Opposite normals: each cap sweeps half a turn.
                self.sweeps = np.array([math.pi, math.pi])
        else:
            self.edge_dirs = np.zeros((0, 2))
            self.edge_lens = np.zeros(0)
            self.normals = np.zeros((0, 2))
            self.psi = np.array([-math.pi])
            self.sweeps = np.array([TWO_PI])

        # Boundary pieces in traversal order: arc at v_i, then edge i.
        pieces = []
        s = 0.0
        r = self.radius
        for i in range(n):
            psi_start = self.psi[i - 1] if n >= 2 else self.psi[0]
            sweep = float(self.sweeps[i])
            if sweep > 1e-15:
                pieces.append((s, sweep * r, 0, i, psi_start, sweep))
                s += sweep * r
            if n >= 2:
                pieces.append((s, float(self.edge_lens[i]), 1, i, 0.0, 0.0))
                s += float(self.edge_lens[i])
        self._pieces = pieces
        self._starts = [p[0] for p in pieces]
        self.perimeter = s

    # -- parameterization ---------------------------------------------------

    def _locate(self, s: float):
        s = s % self.perimeter
        i = bisect.bisect_right(self._starts, s) - 1
        return self._pieces[i], s - self._pieces[i][0]

    def footprint(self, s: float):
        """Decompose arc length into (kind, index, local coordinate).

        kind 0: vertex arc, local = ccw angle offset from the arc start normal;
        kind 1: straight edge, local = fraction in [0, 1].
        """
        piece, ds = self._locate(s)
        _, length, kind, idx, _, _ = piece
        if kind == 0:
            return 0, idx, ds / self.radius
        return 1, idx, ds / length

    def _edge_endpoints(self, i: int):
        a = self.vertices[i] + self.radius * self.normals[i]
        b = self.vertices[(i + 1) % self.n] + self.radius * self.normals[i]
        return a, b

    def point(self, s: float) -> Vec2:
        piece, ds = self._locate(s)
        _, length, kind, idx, psi0, _ = piece
        if kind == 0:
            psi = psi0 + ds / self.radius
            v = self.vertices[idx]
            return Vec2(v[0] + self.radius * math.cos(psi),
                        v[1] + self.radius * math.sin(psi))
        a, b = self._edge_endpoints(idx)
        u = ds / length
        p = a + u * (b - a)
        return Vec2(p[0], p[1])

    def tangent(self, s: float) -> Vec2:
        piece, ds = self._locate(s)
        _, _, kind, idx, psi0, _ = piece
        if kind == 0:
            return unit(psi0 + ds / self.radius + math.pi / 2.0)
        return Vec2(self.edge_dirs[idx][0], self.edge_dirs[idx][1])

    def inward_normal(self, s: float) -> Vec2:
        t = self.tangent(s)
        return t.perp()

    def tangent_angle(self, s: float) -> float:
        return self.tangent(s).angle()

    def tangent_arc_params(self, target_tangent_angle: float) -> list[float]:
        """All arc lengths where the boundary tangent has the given polar angle.

        Strictly convex pieces contribute one parameter; a straight edge whose
        tangent matches contributes both of its end parameters.
        """
        phi = target_tangent_angle - math.pi / 2.0  # outward normal angle
        hits: list[float] = []
        for s0, length, kind, idx, psi0, sweep in self._pieces:
            if kind == 0:
                d = (phi - psi0) % TWO_PI
                if d <= sweep + ANGLE_TOL:
                    hits.append(s0 + min(d, sweep) * self.radius)
            else:
                if abs(wrap_angle(phi - self.psi[idx])) <= ANGLE_TOL:
                    hits.extend((s0, s0 + length))
        hits.sort()
        merged: list[float] = []
        for h in hits:
            if not merged or h - merged[-1] > 1e-9 * max(1.0, self.perimeter):
                merged.append(h)
        # The boundary is closed: a hit at the very end equals the one at 0.
        if len(merged) >= 2 and (self.perimeter - merged[-1]) + merged[0] <= 1e-9 * max(1.0, self.perimeter):
            merged.pop()
        return merged

    # -- queries ------------------------------------------------------------

    def support(self, direction: Vec2) -> Vec2:
        u = direction.normalized()
        scores = self.vertices @ u.as_array()
        v = self.vertices[int(np.argmax(scores))]
        return Vec2(v[0] + self.radius * u.x, v[1] + self.radius * u.y)

    def _skeleton_distance(self, p: np.ndarray) -> float:
        V = self.vertices
        if self.n == 1:
            return float(np.hypot(*(p - V[0])))
        if self.n == 2:
            return _point_segment_distance(p, V[0], V[1])
        E = np.roll(V, -1, axis=0) - V
        rel = p[None, :] - V
        crosses = E[:, 0] * rel[:, 1] - E[:, 1] * rel[:, 0]
        if np.all(crosses >= 0.0):
            return 0.0
        return min(_point_segment_distance(p, V[i], V[(i + 1) % self.n])
                   for i in range(self.n))

    def skeleton_distances(self, P: np.ndarray) -> np.ndarray:
        """Vectorized distance from points (m, 2) to the skeleton polygon."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        V = self.vertices
        if self.n == 1:
            return np.hypot(*(P - V[0]).T)
        dmin = np.full(len(P), np.inf)
        inside = np.ones(len(P), dtype=bool) if self.n >= 3 else np.zeros(len(P), dtype=bool)
        for i in range(self.n if self.n >= 3 else 1):
            a = V[i]
            b = V[(i + 1) % self.n]
            ab = b - a
            denom = float(ab @ ab)
            u = np.clip((P - a) @ ab / denom, 0.0, 1.0)
            d = P - (a[None, :] + u[:, None] * ab[None, :])
            dmin = np.minimum(dmin, np.hypot(d[:, 0], d[:, 1]))
            if self.n >= 3:
                rel = P - a
                inside &= (ab[0] * rel[:, 1] - ab[1] * rel[:, 0]) >= 0.0
        out = np.where(inside, 0.0, dmin)
        return out

    def distance(self, p: Vec2) -> float:
        """Euclidean distance to the body (0 on or inside)."""
        return max(0.0, self._skeleton_distance(p.as_array()) - self.radius)

    def distances(self, P: np.ndarray) -> np.ndarray:
        return np.maximum(0.0, self.skeleton_distances(P) - self.radius)

    def contains(self, p: Vec2, tol: float = 0.0) -> bool:
        return self._skeleton_distance(p.as_array()) <= self.radius + tol

    def contains_points(self, P: np.ndarray, tol: float = 0.0) -> np.ndarray:
        return self.skeleton_distances(P) <= self.radius + tol

    # -- sampling and ray casting primitives ---------------------------------

    def boundary_samples(self, count: int) -> BoundarySamples:
        s = np.linspace(0.0, self.perimeter, count, endpoint=False)
        pts = np.empty((count, 2))
        tans = np.empty((count, 2))
        kind = np.empty(count, dtype=np.int8)
        index = np.empty(count, dtype=np.int32)
        local = np.empty(count)
        r = self.radius
        for s0, length, k, idx, psi0, _ in self._pieces:
            lo = np.searchsorted(s, s0, side="left")
            hi = np.searchsorted(s, s0 + length, side="left")
            if hi <= lo:
                continue
            ds = s[lo:hi] - s0
            kind[lo:hi] = k
            index[lo:hi] = idx
            if k == 0:
                psi = psi0 + ds / r
                local[lo:hi] = ds / r
                pts[lo:hi, 0] = self.vertices[idx][0] + r * np.cos(psi)
                pts[lo:hi, 1] = self.vertices[idx][1] + r * np.sin(psi)
                tans[lo:hi, 0] = -np.sin(psi)
                tans[lo:hi, 1] = np.cos(psi)
            else:
                a, b = self._edge_endpoints(idx)
                u = ds / length
                local[lo:hi] = u
                pts[lo:hi] = a[None, :] + u[:, None] * (b - a)[None, :]
                tans[lo:hi] = self.edge_dirs[idx]
        normals_in = np.stack([-tans[:, 1], tans[:, 0]], axis=1)
        return BoundarySamples(s, pts, tans, normals_in, kind, index, local)

    def polyline(self, count: int = 64) -> np.ndarray:
        """Closed boundary polyline (count + 1, 2) for rendering and tests."""
        pts = self.boundary_samples(count).points
        return np.vstack([pts, pts[:1]])

    def points_at(self, s: np.ndarray) -> np.ndarray:
        """Vectorized boundary points for arbitrary arc-length parameters."""
        s = np.asarray(s, dtype=float) % self.perimeter
        out = np.empty((len(s), 2))
        idx = np.searchsorted(self._starts, s, side="right") - 1
        r = self.radius
        for k in range(len(self._pieces)):
            sel = idx == k
            if not np.any(sel):
                continue
            s0, length, kind, i, psi0, _ = self._pieces[k]
            ds = s[sel] - s0
            if kind == 0:
                psi = psi0 + ds / r
                out[sel, 0] = self.vertices[i][0] + r * np.cos(psi)
                out[sel, 1] = self.vertices[i][1] + r * np.sin(psi)
            else:
                a, b = self._edge_endpoints(i)
                u = (ds / length)[:, None]
                out[sel] = a[None, :] + u * (b - a)[None, :]
        return out

    def ray_primitives(self):
        """(circle centers, radius, edge starts, edge ends) for ray casting."""
        if self.n >= 2:
            a = self.vertices + self.radius * self.normals
            b = np.roll(self.vertices, -1, axis=0) + self.radius * self.normals
        else:
            a = np.zeros((0, 2))
            b = np.zeros((0, 2))
        return self.vertices, self.radius, a, b


ConvexCurve = RoundedPolygon


def disk(center: Vec2, radius: float) -> RoundedPolygon:
    return RoundedPolygon([(center.x, center.y)], radius)


def stadium(center: Vec2, half_length: float, radius: float, angle: float = 0.0) -> RoundedPolygon:
    """Cigar shape: a 2*half_length segment inflated by `radius`."""
    ax = unit(angle) * half_length
    return RoundedPolygon([(center.x + ax.x, center.y + ax.y),
                           (center.x - ax.x, center.y - ax.y)], radius)


# Default thickness ratio for zero-width segments; keeps the boundary smooth.
SEGMENT_RADIUS_RATIO = 1e-6


def thin_segment(center: Vec2, half_length: float, angle: float = 0.0,
                 radius: float | None = None) -> RoundedPolygon:
    if radius is None:
        radius = SEGMENT_RADIUS_RATIO * half_length
    return stadium(center, half_length, radius, angle)


def rounded_box(center: Vec2, half_width: float, half_height: float,
                corner_radius: float, angle: float = 0.0) -> RoundedPolygon:
    """Axis box (before rotation) with rounded corners."""
    hw = half_width - corner_radius
    hh = half_height - corner_radius
    if hw <= 0 or hh <= 0:
        raise ValueError("corner radius too large for the box")
    corners = [(hw, hh), (-hw, hh), (-hw, -hh), (hw, -hh)]
    c, s = math.cos(angle), math.sin(angle)
    pts = [(center.x + c * x - s * y, center.y + s * x + c * y) for x, y in corners]
    return RoundedPolygon(pts, corner_radius)
