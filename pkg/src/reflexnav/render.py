"""Static SVG snapshots: robot path, obstacle outlines, optional hat overlays."""

from __future__ import annotations

import io
import math
from typing import Sequence

import numpy as np

from .geom import Vec2
from .hats import build_hat
from .sim import Trace
from .world import World

_CLASS_COLORS = ("#607d8b", "#8d6e63", "#5c6bc0", "#26a69a", "#ab47bc")


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _poly(points: np.ndarray, stroke: str, fill: str, opacity: float,
          width: float = 0.03) -> str:
    pts = " ".join(f"{_fmt(p[0])},{_fmt(-p[1])}" for p in points)
    return (f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" '
            f'stroke="{stroke}" stroke-width="{width}"/>')


def render_trace_svg(world: World, trace: Trace, start: Vec2, f: Vec2,
                     goal_distance: float,
                     snapshot_times: Sequence[float] | None = None,
                     show_hats: bool = False,
                     hat_delta: float | None = None) -> str:
    """Compose an SVG of the run: obstacles at snapshots plus the path."""
    if snapshot_times is None:
        t_end = trace.t_end if trace.t_end > 0 else 1.0
        snapshot_times = [0.0, t_end / 2.0, t_end]

    path = np.array([[r.x, r.y] for r in trace.records]) if trace.records \
        else np.array([[start.x, start.y]])
    if trace.final_position is not None:
        path = np.vstack([path, [trace.final_position.x, trace.final_position.y]])

    outlines = []
    for k, t in enumerate(snapshot_times):
        opacity = 0.25 + 0.55 * (k / max(len(snapshot_times) - 1, 1))
        for obs in world.obstacles:
            shape = obs.shape_at(float(t))
            color = _CLASS_COLORS[obs.class_id % len(_CLASS_COLORS)]
            outlines.append((shape.polyline(48), color, opacity))

    all_pts = [path] + [o[0] for o in outlines]
    P = np.vstack(all_pts)
    x0, y0 = P.min(axis=0) - 1.0
    x1, y1 = P.max(axis=0) + 1.0

    buf = io.StringIO()
    buf.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    buf.write(f'<svg xmlns="http://www.w3.org/2000/svg" '
              f'viewBox="{_fmt(x0)} {_fmt(-y1)} {_fmt(x1 - x0)} {_fmt(y1 - y0)}" '
              f'width="800" height="{int(800 * (y1 - y0) / max(x1 - x0, 1e-9))}">\n')
    buf.write(f'<rect x="{_fmt(x0)}" y="{_fmt(-y1)}" width="{_fmt(x1 - x0)}" '
              f'height="{_fmt(y1 - y0)}" fill="#fafafa"/>\n')

    for pts, color, opacity in outlines:
        buf.write(_poly(pts, color, color, opacity * 0.5) + "\n")

    if show_hats:
        for obs in world.obstacles:
            delta = hat_delta if hat_delta is not None else 0.3
            try:
                hat = build_hat(obs.shape_at(0.0), f, delta)
            except Exception:
                continue
            buf.write(_poly(hat.boundary_points(60), "#ef6c00", "#ffb74d", 0.3,
                            width=0.02) + "\n")

    # Goal half-plane boundary: the line orthogonal to f at the goal distance.
    g = start + f * goal_distance
    n = f.perp()
    a = g + n * max(y1 - y0, x1 - x0)
    b = g - n * max(y1 - y0, x1 - x0)
    buf.write(f'<line x1="{_fmt(a.x)}" y1="{_fmt(-a.y)}" x2="{_fmt(b.x)}" '
              f'y2="{_fmt(-b.y)}" stroke="#1565c0" stroke-width="0.04" '
              f'stroke-dasharray="0.3,0.2"/>\n')

    pts = " ".join(f"{_fmt(p[0])},{_fmt(-p[1])}" for p in path)
    buf.write(f'<polyline points="{pts}" fill="none" stroke="#c62828" '
              f'stroke-width="0.06"/>\n')
    buf.write(f'<circle cx="{_fmt(start.x)}" cy="{_fmt(-start.y)}" r="0.15" '
              f'fill="#2e7d32"/>\n')
    buf.write("</svg>\n")
    return buf.getvalue()
