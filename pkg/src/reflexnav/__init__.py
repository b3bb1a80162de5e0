"""Reflex-level 2D navigation among moving and deforming obstacles.

Subpackages: `geom` (convex planar geometry), `sensor` (panoramic scan and
facets), `navlaw` (the control rule and tuning checks), `world` (obstacles and
speed-condition checks), `hats` (clearance regions and spacing criteria),
`sim` (closed-loop engine and the velocity-obstacle baseline), `scenarios`
(files and generators), `cli` (command line).
"""

__version__ = "0.1.0"
