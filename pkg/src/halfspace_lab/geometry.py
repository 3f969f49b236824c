"""Planar regions (axis-aligned boxes and disk sectors) with exact geometry.

The synthetic distributions are mixtures of constant-label layers, each a
box or a disk sector with a constant (possibly negative, for subtractive
corrections) density.  This module provides, per region:

  * mass, membership tests, uniform sampling,
  * tensor Gauss-Legendre quadrature nodes,
  * exact intersection areas and first moments against halfplanes through
    the origin (polygon clipping for boxes, arc arithmetic for sectors).

Halfplanes are always of the form {x : <n, x> >= 0}; every decision
boundary we deal with is homogeneous, so clipping a sector by such a
halfplane only restricts its angular interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi

__all__ = ["Region", "box_region", "sector_region", "gl_nodes_1d"]


@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gl_nodes_1d(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


# ---------------------------------------------------------------------------
# polygon helpers (vertices CCW, shape (k, 2))

def polygon_area_moments(poly: np.ndarray) -> tuple[float, float, float]:
    """(area, integral of x, integral of y) over a simple CCW polygon."""
    if len(poly) < 3:
        return 0.0, 0.0, 0.0
    x = poly[:, 0]
    y = poly[:, 1]
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * float(np.sum(cross))
    mx = float(np.sum((x + xn) * cross)) / 6.0
    my = float(np.sum((y + yn) * cross)) / 6.0
    return area, mx, my


def clip_polygon_halfplane(poly: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Clip a convex CCW polygon to {x : <normal, x> >= 0}."""
    if len(poly) == 0:
        return poly
    d = poly @ normal
    out = []
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        pi, pj = poly[i], poly[j]
        di, dj = d[i], d[j]
        if di >= 0.0:
            out.append(pi)
            if dj < 0.0:
                t = di / (di - dj)
                out.append(pi + t * (pj - pi))
        elif dj >= 0.0:
            t = di / (di - dj)
            out.append(pi + t * (pj - pi))
    if len(out) < 3:
        return np.empty((0, 2))
    return np.asarray(out)


# ---------------------------------------------------------------------------
# arcs on the circle, represented as (lo, hi) with hi - lo <= 2*pi

def _arc_overlaps(a: tuple[float, float], b: tuple[float, float]):
    """Intersections of two angular intervals on the circle."""
    out = []
    for shift in (-TWO_PI, 0.0, TWO_PI):
        lo = max(a[0], b[0] + shift)
        hi = min(a[1], b[1] + shift)
        if hi > lo + 1e-15:
            out.append((lo, hi))
    return out


def intersect_arcs(arcs, lo: float, hi: float):
    """Intersect a list of arcs with the single arc (lo, hi)."""
    out = []
    for a in arcs:
        out.extend(_arc_overlaps(a, (lo, hi)))
    return out


def _sector_arc_moments(radius: float, arcs) -> tuple[float, float, float]:
    """(area, integral of x, integral of y) of radial sectors over arcs."""
    area = 0.0
    mx = 0.0
    my = 0.0
    r2 = radius * radius
    r3 = r2 * radius
    for lo, hi in arcs:
        area += 0.5 * r2 * (hi - lo)
        mx += (r3 / 3.0) * (math.sin(hi) - math.sin(lo))
        my += (r3 / 3.0) * (math.cos(lo) - math.cos(hi))
    return area, mx, my


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """One constant-label, constant-density layer of a planar mixture.

    kind is "box" (axis-aligned rectangle) or "sector" (radial sector of a
    disk centered at the origin).  density may be negative, which is used
    to carve a label flip out of an underlying layer; mass() and all
    integrals are then signed accordingly.  tag identifies the mixture
    part the layer belongs to.
    """

    kind: str
    label: int
    density: float
    tag: int = 0
    x0: float = 0.0
    x1: float = 0.0
    y0: float = 0.0
    y1: float = 0.0
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0

    # -- basic measures ----------------------------------------------------

    def area(self) -> float:
        if self.kind == "box":
            return (self.x1 - self.x0) * (self.y1 - self.y0)
        return 0.5 * self.radius ** 2 * (self.theta1 - self.theta0)

    def mass(self) -> float:
        return self.density * self.area()

    def max_norm(self) -> float:
        if self.kind == "box":
            corners = [abs(self.x0), abs(self.x1)], [abs(self.y0), abs(self.y1)]
            return math.hypot(max(corners[0]), max(corners[1]))
        return self.radius

    # -- membership ---------------------------------------------------------

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        if self.kind == "box":
            return (
                (pts[:, 0] >= self.x0)
                & (pts[:, 0] <= self.x1)
                & (pts[:, 1] >= self.y0)
                & (pts[:, 1] <= self.y1)
            )
        r = np.hypot(pts[:, 0], pts[:, 1])
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        inside = r <= self.radius
        # wrap the angle into [theta0, theta0 + 2*pi) before comparing
        rel = np.mod(theta - self.theta0, TWO_PI)
        return inside & (rel <= self.theta1 - self.theta0 + 1e-15)

    # -- sampling -----------------------------------------------------------

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.density < 0:
            raise ValueError("cannot sample from a subtractive layer")
        if self.kind == "box":
            x = rng.uniform(self.x0, self.x1, size=n)
            y = rng.uniform(self.y0, self.y1, size=n)
            return np.column_stack([x, y])
        theta = rng.uniform(self.theta0, self.theta1, size=n)
        r = self.radius * np.sqrt(rng.uniform(0.0, 1.0, size=n))
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    # -- quadrature nodes ----------------------------------------------------

    def quad_nodes(self, nx: int, ny: int, angular_splits=()) -> tuple[np.ndarray, np.ndarray]:
        """Tensor GL nodes (points, weights) integrating dx dy over the region.

        For sectors, nx counts radial nodes, ny angular nodes, and the
        angular interval is additionally split at any angles listed in
        angular_splits that fall strictly inside it.  Splitting matters
        because Gauss nodes cluster at panel endpoints: placing a panel
        boundary on a decision line resolves the sharp loss transition
        there at machine precision.
        """
        if self.kind == "box":
            xs, wx = gl_nodes_1d(self.x0, self.x1, nx)
            ys, wy = gl_nodes_1d(self.y0, self.y1, ny)
            px, py = np.meshgrid(xs, ys, indexing="ij")
            w = np.outer(wx, wy)
            pts = np.column_stack([px.ravel(), py.ravel()])
            return pts, w.ravel()

        lo, hi = self.theta0, self.theta1
        cuts = [lo]
        for s in angular_splits:
            rel = (s - lo) % TWO_PI
            if 1e-12 < rel < (hi - lo) - 1e-12:
                cuts.append(lo + rel)
        cuts.append(hi)
        cuts = sorted(cuts)

        rs, wr = gl_nodes_1d(0.0, self.radius, nx)
        all_t = []
        all_wt = []
        span = hi - lo
        for a, b in zip(cuts[:-1], cuts[1:]):
            m = max(24, int(math.ceil(ny * (b - a) / span)))
            t, wt = gl_nodes_1d(a, b, m)
            all_t.append(t)
            all_wt.append(wt)
        ts = np.concatenate(all_t)
        wt = np.concatenate(all_wt)

        rg, tg = np.meshgrid(rs, ts, indexing="ij")
        # the radial measure r dr folds into the weights
        w = np.outer(wr * rs, wt)
        pts = np.column_stack([(rg * np.cos(tg)).ravel(), (rg * np.sin(tg)).ravel()])
        return pts, w.ravel()

    # -- exact halfplane geometry ---------------------------------------------

    def _poly(self) -> np.ndarray:
        return np.array(
            [
                [self.x0, self.y0],
                [self.x1, self.y0],
                [self.x1, self.y1],
                [self.x0, self.y1],
            ]
        )

    def halfplane_moments(self, normals) -> tuple[float, float, float]:
        """(area, int x, int y) of the region cut by all {x: <n, x> >= 0}.

        normals is an iterable of direction vectors; the cut is the
        intersection of the region with every listed halfplane.  Exact up
        to float rounding.
        """
        normals = [np.asarray(n, dtype=float) for n in normals]
        if self.kind == "box":
            poly = self._poly()
            for n in normals:
                poly = clip_polygon_halfplane(poly, n)
                if len(poly) == 0:
                    return 0.0, 0.0, 0.0
            return polygon_area_moments(poly)
        arcs = [(self.theta0, self.theta1)]
        for n in normals:
            psi = math.atan2(n[1], n[0])
            arcs = intersect_arcs(arcs, psi - 0.5 * math.pi, psi + 0.5 * math.pi)
            if not arcs:
                return 0.0, 0.0, 0.0
        return _sector_arc_moments(self.radius, arcs)

    def halfplane_area(self, normal) -> float:
        return self.halfplane_moments([normal])[0]


def box_region(label: int, density: float, x0: float, x1: float, y0: float, y1: float, tag: int = 0) -> Region:
    return Region(kind="box", label=label, density=density, tag=tag, x0=x0, x1=x1, y0=y0, y1=y1)


def square_region(label: int, density: float, center, edge: float, tag: int = 0) -> Region:
    cx, cy = center
    h = 0.5 * edge
    return box_region(label, density, cx - h, cx + h, cy - h, cy + h, tag=tag)


def sector_region(label: int, density: float, radius: float, theta0: float, theta1: float, tag: int = 0) -> Region:
    if not theta1 > theta0:
        raise ValueError("sector needs theta1 > theta0")
    if theta1 - theta0 > TWO_PI + 1e-12:
        raise ValueError("sector spans more than a full turn")
    return Region(
        kind="sector", label=label, density=density, tag=tag,
        radius=radius, theta0=theta0, theta1=theta1,
    )


__all__.append("square_region")
