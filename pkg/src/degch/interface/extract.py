"""Marching-squares extraction of the u = 0 contour on the periodic box."""
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.ndimage import map_coordinates
from skimage.measure import find_contours

from ..errors import NoInterface


def _cumulative_arclength(points, closed):
    seg = np.hypot(*np.diff(points, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if closed:
        tail = np.hypot(*(points[0] - points[-1]))
        return s, float(s[-1] + tail)
    return s, float(s[-1])


@dataclass
class InterfaceCurve:
    """Polyline with u > 0 on its left.

    For a closed curve the first vertex is not repeated at the end.  Loops
    around a region with u > 0 therefore run counter-clockwise and have
    positive curvature.  ``normals`` are the outward (right-hand) unit
    normals, the direction along which normal velocities are signed.
    """

    points: np.ndarray
    t: float = 0.0
    kappa: Optional[np.ndarray] = None
    closed: bool = True

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")
        if self.closed and len(self.points) > 1 and np.allclose(self.points[0], self.points[-1]):
            self.points = self.points[:-1]

    def __len__(self):
        return len(self.points)

    @property
    def arclength(self):
        return _cumulative_arclength(self.points, self.closed)[0]

    @property
    def length(self):
        return _cumulative_arclength(self.points, self.closed)[1]

    @property
    def signed_area(self):
        x, y = self.points.T
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def centroid(self):
        x, y = self.points.T
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cr = x * yn - xn * y
        a = 0.5 * np.sum(cr)
        if abs(a) < 1e-300:
            return self.points.mean(axis=0)
        return np.array([np.sum((x + xn) * cr), np.sum((y + yn) * cr)]) / (6.0 * a)

    def mean_radius(self):
        """Arclength-weighted mean distance of the curve from its centroid."""
        p = self.points
        mid = 0.5 * (p + np.roll(p, -1, axis=0))
        w = np.hypot(*(np.roll(p, -1, axis=0) - p).T)
        r = np.hypot(*(mid - self.centroid).T)
        return float(np.sum(w * r) / np.sum(w))

    @property
    def tangents(self):
        p = self.points
        if self.closed:
            d = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
        else:
            d = np.gradient(p, axis=0)
        return d / np.hypot(*d.T)[:, None]

    @property
    def normals(self):
        tx, ty = self.tangents.T
        return np.stack([ty, -tx], axis=1)

    def shifted(self, offset):
        return replace(self, points=self.points + np.asarray(offset, dtype=float))


def _orient(points, u, h):
    """Reverse ``points`` if u < 0 on their left."""
    n = len(points)
    i = int(np.argmax(np.hypot(*(np.roll(points, -1, axis=0) - points).T)))
    a, b = points[i], points[(i + 1) % n]
    mid = 0.5 * (a + b)
    d = (b - a) / np.hypot(*(b - a))
    probe = mid + 0.5 * h * np.array([-d[1], d[0]])
    val = map_coordinates(u, (probe / h)[:, None], order=1, mode="grid-wrap")[0]
    return points if val > 0 else points[::-1]


def extract_interface(u, level=0.0, t=0.0, min_vertices=4):
    """Closed components of {u = level} with u > level on their left.

    The field is tiled 3 x 3 and contoured with marching squares (linear
    interpolation along cell edges).  A closed component is kept when its
    centroid lies in the central copy, so loops crossing the box boundary come
    out whole in continuous coordinates.  Contours spanning the tiled domain
    (interfaces that wrap around the torus) are dropped.
    """
    G = u.grid
    if G.dim != 2:
        raise ValueError("interface extraction needs a 2D field")
    a = u.values - level
    if np.all(a > 0) or np.all(a < 0):
        raise NoInterface("field has a single sign; no interface")
    h = G.spacing
    n = G.n
    tiled = np.tile(a, (3, 3))
    # wrap one extra row/column so the last cell of the tiling is contoured too
    tiled = np.pad(tiled, ((0, 1), (0, 1)), mode="wrap")
    out = []
    for c in find_contours(tiled, 0.0):
        if len(c) < min_vertices + 1 or not np.allclose(c[0], c[-1]):
            continue
        pts = c[:-1]
        cen = InterfaceCurve(pts).centroid
        # tile index with a tolerance so a centroid on the box edge picks one copy
        if np.any(np.floor(cen / n + 1e-9) != 1):
            continue
        phys = (pts - n) * h
        phys = _orient(phys, a, h)
        out.append(InterfaceCurve(phys, t=float(t)))
    out.sort(key=lambda c: (round(c.centroid[0], 9), round(c.centroid[1], 9)))
    return out


def _wrap_delta(d, period=2 * np.pi):
    return (d + 0.5 * period) % period - 0.5 * period


def match_loops(curves, references, max_distance=None):
    """Pair each curve with the nearest reference point (periodic distance).

    Returns ``(index, curve)`` pairs sorted by reference index; references
    without a curve are skipped and each reference takes at most one curve.
    """
    refs = np.asarray(references, dtype=float).reshape(-1, 2)
    taken = {}
    for c in curves:
        d = np.hypot(*_wrap_delta(refs - c.centroid).T)
        j = int(np.argmin(d))
        if max_distance is not None and d[j] > max_distance:
            continue
        if j not in taken or d[j] < taken[j][0]:
            taken[j] = (d[j], c)
    return [(j, taken[j][1]) for j in sorted(taken)]
