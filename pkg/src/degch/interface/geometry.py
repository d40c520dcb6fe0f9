"""Curvature, normal velocities and related curve measurements."""
from dataclasses import replace

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import savgol_filter
from scipy.spatial import cKDTree

from ..errors import DegenerateCurve, Mismatch, TimeOrder
from .extract import InterfaceCurve, _wrap_delta

MIN_VERTICES = 8


def resample_uniform(c, n=None):
    """Resample a curve at equal arclength with a (periodic) cubic spline."""
    n = n or len(c)
    p = c.points
    if c.closed:
        pc = np.vstack([p, p[:1]])
        s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pc, axis=0).T))])
        cs = CubicSpline(s, pc, bc_type="periodic")
        q = cs(np.linspace(0.0, s[-1], n, endpoint=False))
    else:
        s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(p, axis=0).T))])
        q = CubicSpline(s, p)(np.linspace(0.0, s[-1], n))
    return replace(c, points=q, kappa=None)


def curvature(c, window=7, polyorder=4, resample=True):
    """Fill ``kappa`` from local polynomial fits of x(s), y(s).

    The curve is first resampled at equal arclength (same vertex count) so
    the Savitzky-Golay derivatives apply; closed curves use a wrapped window.
    """
    if len(c) < MIN_VERTICES:
        raise DegenerateCurve(f"curve has {len(c)} vertices, need at least {MIN_VERTICES}")
    if window % 2 == 0 or window <= polyorder:
        raise ValueError("window must be odd and larger than polyorder")
    c = resample_uniform(c) if resample else replace(c)
    n = len(c)
    ds = c.length / (n if c.closed else n - 1)
    mode = "wrap" if c.closed else "interp"
    x, y = c.points.T
    d1 = [savgol_filter(v, window, polyorder, deriv=1, delta=ds, mode=mode) for v in (x, y)]
    d2 = [savgol_filter(v, window, polyorder, deriv=2, delta=ds, mode=mode) for v in (x, y)]
    speed = np.hypot(d1[0], d1[1])
    c.kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / speed ** 3
    return c


def gauss_bonnet(c):
    """Closed-curve integral of kappa ds (2 pi for a counter-clockwise loop)."""
    if c.kappa is None:
        raise ValueError("curvature not filled; call curvature() first")
    return float(np.sum(c.kappa) * c.length / len(c))


def turning_number(c):
    """Total turning of the tangent divided by 2 pi."""
    tx, ty = c.tangents.T
    ang = np.arctan2(ty, tx)
    d = _wrap_delta(np.diff(np.concatenate([ang, ang[:1]])))
    return float(np.sum(d) / (2 * np.pi))


def _closest_points(src, target_points, closed=True):
    """Closest point on the target polyline for each source vertex."""
    tp = target_points
    m = len(tp)
    tree = cKDTree(tp)
    _, j = tree.query(src)
    best = tp[j].copy()
    bestd = np.hypot(*(src - best).T)
    for off in (-1, 0):
        a_idx = (j + off) % m
        b_idx = (a_idx + 1) % m
        if not closed:
            ok = (j + off >= 0) & (j + off + 1 < m)
        else:
            ok = np.ones(len(src), dtype=bool)
        a, b = tp[a_idx], tp[b_idx]
        ab = b - a
        L2 = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
        s = np.clip(np.sum((src - a) * ab, axis=1) / L2, 0.0, 1.0)
        q = a + s[:, None] * ab
        d = np.hypot(*(src - q).T)
        better = ok & (d < bestd)
        best[better] = q[better]
        bestd[better] = d[better]
    return best


def measured_normal_velocity(c1, c2):
    """Signed normal displacement from c1 to c2 over t2 - t1, on c1's vertices.

    Positive values mean motion along the outward normal of c1.  Lists of
    curves are paired in order and give a list of arrays.
    """
    if isinstance(c1, (list, tuple)) or isinstance(c2, (list, tuple)):
        c1, c2 = list(c1), list(c2)
        if len(c1) != len(c2):
            raise Mismatch(f"curve counts differ ({len(c1)} vs {len(c2)})")
        return [measured_normal_velocity(a, b) for a, b in zip(c1, c2)]
    dt = c2.t - c1.t
    if not dt > 0:
        raise TimeOrder("need t2 > t1")
    # bring c2 into the same periodic copy as c1
    shift = c1.centroid + _wrap_delta(c2.centroid - c1.centroid) - c2.centroid
    target = c2.points + shift
    q = _closest_points(c1.points, target, c2.closed)
    return np.sum((q - c1.points) * c1.normals, axis=1) / dt


def _d2_periodic(f, ds):
    """Fourth-order central second difference on a periodic sequence."""
    return (-np.roll(f, 2) + 16 * np.roll(f, 1) - 30 * f + 16 * np.roll(f, -1)
            - np.roll(f, -2)) / (12.0 * ds * ds)


def predicted_normal_velocity(c, B):
    """B d_ss kappa on the vertices of a curve filled by :func:`curvature`.

    Assumes equal arclength spacing, which :func:`curvature` provides.
    """
    if c.kappa is None:
        raise ValueError("curvature not filled; call curvature() first")
    if not c.closed:
        raise ValueError("predicted velocity needs a closed curve")
    ds = c.length / len(c)
    return B * _d2_periodic(np.asarray(c.kappa, dtype=float), ds)


def synthetic_circle(R, n, center=(0.0, 0.0), t=0.0):
    """Counter-clockwise circle polyline (test helper)."""
    a = np.linspace(0, 2 * np.pi, n, endpoint=False)
    pts = np.stack([center[0] + R * np.cos(a), center[1] + R * np.sin(a)], axis=1)
    return InterfaceCurve(pts, t=t)


def mode_amplitude(points, k, center=None):
    """Amplitude of the cos/sin(k phi) component of r(phi) about ``center``.

    ``center`` defaults to the area centroid.  Least squares over the
    vertices, so uneven vertex spacing is tolerated.
    """
    p = np.asarray(points, dtype=float)
    if center is None:
        center = InterfaceCurve(p).centroid
    d = p - np.asarray(center)
    phi = np.arctan2(d[:, 1], d[:, 0])
    r = np.hypot(d[:, 0], d[:, 1])
    A = np.column_stack([np.ones_like(phi), np.cos(k * phi), np.sin(k * phi)])
    co = np.linalg.lstsq(A, r, rcond=None)[0]
    return float(np.hypot(co[1], co[2]))
