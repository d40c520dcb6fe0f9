"""Nonlocal climb force and the climb variant of the chemical potential."""
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ClimbDisabled, GridTooLarge
from .model import Kernel
from .spectral import PeriodicField, fractional_laplacian


@dataclass(frozen=True, eq=False)
class ClimbParams:
    """Lumped coefficient G b^2 / (2 (1 - nu)) and the applied climb force."""

    coefficient: float = 1.0
    f_app: Union[float, np.ndarray, PeriodicField] = 0.0
    enabled: bool = True

    def __post_init__(self):
        if not (self.coefficient > 0):
            raise ValueError("climb coefficient must be > 0")

    def applied_array(self, grid):
        f = self.f_app
        if isinstance(f, PeriodicField):
            return f.values
        if np.isscalar(f):
            return float(f)
        f = np.asarray(f, dtype=float)
        if f.shape != grid.shape:
            raise ValueError("applied force shape does not match the grid")
        return f

    def digest_items(self):
        f = self.f_app
        if isinstance(f, PeriodicField):
            f = f.values
        if np.isscalar(f):
            fa = repr(float(f))
        else:
            import hashlib
            fa = hashlib.sha256(np.ascontiguousarray(f, dtype="<f8").tobytes()).hexdigest()[:16]
        return (("climb_coefficient", repr(float(self.coefficient))), ("climb_f_app", fa),
                ("climb_enabled", str(bool(self.enabled))))


def climb_force_spectral(u, cp):
    """coefficient * (-Lap)^(1/2) u + f_app."""
    if u.grid.dim != 2:
        raise ValueError("climb force is defined for 2D fields")
    f = cp.coefficient * fractional_laplacian(u, 0.5).values + cp.applied_array(u.grid)
    return PeriodicField(u.grid, np.broadcast_to(f, u.grid.shape))


def climb_force_direct(u, cp, allow_large=False, chunk=256):
    """Direct quadrature of the dislocation climb-force integral.

    f(x) = coefficient / (2 pi) * sum_{xb != x} ((x - xb) . grad u(xb)) / R^3 h^2 + f_app

    The free-space kernel is applied on the box without periodic images.  The
    singular self-cell is replaced by its leading-order value
    -Lap u(x) / 2 * int_cell 1/R, with int_cell 1/R = 4 h ln(1 + sqrt 2).
    Cost is O(N^4).
    """
    G = u.grid
    if G.dim != 2:
        raise ValueError("climb force is defined for 2D fields")
    if G.n > 96 and not allow_large:
        raise GridTooLarge(f"direct climb quadrature at N={G.n} exceeds the N<=96 guard")
    k = Kernel(G, None)
    ux, uy = k.grad(u.values)
    X, Y = G.coords()
    xs, ys = X.ravel(), Y.ravel()
    gx, gy = ux.ravel(), uy.ravel()
    out = np.empty(G.size)
    for i0 in range(0, G.size, chunk):
        xi = xs[i0:i0 + chunk, None]
        yi = ys[i0:i0 + chunk, None]
        dx = xi - xs[None, :]
        dy = yi - ys[None, :]
        R2 = dx * dx + dy * dy
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(R2 > 0, R2 ** -1.5, 0.0)
        out[i0:i0 + chunk] = (w * (dx * gx[None, :] + dy * gy[None, :])).sum(axis=1)
    out *= G.cell_volume
    # self-cell: odd part cancels, the Hessian part integrates against 1/R
    lap = k.lap(u.values).ravel()
    out += -0.5 * lap * 4.0 * G.spacing * np.log1p(np.sqrt(2.0))
    out *= cp.coefficient / (2.0 * np.pi)
    f = out.reshape(G.shape) + cp.applied_array(G)
    return PeriodicField(G, f)


def chemical_potential_climb(u, p, dealias=False):
    """-Lap u + c_q q'(u) + c_f f_cl with the spectral climb force."""
    if not p.climb_on:
        raise ClimbDisabled("climb parameters are missing or disabled")
    k = Kernel(u.grid, p, dealias=dealias)
    return PeriodicField(u.grid, k.mu(u.values))


def loop_field(grid, centers, radii, epsilon, profile_width=None):
    """Superposed tanh loops (u > 0 inside each loop), clipped to [-1, 1]."""
    centers = [tuple(map(float, c)) for c in centers]
    radii = [float(r) for r in radii]
    if len(centers) != len(radii) or not centers:
        raise ValueError("need matching non-empty lists of centers and radii")
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            d = np.hypot(centers[i][0] - centers[j][0], centers[i][1] - centers[j][1])
            if d <= radii[i] + radii[j]:
                raise ValueError(f"loops {i} and {j} overlap")
    w = profile_width if profile_width is not None else np.sqrt(2.0) * epsilon
    X, Y = grid.coords()
    u = -np.ones(grid.shape)
    for (cx, cy), r in zip(centers, radii):
        d = np.hypot(X - cx, Y - cy)
        u = u + 1.0 + np.tanh((r - d) / w)
    return PeriodicField(grid, np.clip(u, -1.0, 1.0))


def loop_scenario(centers, radii, p, cfg, t_end, cadence=None, grid=None, n=64, hooks=()):
    """Run climb dynamics from superposed loops and record per-loop geometry.

    Returns a dict with the trajectory, diagnostics rows and loop rows
    ``(t, loop_id, mean_radius, center_x, center_y)``.
    """
    from . import diagnostics
    from .dynamics import run
    from .interface.extract import extract_interface, match_loops

    if not p.climb_on:
        raise ClimbDisabled("loop_scenario needs enabled climb parameters")
    from .spectral import PeriodicGrid
    grid = grid or PeriodicGrid(2, n)
    u0 = loop_field(grid, centers, radii, p.epsilon, profile_width=p.interface_width)
    diag_rows, loop_rows = [], []
    refs = [tuple(c) for c in centers]

    def hook(s):
        diag_rows.append(diagnostics.record(s.t, s.u, p))
        try:
            curves = extract_interface(s.u)
        except Exception:
            curves = []
        for lid, c in match_loops(curves, refs):
            loop_rows.append((s.t, lid, c.mean_radius(), c.centroid[0], c.centroid[1]))

    traj = run(u0, p, cfg, t_end, hooks=[hook, *hooks], cadence=cadence)
    return {"trajectory": traj, "diagnostics": diag_rows, "loops": loop_rows, "u0": u0}

