"""Regularization (theta) sweeps and grid self-convergence studies."""
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import diagnostics
from .dynamics import run
from .errors import DegchError
from .spectral import PeriodicField, PeriodicGrid


@dataclass
class SweepReport:
    """Outcome of a sweep over theta (or grid size, see ``parameter``).

    ``pairwise_distances[i]`` is the L2 distance between the final states of
    runs i and i + 1; ``monotonicity_flags[i]`` says whether distance i + 1 is
    no larger than distance i.
    """

    thetas: list
    pairwise_distances: list
    energies: list
    monotonicity_flags: list
    runtimes: list
    initial_energy: float = float("nan")
    conserved_drift: list = field(default_factory=list)
    final_states: list = field(default_factory=list)
    parameter: str = "theta"
    rate: Optional[float] = None
    note: str = ("each run conserves its own int G_theta; values are not "
                 "comparable across theta")

    @property
    def tail_nonincreasing(self):
        """Distances non-increasing over the last two pairs."""
        d = self.pairwise_distances
        return len(d) < 2 or d[-1] <= d[-2]

    def energy_bounded(self, tol=1e-6):
        return all(e <= self.initial_energy + tol for e in self.energies)

    def rows(self):
        out = []
        for i, th in enumerate(self.thetas):
            d = self.pairwise_distances[i] if i < len(self.pairwise_distances) else ""
            out.append((th, self.energies[i], d, self.runtimes[i],
                        self.conserved_drift[i] if self.conserved_drift else ""))
        return out

    def summary(self):
        lines = [f"{self.parameter} sweep over {self.thetas}",
                 f"initial energy {self.initial_energy:.10g}"]
        for i, th in enumerate(self.thetas):
            line = f"  {self.parameter}={th:g}  E_final={self.energies[i]:.10g}  time={self.runtimes[i]:.1f}s"
            if i < len(self.pairwise_distances):
                line += f"  d_{i}={self.pairwise_distances[i]:.6e}"
            lines.append(line)
        lines.append(f"tail non-increasing: {self.tail_nonincreasing}")
        lines.append(f"energies bounded by E(u0): {self.energy_bounded()}")
        return "\n".join(lines)


def l2_distance(a, b):
    va = a.values if isinstance(a, PeriodicField) else np.asarray(a)
    vb = b.values if isinstance(b, PeriodicField) else np.asarray(b)
    grid = a.grid if isinstance(a, PeriodicField) else b.grid
    return float(np.sqrt(grid.integrate(np.square(va - vb))))


def _flags(d):
    return [bool(d[i + 1] <= d[i]) for i in range(len(d) - 1)]


def theta_sweep(u0, p, cfg, thetas, t_end, hooks_for=None, keep_states=True):
    """Run identical dynamics for each theta and compare the final states.

    ``hooks_for(theta)`` may return a list of run hooks for that theta.
    Errors raised by a run are re-raised with the theta value attached.
    """
    thetas = [float(t) for t in thetas]
    if not thetas:
        raise ValueError("need at least one theta")
    if any(t <= 0 for t in thetas):
        raise ValueError("thetas must be positive")
    if any(b >= a for a, b in zip(thetas, thetas[1:])):
        raise ValueError("thetas must be strictly decreasing")
    E0 = diagnostics.energy_E(u0, p)
    finals, energies, runtimes, drift = [], [], [], []
    for th in thetas:
        pt = p.with_(theta=th)
        hooks = hooks_for(th) if hooks_for else ()
        t0 = time.perf_counter()
        try:
            traj = run(u0, pt, cfg, t_end, hooks=hooks)
        except DegchError as e:
            e.args = (f"theta={th:g}: {e.args[0] if e.args else e}",) + tuple(e.args[1:])
            e.theta = th
            raise
        runtimes.append(time.perf_counter() - t0)
        uf = traj.final.u
        finals.append(uf)
        energies.append(diagnostics.energy_E(uf, pt))
        g0 = diagnostics.conserved_G(u0, pt)
        drift.append(abs(diagnostics.conserved_G(uf, pt) - g0) / max(abs(g0), 1e-300))
    dist = [l2_distance(a, b) for a, b in zip(finals, finals[1:])]
    return SweepReport(thetas, dist, energies, _flags(dist), runtimes, E0, drift,
                       finals if keep_states else [])


def _restrict(u, n):
    """Spectral truncation of a field to an n-point grid of the same box."""
    G = u.grid
    if n == G.n:
        return u.copy()
    coarse = PeriodicGrid(G.dim, n)
    if n > G.n:
        raise ValueError("restriction needs a coarser grid")
    r = G.n // n
    # nested grids: truncating the spectrum and resampling equals filtering then injection
    fh = G.fft(u.values)
    k = G._k
    mask = np.ones(fh.shape, dtype=bool)
    for kk in k:
        mask &= np.abs(kk) < n // 2
    vals = G.ifft(fh * mask)
    sl = (slice(None, None, r),) * G.dim
    return PeriodicField(coarse, vals[sl])


def galerkin_refinement(u0: Union[Callable, PeriodicField], p, cfg, grid_sizes, t_end, dim=2):
    """Self-convergence of the pseudospectral discretization under refinement.

    ``u0`` is either a callable of the coordinate arrays or a field on the
    finest grid (then spectrally truncated to the coarser ones).  Errors are
    L2 distances to the finest run, compared on the coarse grid points.  The
    report's ``thetas`` field holds the grid sizes; ``rate`` is the slope of
    log(error) against N over the pre-asymptotic range.
    """
    sizes = [int(n) for n in grid_sizes]
    if len(sizes) < 2:
        raise ValueError("need at least two grid sizes")
    if any(b != 2 * a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("grid sizes must be dyadic (each twice the previous)")
    finest = sizes[-1]
    finals, runtimes = [], []
    for n in sizes:
        if isinstance(u0, PeriodicField):
            if u0.grid.n != finest:
                raise ValueError("initial field must live on the finest grid")
            start = _restrict(u0, n)
        else:
            start = PeriodicField.from_function(PeriodicGrid(dim, n), u0)
        t0 = time.perf_counter()
        traj = run(start, p, cfg, t_end)
        runtimes.append(time.perf_counter() - t0)
        finals.append(traj.final.u)
    ref = finals[-1]
    errors = []
    for f in finals[:-1]:
        r = finest // f.grid.n
        sl = (slice(None, None, r),) * f.grid.dim
        errors.append(l2_distance(f, PeriodicField(f.grid, ref.values[sl])))
    energies = [diagnostics.energy_E(f, p) for f in finals]
    rep = SweepReport(sizes, errors, energies, _flags(errors), runtimes,
                      diagnostics.energy_E(start, p), parameter="N",
                      note="errors are distances to the finest grid")
    pos = [(n, e) for n, e in zip(sizes, errors) if e > 0]
    rep.rate = float(np.polyfit([n for n, _ in pos], np.log([e for _, e in pos]), 1)[0]) if len(pos) >= 2 else None
    return rep
