"""Time integration of the pseudospectral semidiscretization.

Two schemes are provided.

``explicit_rk4_adaptive``
    Cash-Karp embedded pair advancing the fourth-order solution with a PI
    step-size controller; ``fixed_step=True`` gives classical fixed-step use.
    Only practical when the bulk stiffness M0 k^4 / theta^m is moderate.

``imex_stabilized``
    Linearly implicit Euler step on g(u) u_t = M0 div(grad mu - mu (g'/g) grad u).
    The operator y -> g y - dt M0 div(grad(K y) - (K y) b) is frozen at the
    start of the step (b = (g'/g) grad u, K the linearization of mu) and the
    system is solved by GMRES with an algebraic-multigrid preconditioner
    built from a finite-difference analogue.  With ``dealias`` the products
    inside the flux are truncated by the 2/3 rule while g(u) y stays pointwise.
    A constant shift then restores int G_theta(u) exactly.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, gmres, splu

from .errors import DegenerateStabilizer, StepSizeUnderflow
from .model import G_value, Kernel
from .spectral import PeriodicField

SCHEMES = ("explicit_rk4_adaptive", "imex_stabilized")


@dataclass
class SimState:
    t: float
    u: PeriodicField
    params: object
    step_count: int = 0
    dt_next: Optional[float] = None

    def copy(self):
        return SimState(self.t, self.u.copy(), self.params, self.step_count, self.dt_next)


@dataclass
class StepperConfig:
    """Step control settings.

    ``stabilization`` is ``'auto'`` (linearize mu exactly about the current
    state) or ``'fixed'`` (replace c_q q''(u) by the constant
    ``stabilization_A``).
    """

    scheme: str = "imex_stabilized"
    dt_init: float = 1e-6
    dt_min: float = 1e-12
    dt_max: float = 1e-2
    rel_tol: float = 1e-3
    stabilization: str = "auto"
    stabilization_A: Optional[float] = None
    dealias: bool = True
    fixed_step: bool = False
    max_rejects: int = 50
    growth_limit: float = 1.5
    conserve_G: Optional[bool] = None
    linear_rtol: float = 1e-6
    linear_restart: int = 40
    linear_maxiter: int = 3
    track_dissipation: bool = False

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self):
        out = []
        if self.scheme not in SCHEMES:
            out.append(f"scheme must be one of {SCHEMES}")
        if not (self.dt_init > 0):
            out.append("dt_init must be > 0")
        if not (0 < self.dt_min <= self.dt_init <= self.dt_max):
            out.append("need 0 < dt_min <= dt_init <= dt_max")
        if not (self.rel_tol > 0):
            out.append("rel_tol must be > 0")
        if self.stabilization not in ("auto", "fixed"):
            out.append("stabilization must be 'auto' or 'fixed'")
        if self.stabilization == "fixed" and not (self.stabilization_A and self.stabilization_A > 0):
            out.append("fixed stabilization needs stabilization_A > 0")
        return out

    @property
    def conserve(self):
        if self.conserve_G is None:
            return self.scheme == "imex_stabilized"
        return self.conserve_G


# -------------------------------------------------------------------- helpers

def conserved_total(u, grid, p):
    return grid.integrate(G_value(u, p.m, p.theta))


def project_conserved(u, target, grid, p, tol=1e-15, maxit=30):
    """Shift u by a constant so that int G_theta(u) equals ``target``."""
    s = 0.0
    scale = max(abs(target), grid.volume * 1e-300)
    for _ in range(maxit):
        v = u + s
        f = conserved_total(v, grid, p) - target
        if abs(f) <= tol * scale:
            break
        df = grid.integrate(Kernel(grid, p).g(v))
        if df <= 0:
            break
        s -= f / df
    return u + s


def _fd_weighted_laplacian(grid, w):
    """Sparse matrix of -div(w grad .) on the periodic grid (arithmetic face averages)."""
    n, h = grid.n, grid.spacing
    idx = np.arange(grid.size).reshape(grid.shape)
    rows, cols, vals = [], [], []
    diag = np.zeros(grid.shape)
    for ax in range(grid.dim):
        wp = 0.5 * (w + np.roll(w, -1, ax)) / h ** 2
        wm = np.roll(wp, 1, ax)
        diag += wp + wm
        rows += [idx.ravel(), idx.ravel()]
        cols += [np.roll(idx, -1, ax).ravel(), np.roll(idx, 1, ax).ravel()]
        vals += [-wp.ravel(), -wm.ravel()]
    rows.append(idx.ravel())
    cols.append(idx.ravel())
    vals.append(diag.ravel())
    N = grid.size
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))


class _Preconditioner:
    """Approximate inverse of y -> g y + c Fe(K y) via y = K0^{-1}(g z),
    with z from (c L_g + diag(g^2 / S)) z = r."""

    def __init__(self, grid, g, c, S):
        self.grid = grid
        self.g = g
        self.sym = grid.k2 + S
        A = (c * _fd_weighted_laplacian(grid, g) + sp.diags((g * g / S).ravel())).tocsc()
        if grid.size <= 20000:
            lu = splu(A)
            self._solve = lu.solve
        else:
            import pyamg
            ml = pyamg.smoothed_aggregation_solver(A.tocsr(), symmetry="symmetric")
            M = ml.aspreconditioner(cycle="V")
            self._solve = M.matvec

    def __call__(self, r):
        z = self._solve(r).reshape(self.grid.shape)
        return self.grid.apply_symbol(self.g * z, 1.0 / self.sym).ravel()


# ------------------------------------------------------------------- stepper

# Cash-Karp tableau
_CK_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [3 / 10, -9 / 10, 6 / 5],
    [-11 / 54, 5 / 2, -70 / 27, 35 / 27],
    [1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096],
]
_CK_B5 = np.array([37 / 378, 0, 250 / 621, 125 / 594, 0, 512 / 1771])
_CK_B4 = np.array([2825 / 27648, 0, 18575 / 48384, 13525 / 55296, 277 / 14336, 1 / 4])
_RK4_A = [[], [0.5], [0.0, 0.5], [0.0, 0.0, 1.0]]
_RK4_B = np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6])


class Stepper:
    """Stateful integrator for one run; see :func:`step` and :func:`run`."""

    def __init__(self, grid, p, cfg):
        self.grid = grid
        self.p = p
        self.cfg = cfg
        self.kernel = Kernel(grid, p, dealias=cfg.dealias)
        self.dt = cfg.dt_init
        self._err_prev = None
        self._vel_prev = None
        self._dt_prev = None
        self.dissipated = 0.0
        self.last_linear_iterations = 0

    def reset_history(self):
        self._vel_prev = None
        self._dt_prev = None
        self._err_prev = None

    # ---------------------------------------------------------- explicit
    def _f(self, u):
        return self.kernel.rhs(u)

    def _rk_stages(self, u, dt, A):
        ks, ds = [], []
        for row in A:
            v = u
            for a, k in zip(row, ks):
                if a:
                    v = v + dt * a * k
            ks.append(self._f(v))
            if self.cfg.track_dissipation:
                ds.append(self.kernel.dissipation_pairing(v))
        return ks, ds

    def _explicit(self, u, dt):
        cfg = self.cfg
        if cfg.fixed_step:
            ks, ds = self._rk_stages(u, dt, _RK4_A)
            un = u + dt * sum(b * k for b, k in zip(_RK4_B, ks))
            dd = dt * float(np.dot(_RK4_B, ds)) if ds else 0.0
            return un, 0.0, dd
        ks, ds = self._rk_stages(u, dt, _CK_A)
        u4 = u + dt * sum(b * k for b, k in zip(_CK_B4, ks))
        u5 = u + dt * sum(b * k for b, k in zip(_CK_B5, ks))
        scale = cfg.rel_tol * max(1.0, float(np.max(np.abs(u))))
        err = float(np.max(np.abs(u5 - u4))) / scale
        dd = dt * float(np.dot(_CK_B4, ds)) if ds else 0.0
        return u4, err, dd

    # ---------------------------------------------------------- implicit
    def _linear_operator(self, u):
        k, p, cfg, G = self.kernel, self.p, self.cfg, self.grid
        g = k.g(u)
        r = k.glog(u)
        b = [k._prod(r * c) for c in k.grad(u)]
        if cfg.stabilization == "auto":
            qpp = p.c_q * p.potential.d2q(u)
            S = p.c_q * p.potential.d2q_max_well
            frac = p.c_f * p.climb.coefficient * G.kabs if p.climb_on else None

            def K(z):
                sym = G.k2 if frac is None else G.k2 + frac
                return G.apply_symbol(z, sym) + qpp * z
        else:
            S = cfg.stabilization_A
            sym = G.k2 + S
            if p.climb_on:
                sym = sym + p.c_f * p.climb.coefficient * G.kabs

            def K(z):
                return G.apply_symbol(z, sym)

        def Fe(phi):
            comps = [a - k._prod(phi * bb) for a, bb in zip(k.grad(phi), b)]
            return -k.div(comps)

        return g, K, Fe, max(S, 1.0)

    def _implicit(self, u, dt):
        G, p, cfg = self.grid, self.p, self.cfg
        g, K, Fe, S = self._linear_operator(u)
        c = dt * p.M0
        rhs = dt * self.kernel.flux_div(u)
        shape = G.shape

        def Aop(v):
            y = v.reshape(shape)
            return (g * y + c * Fe(K(y))).ravel()

        P = _Preconditioner(G, g, c, S)

        N = G.size
        its = [0]

        def cb(_):
            its[0] += 1

        y, _info = gmres(LinearOperator((N, N), matvec=Aop, dtype=float), rhs.ravel(),
                         M=LinearOperator((N, N), matvec=P, dtype=float),
                         rtol=cfg.linear_rtol, atol=0.0, restart=cfg.linear_restart,
                         maxiter=cfg.linear_maxiter, callback=cb, callback_type="pr_norm")
        self.last_linear_iterations = its[0]
        un = u + y.reshape(shape)
        # local error estimate from a linear predictor on the previous increment
        if self._vel_prev is None:
            err = 0.0
        else:
            pred = u + dt * self._vel_prev
            scale = cfg.rel_tol * max(1.0, float(np.max(np.abs(u))))
            err = float(np.max(np.abs(un - pred))) * dt / (dt + self._dt_prev) / scale
        return un, err, 0.0

    # ------------------------------------------------------------- driver
    def attempt(self, u, dt):
        if self.cfg.scheme == "explicit_rk4_adaptive":
            return self._explicit(u, dt)
        return self._implicit(u, dt)

    def advance(self, state, dt_cap=None):
        """Take one accepted step from ``state``; returns the new state."""
        cfg, p, G = self.cfg, self.p, self.grid
        u = state.u.values
        self.kernel.check(u)
        target = conserved_total(u, G, p) if cfg.conserve else None
        dt = self.dt if state.dt_next is None else state.dt_next
        dt = min(dt, cfg.dt_max)
        rejects = 0
        while True:
            step_dt = dt if dt_cap is None else min(dt, dt_cap)
            if step_dt < cfg.dt_min and (dt_cap is None or dt_cap >= cfg.dt_min):
                raise StepSizeUnderflow(f"dt={step_dt:.3e} below dt_min={cfg.dt_min:.1e}", state.t)
            try:
                # overflow in a trial step is expected and leads to a rejection
                with np.errstate(over="ignore", invalid="ignore"):
                    un, err, dd = self.attempt(u, step_dt)
                ok = bool(np.all(np.isfinite(un)))
            except (FloatingPointError, DegenerateStabilizer):
                if p.theta == 0:
                    raise
                ok, err = False, np.inf
            if cfg.fixed_step:
                if not ok:
                    raise StepSizeUnderflow("non-finite state with a fixed step", state.t)
                break
            if ok and err <= 1.0:
                break
            rejects += 1
            if rejects > cfg.max_rejects:
                raise StepSizeUnderflow(f"step rejected {rejects} times", state.t)
            shrink = 0.25 if not np.isfinite(err) else max(0.2, 0.9 * err ** (-0.5))
            dt = step_dt * min(shrink, 0.9)
        if target is not None:
            un = project_conserved(un, target, G, p)
        if cfg.scheme == "imex_stabilized":
            self._vel_prev = (un - u) / step_dt
            self._dt_prev = step_dt
        self.dissipated += dd
        # step-size proposal
        if cfg.fixed_step:
            nxt = cfg.dt_init
        else:
            if cfg.scheme == "explicit_rk4_adaptive":
                e = max(err, 1e-10)
                ep = self._err_prev if self._err_prev is not None else e
                fac = 0.9 * e ** (-0.7 / 5) * ep ** (0.4 / 5)
                self._err_prev = e
            else:
                fac = 0.9 * max(err, 1e-10) ** (-0.5) if err > 0 else cfg.growth_limit
            fac = min(cfg.growth_limit, max(0.2, fac))
            base = dt if (dt_cap is not None and step_dt < dt) else step_dt
            nxt = min(cfg.dt_max, base * fac)
        self.dt = nxt
        return SimState(state.t + step_dt, PeriodicField(G, un), p, state.step_count + 1, nxt)


def step(s, cfg, stepper=None):
    """Advance ``s`` by one accepted step."""
    st = stepper or Stepper(s.u.grid, s.params, cfg)
    return st.advance(s)


@dataclass
class Trajectory:
    final: SimState
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    dissipated: float = 0.0
    steps: int = 0


def run(u0, p, cfg, t_end, hooks: Sequence[Callable] = (), cadence=None, t0=0.0,
        step_count=0, dt_next=None, keep_snapshots=False, project_initial=False):
    """Integrate from ``t0`` to ``t_end``.

    Hooks are called with a read-only :class:`SimState` at ``t0``, at every
    multiple of ``cadence`` (steps are shortened to land on them) and at
    ``t_end``.  Without a cadence they run after every step.  The step
    controller's history is cleared at each cadence point so a run split at
    such a point and resumed from a snapshot reproduces the unsplit run.
    """
    if not isinstance(u0, PeriodicField):
        raise TypeError("u0 must be a PeriodicField")
    grid = u0.grid
    vals = u0.values.copy()
    if project_initial:
        vals = grid.ifft(grid.fft(vals))
    state = SimState(float(t0), PeriodicField(grid, vals), p, step_count, dt_next)
    traj = Trajectory(final=state)
    stepper = Stepper(grid, p, cfg)

    def emit(s):
        traj.times.append(s.t)
        if keep_snapshots:
            traj.snapshots.append(s.copy())
        for h in hooks:
            h(s.copy())

    emit(state)
    if t_end <= t0:
        return traj
    eps_t = 1e-12 * max(1.0, abs(t_end))
    next_mark = None
    if cadence:
        mark = np.floor((t0 + eps_t) / cadence) + 1
        next_mark = min(mark * cadence, t_end)
    while state.t < t_end - eps_t:
        cap = (next_mark if next_mark is not None else t_end) - state.t
        try:
            state = stepper.advance(state, dt_cap=cap)
        except StepSizeUnderflow as e:
            if e.t is None:
                e.t = state.t
            raise
        if next_mark is not None:
            if state.t >= next_mark - eps_t:
                state.t = next_mark
                stepper.reset_history()
                emit(state)
                mark += 1
                next_mark = min(mark * cadence, t_end)
        else:
            if state.t >= t_end - eps_t:
                state.t = t_end
            emit(state)
    if next_mark is None and traj.times[-1] != state.t:
        emit(state)
    traj.final = state
    traj.dissipated = stepper.dissipated
    traj.steps = state.step_count - step_count
    return traj


def with_scheme(cfg, scheme, **kw):
    return replace(cfg, scheme=scheme, **kw)
