"""One-dimensional core profile and the sharp-interface constants alpha, lambda."""
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import simpson, solve_ivp

from .errors import PotentialNotDoubleWell, QuadratureNotConverged
from .model import Potential, g_value

# eighth-order central stencil for the first derivative
_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])


@dataclass
class ProfileSolution:
    rho: np.ndarray
    U0: np.ndarray
    dU0: np.ndarray
    L: float
    potential: Potential
    alpha: Optional[float] = None
    lambda_: Optional[float] = None
    quadrature_error_estimate: float = 0.0

    @property
    def residual(self):
        return ode_residual(self)


def _check_double_well(p):
    s = np.linspace(-1, 1, 2001)[1:-1]
    if np.any(p.q(s) <= 0):
        raise PotentialNotDoubleWell("q must be positive strictly between the wells")
    if abs(p.q(1.0)) > 1e-14 or abs(p.q(-1.0)) > 1e-14:
        raise PotentialNotDoubleWell("q(+-1) must vanish")


def solve_profile(p=None, L=15.0, n_samples=4097):
    """Decreasing heteroclinic U0 with U0(0) = 0 from U0' = -sqrt(2 q(U0))."""
    p = p or Potential()
    if L < 10:
        raise ValueError("L must be >= 10")
    if n_samples < 256:
        raise ValueError("n_samples must be >= 256")
    _check_double_well(p)
    if n_samples % 2 == 0:
        n_samples += 1
    rho = np.linspace(-L, L, n_samples)

    def f(_, y):
        return -np.sqrt(2.0 * np.maximum(p.q(y), 0.0))

    half = n_samples // 2
    kw = dict(method="DOP853", rtol=1e-13, atol=1e-16)
    right = solve_ivp(f, (0.0, L), [0.0], t_eval=rho[half:], **kw)
    left = solve_ivp(f, (0.0, -L), [0.0], t_eval=rho[:half + 1][::-1], **kw)
    U = np.concatenate([left.y[0][::-1][:-1], right.y[0]])
    dU = -np.sqrt(2.0 * np.maximum(p.q(U), 0.0))
    return ProfileSolution(rho=rho, U0=U, dU0=dU, L=float(L), potential=p)


def ode_residual(sol):
    """sup |-U'' + q'(U)| on interior samples.

    U'' is the eighth-order central difference of the sampled U'.
    """
    h = sol.rho[1] - sol.rho[0]
    d2 = np.convolve(sol.dU0, _D1[::-1], mode="valid") / h
    r = -d2 + sol.potential.dq(sol.U0[4:-4])
    return float(np.max(np.abs(r)))


def _integral(sol, f):
    """Simpson quadrature of samples f over [-L, L] plus an exponential-tail estimate."""
    val = simpson(f, x=sol.rho)
    tail = 0.0
    for end, nxt in ((f[-1], f[-2]), (f[0], f[1])):
        if end != 0 and nxt != 0 and abs(end) < abs(nxt):
            rate = np.log(abs(nxt / end)) / (sol.rho[1] - sol.rho[0])
            tail += end / rate
    return val + tail, abs(tail)


def _integrals(sol, m):
    g = g_value(sol.U0, m, 0.0)
    num, e1 = _integral(sol, sol.dU0 ** 2)
    den, e2 = _integral(sol, g * sol.dU0)
    gi, e3 = _integral(sol, g)
    return num, den, gi, max(e1, e2, e3)


def _checked(sol, m, which, L_check=20.0, tol=1e-8):
    num, den, gi, err = _integrals(sol, m)
    if L_check and L_check > sol.L:
        big = solve_profile(sol.potential, L=L_check, n_samples=len(sol.rho))
        n2, d2, g2, _ = _integrals(big, m)
        a, b = which(num, den, gi), which(n2, d2, g2)
        if abs(a - b) > tol * abs(b):
            raise QuadratureNotConverged(f"truncation change {abs(a - b):.2e} exceeds tolerance")
        err = max(err, abs(a - b))
    sol.quadrature_error_estimate = max(sol.quadrature_error_estimate, err)
    return which(num, den, gi)


def compute_alpha(sol, m=2.0, L_check=20.0):
    """alpha = int (U0')^2 / int g(U0) U0' (negative)."""
    a = _checked(sol, m, lambda n, d, g: n / d, L_check)
    sol.alpha = a
    return a


def compute_lambda(sol, m=2.0, M0=1.0, L_check=20.0):
    """lambda = M0 int g(U0) / int g(U0) U0' (negative)."""
    lam = M0 * _checked(sol, m, lambda n, d, g: g / d, L_check)
    sol.lambda_ = lam
    return lam


def surface_diffusion_coefficient(sol, m=2.0, M0=1.0):
    """B = lambda * alpha > 0 in v_n = B d_ss kappa."""
    a = compute_alpha(sol, m)
    lam = compute_lambda(sol, m, M0)
    return lam * a


def constants(potential="quartic", m=2.0, M0=1.0, L=15.0, n_samples=4097):
    """Convenience: (alpha, lambda, B) for a potential kind or instance."""
    p = Potential(potential) if isinstance(potential, str) else potential
    sol = solve_profile(p, L=L, n_samples=n_samples)
    a = compute_alpha(sol, m)
    lam = compute_lambda(sol, m, M0)
    return a, lam, a * lam


def profile_table(sol):
    return np.column_stack([sol.rho, sol.U0, sol.dU0])


def with_constants(sol, m=2.0, M0=1.0):
    out = replace(sol)
    compute_alpha(out, m)
    compute_lambda(out, m, M0)
    return out
