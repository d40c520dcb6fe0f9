"""Pointwise model ingredients: potential, stabilizer, mobility, chemical
potential and the right-hand side of g(u) u_t = div(M(u) grad(mu / g(u))).
"""
from dataclasses import dataclass, field, replace
from math import comb
from typing import Optional

import numpy as np
from scipy.special import hyp2f1

from .errors import DegenerateStabilizer
from .spectral import PeriodicField

POTENTIAL_KINDS = ("quartic", "scaled_quartic")


@dataclass(frozen=True)
class Potential:
    """Double-well potential.

    ``quartic`` is q(u) = (1 - u^2)^2 and ``scaled_quartic`` is a quarter of
    it.  Both satisfy the polynomial growth hypotheses with exponent r = 3;
    the growth constants themselves play no computational role.
    """

    kind: str = "quartic"
    r: float = 3.0

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential {self.kind!r}; expected one of {POTENTIAL_KINDS}")

    @property
    def scale(self):
        return 1.0 if self.kind == "quartic" else 0.25

    def q(self, u):
        w = 1.0 - np.square(u)
        return self.scale * w * w

    def dq(self, u):
        return -4.0 * self.scale * u * (1.0 - np.square(u))

    def d2q(self, u):
        return 4.0 * self.scale * (3.0 * np.square(u) - 1.0)

    @property
    def d2q_max_well(self):
        """q'' at the wells, the largest value of q'' on [-1, 1]."""
        return 8.0 * self.scale


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the evolution equation.

    ``scaled_form`` selects mu = -Lap u + q'(u)/eps^2 (+ f_cl/eps); the
    unscaled form drops the eps factors.  ``theta = 0`` is the degenerate
    model and is guarded by ``floor``.
    """

    epsilon: float = 0.1
    m: float = 2.0
    M0: float = 1.0
    theta: float = 0.05
    potential: Potential = field(default_factory=Potential)
    scaled_form: bool = True
    climb: Optional["ClimbParams"] = None  # noqa: F821
    floor: float = 1e-12

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self):
        out = []
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            out.append("epsilon must be > 0")
        if not np.isfinite(self.m) or self.m < 2:
            out.append("m must be >= 2")
        if not np.isfinite(self.M0) or self.M0 <= 0:
            out.append("M0 must be > 0")
        if not np.isfinite(self.theta) or self.theta < 0:
            out.append("theta must be >= 0")
        if self.floor <= 0:
            out.append("floor must be > 0")
        return out

    @property
    def c_q(self):
        return 1.0 / self.epsilon ** 2 if self.scaled_form else 1.0

    @property
    def c_f(self):
        return 1.0 / self.epsilon if self.scaled_form else 1.0

    @property
    def interface_width(self):
        """w such that tanh(d / w) is the planar equilibrium profile."""
        base = self.epsilon if self.scaled_form else 1.0
        return base / np.sqrt(2.0 * self.potential.scale)

    @property
    def climb_on(self):
        return self.climb is not None and getattr(self.climb, "enabled", True)

    def with_(self, **kw):
        return replace(self, **kw)


# ---------------------------------------------------------------- potential

def q_value(u, p):
    return p.q(u)


def q_prime(u, p):
    return p.dq(u)


def q_second(u, p):
    return p.d2q(u)


# --------------------------------------------------------------- stabilizer

def g_value(u, m, theta):
    """g_theta(u): |1-u^2|^m outside the clamp |1-u^2| <= theta, theta^m inside."""
    a = np.abs(1.0 - np.square(u))
    if theta > 0:
        return np.where(a > theta, a ** m, theta ** m)
    return a ** m


def g_prime(u, m, theta):
    """Derivative of g_theta, taken as 0 on the clamp set (boundary included)."""
    w = 1.0 - np.square(u)
    a = np.abs(w)
    d = -2.0 * m * u * np.sign(w) * a ** (m - 1.0)
    if theta > 0:
        return np.where(a > theta, d, 0.0)
    return d


def g_log_derivative(u, m, theta):
    """g'/g, written without the division so it stays finite off the clamp."""
    w = 1.0 - np.square(u)
    a = np.abs(w)
    if theta > 0:
        safe = np.where(a > theta, w, 1.0)
        return np.where(a > theta, -2.0 * m * u / safe, 0.0)
    return -2.0 * m * u / w


def mobility(u, p):
    return p.M0 * g_value(u, p.m, p.theta)


def _h_poly(m):
    """Coefficients of the antiderivative of (1 - s^2)^m for integer m."""
    m = int(m)
    c = np.zeros(2 * m + 2)
    for j in range(m + 1):
        c[2 * j + 1] = comb(m, j) * (-1) ** j / (2 * j + 1)
    return np.polynomial.Polynomial(c)


def _degenerate_antiderivative(a, m):
    """H(a) = int_0^a |1 - s^2|^m ds for a >= 0 (vectorized)."""
    a = np.asarray(a, dtype=float)
    if float(m).is_integer():
        P = _h_poly(m)
        sgn = (-1) ** int(m)
        return np.where(a <= 1.0, P(np.minimum(a, 1.0)), P(1.0) + sgn * (P(a) - P(1.0)))
    inner = np.minimum(a, 1.0)
    h_in = inner * hyp2f1(-m, 0.5, 1.5, inner * inner)
    big = np.maximum(a, 1.0)
    v = 1.0 - 1.0 / (big * big)
    h_out = 0.5 * v ** (m + 1.0) / (m + 1.0) * hyp2f1(m + 1.0, m + 1.5, m + 2.0, v)
    return h_in + np.where(a > 1.0, h_out, 0.0)


def G_value(u, m, theta):
    """G_theta(u) = int_0^u g_theta(a) da, odd in u."""
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    H = lambda x: _degenerate_antiderivative(x, m)  # noqa: E731
    tm = theta ** m
    a2 = np.sqrt(1.0 + theta)
    if theta <= 0:
        val = H(a)
    elif theta < 1:
        a1 = np.sqrt(1.0 - theta)
        H1, H2 = H(a1), H(a2)
        val = np.where(a <= a1, H(np.minimum(a, a1)),
                       np.where(a <= a2, H1 + tm * (a - a1),
                                H1 + tm * (a2 - a1) + H(np.maximum(a, a2)) - H2))
    else:
        H2 = H(a2)
        val = np.where(a <= a2, tm * a, tm * a2 + H(np.maximum(a, a2)) - H2)
    return np.sign(u) * val


# --------------------------------------------------------- field operators

class Kernel:
    """Array-level evaluation of mu and the evolution right-hand side on a grid.

    Used by the time steppers; the public functions below wrap it for
    :class:`PeriodicField` inputs.
    """

    def __init__(self, grid, p, dealias=False, stabilizer=None):
        self.grid = grid
        self.p = p
        self.dealias = dealias
        self.unit = stabilizer == "unit"
        if stabilizer not in (None, "unit"):
            raise ValueError("stabilizer override must be None or 'unit'")

    # pointwise pieces
    def g(self, u):
        if self.unit:
            return np.ones_like(u)
        return g_value(u, self.p.m, self.p.theta)

    def glog(self, u):
        if self.unit:
            return np.zeros_like(u)
        return g_log_derivative(u, self.p.m, self.p.theta)

    def check(self, u):
        p = self.p
        if not self.unit and p.theta == 0:
            gap = np.min(np.abs(1.0 - np.square(u)))
            if gap < p.floor:
                raise DegenerateStabilizer(
                    f"min|1-u^2| = {gap:.3e} below floor {p.floor:.1e} with theta = 0")

    def _prod(self, a):
        return self.grid.dealias(a) if self.dealias else a

    # spectral pieces
    def grad(self, f):
        G = self.grid
        fh = G.fft(f)
        return [G.ifft(1j * k * fh) for k in G.kderiv]

    def div(self, comps):
        G = self.grid
        acc = 0
        for c, k in zip(comps, G.kderiv):
            acc = acc + 1j * k * G.fft(c)
        return G.ifft(acc)

    def lap(self, f):
        return self.grid.apply_symbol(f, -self.grid.k2)

    def climb_term(self, u):
        cp = self.p.climb
        f = cp.coefficient * self.grid.apply_symbol(u, self.grid.kabs)
        return f + cp.applied_array(self.grid)

    def mu(self, u):
        p = self.p
        out = -self.lap(u) + p.c_q * self._prod(p.potential.dq(u))
        if p.climb_on:
            out = out + p.c_f * self.climb_term(u)
        return out

    def flux_div(self, u, mu=None):
        """M0 div(grad mu - mu (g'/g) grad u), which equals g(u) u_t."""
        if mu is None:
            mu = self.mu(u)
        r = self.glog(u)
        gu = self.grad(u)
        gm = self.grad(mu)
        comps = [a - self._prod(mu * self._prod(r * b)) for a, b in zip(gm, gu)]
        return self.p.M0 * self.div(comps)

    def flux_div_quotient(self, u, mu=None):
        """div(M grad(mu/g)), the undivided quotient form."""
        if mu is None:
            mu = self.mu(u)
        g = self.g(u)
        w = self._prod(mu / g)
        comps = [self._prod(self.p.M0 * g * c) for c in self.grad(w)]
        return self.div(comps)

    def rhs(self, u, form="expanded"):
        self.check(u)
        if form == "expanded":
            return self.flux_div(u) / self.g(u)
        if form == "quotient":
            return self.flux_div_quotient(u) / self.g(u)
        raise ValueError("form must be 'expanded' or 'quotient'")

    def dissipation(self, u, mu=None):
        """int M |grad(mu/g)|^2, evaluated as int (M0/g) |grad mu - mu (g'/g) grad u|^2."""
        self.check(u)
        if mu is None:
            mu = self.mu(u)
        r = self.glog(u)
        s = 0.0
        for a, b in zip(self.grad(mu), self.grad(u)):
            s = s + np.square(a - mu * r * b)
        return self.grid.integrate(self.p.M0 * s / self.g(u))

    def dissipation_pairing(self, u, mu=None):
        """int grad(mu/g) . M0 (grad mu - mu (g'/g) grad u), all derivatives spectral.

        By summation by parts this equals -int mu u_t on the grid, so it is the
        dissipation for which the semi-discrete energy identity is exact.
        """
        self.check(u)
        if mu is None:
            mu = self.mu(u)
        r = self.glog(u)
        w = self._prod(mu / self.g(u))
        s = 0.0
        for a, b, c in zip(self.grad(mu), self.grad(u), self.grad(w)):
            s = s + c * (a - self._prod(mu * self._prod(r * b)))
        return self.grid.integrate(self.p.M0 * s)

    def dissipation_quotient(self, u, mu=None):
        self.check(u)
        if mu is None:
            mu = self.mu(u)
        g = self.g(u)
        s = sum(np.square(c) for c in self.grad(mu / g))
        return self.grid.integrate(self.p.M0 * g * s)


def chemical_potential(u, p, dealias=False):
    """mu = -Lap u + c_q q'(u) (+ c_f f_cl when climb is enabled)."""
    k = Kernel(u.grid, p, dealias=dealias)
    return PeriodicField(u.grid, k.mu(u.values))


def evolution_rhs(u, p, form="expanded", dealias=False, stabilizer=None):
    """u_t from g(u) u_t = div(M(u) grad(mu/g(u))).

    ``form='expanded'`` evaluates M0 [Lap mu - div(mu (g'/g) grad u)] / g and
    ``form='quotient'`` evaluates div(M grad(mu/g)) / g.  ``stabilizer='unit'``
    replaces g by 1 (test hook reducing the model to classical CH).
    """
    k = Kernel(u.grid, p, dealias=dealias, stabilizer=stabilizer)
    return PeriodicField(u.grid, k.rhs(u.values, form=form))
