import numpy as np
import pytest
from scipy.integrate import quad

from degch.errors import PotentialNotDoubleWell
from degch.model import Potential
from degch.profile import (compute_alpha, compute_lambda, constants, ode_residual, profile_table,
                           solve_profile, surface_diffusion_coefficient)

R2 = np.sqrt(2.0)


def brute_force_constants(scale, m=2.0, M0=1.0):
    """alpha, lambda by adaptive quadrature over the closed-form profile -tanh(c rho)."""
    c = np.sqrt(2 * scale)
    U = lambda r: -np.tanh(c * r)
    dU = lambda r: -c / np.cosh(c * r) ** 2
    g = lambda r: (1 - U(r) ** 2) ** m
    lim = 60 / c
    num = quad(lambda r: dU(r) ** 2, -lim, lim, limit=400, epsabs=1e-14)[0]
    den = quad(lambda r: g(r) * dU(r), -lim, lim, limit=400, epsabs=1e-14)[0]
    gi = quad(g, -lim, lim, limit=400, epsabs=1e-14)[0]
    return num / den, M0 * gi / den


@pytest.mark.parametrize("kind,c", [("scaled_quartic", 1 / R2), ("quartic", R2)])
def test_profile_matches_tanh(kind, c):
    sol = solve_profile(Potential(kind))
    assert np.max(np.abs(sol.U0 + np.tanh(c * sol.rho))) <= 1e-8
    assert sol.residual <= 1e-8
    assert sol.U0[len(sol.rho) // 2] == 0.0
    core = np.abs(sol.U0) < 1 - 1e-6
    assert np.all(np.diff(sol.U0[core]) < 0)


def test_residual_improves_with_sampling():
    a = ode_residual(solve_profile(Potential("quartic"), n_samples=513))
    b = ode_residual(solve_profile(Potential("quartic"), n_samples=1025))
    assert b < a


def test_brute_force_oracle_matches_closed_forms():
    a, lam = brute_force_constants(1.0)
    assert a == pytest.approx(-5 * R2 / 4, rel=1e-10)
    assert lam == pytest.approx(-5 * R2 / 8, rel=1e-10)
    a, lam = brute_force_constants(0.25)
    assert a == pytest.approx(-5 * R2 / 8, rel=1e-10)
    assert lam == pytest.approx(-5 * R2 / 4, rel=1e-10)


@pytest.mark.parametrize("kind,scale", [("quartic", 1.0), ("scaled_quartic", 0.25)])
def test_constants_match_oracle(kind, scale):
    a_ref, lam_ref = brute_force_constants(scale)
    sol = solve_profile(Potential(kind))
    assert compute_alpha(sol) == pytest.approx(a_ref, rel=1e-6)
    assert compute_lambda(sol) == pytest.approx(lam_ref, rel=1e-6)
    assert sol.alpha < 0 and sol.lambda_ < 0
    assert surface_diffusion_coefficient(sol) == pytest.approx(25 / 16, rel=1e-6)


def test_lambda_linear_in_mobility():
    sol = solve_profile()
    assert compute_lambda(sol, M0=3.0) == pytest.approx(3 * compute_lambda(sol, M0=1.0), rel=1e-12)


def test_constants_stable_under_sample_doubling():
    a1, l1, _ = constants("quartic", n_samples=2049)
    a2, l2, _ = constants("quartic", n_samples=4097)
    assert a1 == pytest.approx(a2, rel=1e-8) and l1 == pytest.approx(l2, rel=1e-8)


def test_other_exponent_matches_oracle():
    a_ref, lam_ref = brute_force_constants(1.0, m=3.0)
    a, lam, _ = constants("quartic", m=3.0)
    assert a == pytest.approx(a_ref, rel=1e-6) and lam == pytest.approx(lam_ref, rel=1e-6)


def test_not_double_well():
    class Shifted:
        kind = "shifted"

        def q(self, u):
            return (1 - np.square(u)) ** 2 - 0.1

    with pytest.raises(PotentialNotDoubleWell):
        solve_profile(Shifted())


def test_argument_checks():
    with pytest.raises(ValueError):
        solve_profile(L=5)
    with pytest.raises(ValueError):
        solve_profile(n_samples=10)


def test_profile_table_columns():
    sol = solve_profile(n_samples=513)
    assert profile_table(sol).shape == (513, 3)
