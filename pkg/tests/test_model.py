import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from degch.errors import DegenerateStabilizer
from degch.model import (G_value, Kernel, ModelParams, Potential, chemical_potential, evolution_rhs,
                         g_prime, g_value, mobility, q_prime, q_second, q_value)
from degch.spectral import PeriodicField, PeriodicGrid, divergence, gradient, laplacian

from conftest import smooth_random

QUARTIC = Potential("quartic")
SCALED = Potential("scaled_quartic")


def test_quartic_values():
    assert q_value(1.0, QUARTIC) == 0.0 and q_prime(1.0, QUARTIC) == 0.0
    assert q_value(0.0, QUARTIC) == 1.0
    assert q_prime(0.0, QUARTIC) == 0.0
    assert q_second(0.0, QUARTIC) == -4.0
    assert q_value(0.0, SCALED) == 0.25


def test_q_derivatives_against_finite_differences():
    u = np.linspace(-1.3, 1.3, 11)
    errs = []
    for h in (1e-2, 5e-3):
        fd = (q_value(u + h, QUARTIC) - q_value(u - h, QUARTIC)) / (2 * h)
        errs.append(np.max(np.abs(fd - q_prime(u, QUARTIC))))
        fd2 = (q_prime(u + h, QUARTIC) - q_prime(u - h, QUARTIC)) / (2 * h)
        assert np.max(np.abs(fd2 - q_second(u, QUARTIC))) < 10 * h * h
    assert np.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)


def test_double_well_structure():
    s = np.linspace(-0.999, 0.999, 501)
    for pot in (QUARTIC, SCALED):
        assert np.all(pot.q(s) > 0)
        assert pot.q(-1.0) == 0 and pot.dq(-1.0) == 0


def test_unknown_potential():
    with pytest.raises(ValueError):
        Potential("cubic")


def test_g_examples():
    assert g_value(0.0, 3.0, 0.5) == 1.0
    assert g_value(1.0, 2.0, 0.01) == pytest.approx(1e-4)
    assert g_value(0.5, 2.0, 0.0) == pytest.approx(0.5625)


def test_mobility_examples():
    assert mobility(0.0, ModelParams(M0=1.0, theta=0.0)) == 1.0
    assert mobility(1.0, ModelParams(M0=2.0, m=2, theta=0.1)) == pytest.approx(0.02)
    assert mobility(3.0, ModelParams(M0=1.0, m=2, theta=0.0)) == pytest.approx(64.0)


def test_params_validation():
    with pytest.raises(ValueError, match="m must be"):
        ModelParams(m=1.5)
    with pytest.raises(ValueError, match="epsilon"):
        ModelParams(epsilon=-1)
    p = ModelParams(epsilon=0.2)
    assert p.c_q == pytest.approx(25.0) and p.c_f == pytest.approx(5.0)
    q = ModelParams(epsilon=0.2, scaled_form=False)
    assert q.c_q == 1.0 and q.c_f == 1.0


@settings(max_examples=100, deadline=None)
@given(u=st.floats(-3, 3), m=st.floats(2, 6), theta=st.floats(0, 0.9))
def test_g_even_and_bounded_below(u, m, theta):
    assert g_value(u, m, theta) == g_value(-u, m, theta)
    assert g_value(u, m, theta) >= theta ** m * (1 - 1e-15)


@settings(max_examples=60, deadline=None)
@given(m=st.floats(2, 5), theta=st.floats(0.01, 0.9))
def test_g_continuous_at_clamp_edges(m, theta):
    for edge in (np.sqrt(1 - theta), np.sqrt(1 + theta)):
        lo, hi = g_value(edge - 1e-9, m, theta), g_value(edge + 1e-9, m, theta)
        assert abs(lo - hi) < 1e-6


def test_g_prime_zero_on_clamp_and_classical_outside():
    m, th = 2.0, 0.1
    assert g_prime(1.0, m, th) == 0.0
    u = 0.5
    assert g_prime(u, m, th) == pytest.approx(-2 * m * u * (1 - u * u) ** (m - 1))
    u = 1.5
    assert g_prime(u, m, th) == pytest.approx(-2 * m * u * -1 * abs(1 - u * u) ** (m - 1))


@settings(max_examples=40, deadline=None)
@given(u=st.floats(-1.6, 1.6), m=st.sampled_from([2.0, 2.5, 3.0, 4.0]), theta=st.floats(0.0, 0.5))
def test_G_matches_quadrature(u, m, theta):
    pts = [x for x in (-np.sqrt(1 + theta), -np.sqrt(max(1 - theta, 0)), -1, 1,
                       np.sqrt(max(1 - theta, 0)), np.sqrt(1 + theta)) if min(0, u) < x < max(0, u)]
    ref = quad(lambda a: g_value(a, m, theta), 0, u, points=pts or None, epsabs=1e-13, epsrel=1e-12)[0]
    assert G_value(u, m, theta) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_G_closed_form_example():
    assert G_value(0.5, 2, 0.0) == pytest.approx(0.5 - 2 * 0.125 / 3 + 0.03125 / 5, rel=1e-14)


def test_chemical_potential_examples(grid2):
    p = ModelParams(epsilon=1.0, theta=0.05)
    assert np.max(np.abs(chemical_potential(PeriodicField.constant(grid2, 0.0), p).values)) == 0
    assert np.max(np.abs(chemical_potential(PeriodicField.constant(grid2, 1.0), p).values)) < 1e-14
    p = ModelParams(epsilon=0.3, theta=0.05)
    X, _ = grid2.coords()
    u = PeriodicField(grid2, 0.1 * np.cos(X))
    expect = 0.1 * np.cos(X) + QUARTIC.dq(0.1 * np.cos(X)) / 0.09
    np.testing.assert_allclose(chemical_potential(u, p).values, expect, atol=1e-12)


def test_rhs_trivial_cases(grid2):
    p = ModelParams(theta=0.05)
    for c in (0.0, 0.3, -0.7, 1.4):
        r = evolution_rhs(PeriodicField.constant(grid2, c), p)
        assert np.max(np.abs(r.values)) < 1e-10


def test_rhs_forms_agree_at_128():
    g = PeriodicGrid(2, 128)
    u = smooth_random(g, 11, kmax=3, amp=0.6)
    p = ModelParams(epsilon=0.5, theta=0.1)
    a = evolution_rhs(u, p, form="expanded").values
    b = evolution_rhs(u, p, form="quotient").values
    assert np.linalg.norm(a - b) <= 1e-6 * np.linalg.norm(b)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_g_weighted_rhs_has_zero_mean(seed):
    g = PeriodicGrid(2, 32)
    u = smooth_random(g, seed, kmax=3, amp=0.8)
    p = ModelParams(epsilon=0.4, theta=0.1)
    k = Kernel(g, p)
    r = k.rhs(u.values)
    total = g.integrate(k.g(u.values) * r)
    scale = g.integrate(np.abs(k.g(u.values) * r)) + 1e-300
    assert abs(total) <= 1e-10 * scale


def test_unit_stabilizer_reduces_to_classical_ch():
    g = PeriodicGrid(2, 32)
    u = smooth_random(g, 4, kmax=3, amp=0.7)
    p = ModelParams(epsilon=0.5, theta=0.05, M0=1.7)
    got = evolution_rhs(u, p, stabilizer="unit").values
    # independent: M0 Lap(-Lap u + q'(u)/eps^2)
    mu = PeriodicField(g, -laplacian(u).values + QUARTIC.dq(u.values) / 0.25)
    ref = 1.7 * divergence(gradient(mu)).values
    np.testing.assert_allclose(got, ref, atol=1e-9 * np.max(np.abs(ref)))


def test_degenerate_floor_guard(grid2):
    p = ModelParams(theta=0.0)
    with pytest.raises(DegenerateStabilizer):
        evolution_rhs(PeriodicField.constant(grid2, 1.0), p)
    r = evolution_rhs(PeriodicField.constant(grid2, 0.5), p)
    assert np.all(np.isfinite(r.values))
