import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degch.climb import ClimbParams
from degch.diagnostics import (CSV_COLUMNS, conserved_G, dissipation, energy_E, energy_F,
                               energy_identity_residual, fractional_energy, record,
                               trapezoid_dissipation)
from degch.dynamics import StepperConfig, run
from degch.errors import ClimbDisabled
from degch.model import Kernel, ModelParams
from degch.spectral import PeriodicField, PeriodicGrid

from conftest import smooth_random

UNSCALED = ModelParams(epsilon=1.0, theta=0.05, scaled_form=False)


def test_energy_of_zero_field(grid2):
    assert energy_E(PeriodicField.constant(grid2, 0.0), UNSCALED) == pytest.approx(4 * np.pi ** 2, rel=1e-14)


def test_energy_of_sine_1d():
    g = PeriodicGrid(1, 64)
    u = PeriodicField(g, np.sin(g.axis()))
    assert energy_E(u, UNSCALED) == pytest.approx(np.pi / 2 + 3 * np.pi / 4, rel=1e-13)


def test_energy_scaled_form_weights_bulk_term():
    g = PeriodicGrid(1, 64)
    u = PeriodicField(g, np.sin(g.axis()))
    p = ModelParams(epsilon=0.5, theta=0.05, scaled_form=True)
    expect = np.pi / 2 + 4 * 3 * np.pi / 4
    assert energy_E(u, p) == pytest.approx(expect, rel=1e-13)


def test_conserved_G_closed_form(grid2):
    p = ModelParams(theta=0.0)
    G = conserved_G(PeriodicField.constant(grid2, 0.5), p)
    assert G == pytest.approx(4 * np.pi ** 2 * (0.5 - 2 * 0.125 / 3 + 0.03125 / 5), rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), theta=st.floats(0.0, 0.5))
def test_conserved_G_is_odd(seed, theta):
    g = PeriodicGrid(2, 16)
    u = smooth_random(g, seed, amp=1.2)
    p = ModelParams(theta=theta)
    a = conserved_G(u, p)
    b = conserved_G(PeriodicField(g, -u.values), p)
    assert a == pytest.approx(-b, abs=1e-12)


def test_dissipation_constant_is_zero(grid2):
    for form in ("expanded", "quotient", "pairing"):
        assert dissipation(PeriodicField.constant(grid2, 0.3), UNSCALED, form) == pytest.approx(0, abs=1e-20)


def test_dissipation_unknown_form(grid2):
    with pytest.raises(ValueError):
        dissipation(PeriodicField.constant(grid2, 0.3), UNSCALED, "other")


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_dissipation_nonnegative(seed):
    g = PeriodicGrid(2, 32)
    u = smooth_random(g, seed, amp=1.0)
    p = ModelParams(epsilon=0.4, theta=0.1)
    assert dissipation(u, p, "expanded") >= 0
    assert dissipation(u, p, "quotient") >= 0


def test_dissipation_forms_agree():
    g = PeriodicGrid(2, 128)
    u = smooth_random(g, 3, kmax=3, amp=0.6)
    p = ModelParams(epsilon=0.5, theta=0.1)
    a = dissipation(u, p, "expanded")
    b = dissipation(u, p, "quotient")
    c = dissipation(u, p, "pairing")
    assert abs(a - b) <= 1e-6 * abs(b)
    assert abs(a - c) <= 1e-6 * abs(b)


def test_pairing_equals_minus_mu_dot_ut(grid2):
    u = smooth_random(grid2, 8, amp=0.7)
    p = ModelParams(epsilon=0.5, theta=0.1)
    k = Kernel(grid2, p)
    mu = k.mu(u.values)
    ut = k.rhs(u.values)
    assert dissipation(u, p, "pairing") == pytest.approx(-grid2.integrate(mu * ut), rel=1e-10)


def test_dissipation_small_and_decreasing_near_equilibrium():
    g = PeriodicGrid(1, 128)
    x = g.axis()
    p = ModelParams(epsilon=0.3, theta=0.05)
    w = p.interface_width
    u0 = PeriodicField(g, np.tanh((x - 1.6) / w) * np.tanh((4.7 - x) / w))
    D = []
    # collocation steady state; the 2/3-rule one has D at projection-error level
    run(u0, p, StepperConfig(dt_init=1e-5, dealias=False), 0.2, cadence=0.05,
        hooks=[lambda s: D.append(dissipation(s.u, p))])
    assert all(d >= 0 for d in D)
    assert all(b <= a + 1e-9 for a, b in zip(D, D[1:]))
    assert D[-1] < 1e-6


def test_fractional_energy_of_cosine():
    g = PeriodicGrid(1, 32)
    assert fractional_energy(PeriodicField(g, np.cos(g.axis()))) == pytest.approx(np.pi, rel=1e-13)


def test_energy_F(grid2):
    p = UNSCALED.with_(climb=ClimbParams(coefficient=1.0))
    assert energy_F(PeriodicField.constant(grid2, 1.0), p) == pytest.approx(0.0, abs=1e-12)
    u = smooth_random(grid2, 2)
    assert energy_F(u, p) >= energy_E(u, p)
    with pytest.raises(ClimbDisabled):
        energy_F(u, UNSCALED)


def test_energy_F_gradient_is_climb_potential(grid2):
    p = ModelParams(epsilon=0.5, theta=0.1, climb=ClimbParams(coefficient=0.7, f_app=0.2))
    u = smooth_random(grid2, 5, amp=0.6)
    v = smooth_random(grid2, 6, amp=0.3)
    mu = Kernel(grid2, p).mu(u.values)
    h = 1e-5
    dF = (energy_F(PeriodicField(grid2, u.values + h * v.values), p)
          - energy_F(PeriodicField(grid2, u.values - h * v.values), p)) / (2 * h)
    assert dF == pytest.approx(grid2.integrate(mu * v.values), rel=1e-7)


def test_record_fields(grid2):
    p = ModelParams(epsilon=0.5, theta=0.1)
    r = record(0.5, smooth_random(grid2, 1), p)
    assert len(r.row()) == len(CSV_COLUMNS) and r.energy_F is None
    assert r.min_g >= p.theta ** p.m and r.dissipation_D >= 0


def test_energy_identity_helpers():
    t = np.linspace(0, 1, 11)
    assert trapezoid_dissipation(t, 2 * np.ones_like(t)) == pytest.approx(2.0)
    assert energy_identity_residual(3.0, 1.0, 2.0) == 0.0
