import numpy as np
import pytest

from degch.dynamics import StepperConfig
from degch.errors import StepSizeUnderflow
from degch.model import ModelParams, Potential
from degch.spectral import PeriodicField, PeriodicGrid
from degch.sweep import galerkin_refinement, l2_distance, theta_sweep

P = ModelParams(epsilon=0.3, theta=0.1, potential=Potential("scaled_quartic"))
FIXED = StepperConfig(dt_init=1e-3, dt_max=1e-3, fixed_step=True)


def circle(n=32, R=1.2):
    g = PeriodicGrid(2, n)
    X, Y = g.coords()
    return PeriodicField(g, np.tanh((R - np.hypot(X - np.pi, Y - np.pi)) / P.interface_width))


@pytest.mark.parametrize("thetas", [[], [0.1, 0.1], [0.1, 0.2], [0.1, 0.0], [0.2, -0.1]])
def test_sweep_validation(thetas):
    with pytest.raises(ValueError):
        theta_sweep(circle(), P, StepperConfig(), thetas, 0.01)


def test_single_theta_has_no_pairs():
    rep = theta_sweep(circle(), P, StepperConfig(), [0.1], 0.01)
    assert rep.pairwise_distances == [] and rep.monotonicity_flags == []
    assert rep.tail_nonincreasing and len(rep.energies) == 1


def test_sweep_report_contents():
    u0 = circle()
    rep = theta_sweep(u0, P, StepperConfig(), [0.2, 0.1, 0.05], 0.02)
    assert len(rep.pairwise_distances) == 2 and len(rep.monotonicity_flags) == 1
    assert rep.energy_bounded()
    assert max(rep.conserved_drift) <= 1e-10
    assert rep.pairwise_distances[0] == pytest.approx(l2_distance(rep.final_states[0], rep.final_states[1]))
    assert len(rep.rows()) == 3 and "tail non-increasing" in rep.summary()


def test_sweep_tags_errors_with_theta():
    cfg = StepperConfig(scheme="explicit_rk4_adaptive", dt_init=1e-3, dt_min=1e-4, dt_max=1e-3, max_rejects=2)
    with pytest.raises(StepSizeUnderflow) as ei:
        theta_sweep(circle(), P, cfg, [0.2, 0.1], 1.0)
    assert ei.value.theta == 0.2 and "theta=0.2" in str(ei.value)


def test_l2_distance():
    g = PeriodicGrid(2, 16)
    a = PeriodicField.constant(g, 1.0)
    b = PeriodicField.constant(g, 0.0)
    assert l2_distance(a, b) == pytest.approx(2 * np.pi)


def smooth_mode(X, Y):
    return 0.4 * np.cos(X) * np.sin(Y)


def test_refinement_converges_spectrally():
    rep = galerkin_refinement(smooth_mode, P, FIXED, [16, 32, 64], 0.05)
    e16, e32 = rep.pairwise_distances
    assert e32 / e16 <= 0.1
    assert rep.rate < 0 and rep.parameter == "N"


def test_refinement_from_fine_field():
    g = PeriodicGrid(2, 64)
    u0 = PeriodicField.from_function(g, smooth_mode)
    rep = galerkin_refinement(u0, P, FIXED, [16, 32, 64], 0.05)
    ref = galerkin_refinement(smooth_mode, P, FIXED, [16, 32, 64], 0.05)
    # a single-mode field is represented exactly on every grid
    np.testing.assert_allclose(rep.pairwise_distances, ref.pairwise_distances, rtol=1e-6)


def test_refinement_constant_is_exact():
    rep = galerkin_refinement(lambda X, Y: 0.2 + 0 * X, P, FIXED, [8, 16, 32], 0.01)
    assert rep.pairwise_distances == [0.0, 0.0]


@pytest.mark.parametrize("sizes", [[16, 16], [16, 48], [32], [32, 16]])
def test_refinement_rejects_non_dyadic(sizes):
    with pytest.raises(ValueError):
        galerkin_refinement(smooth_mode, P, FIXED, sizes, 0.01)


def test_refinement_needs_finest_grid_field():
    u0 = PeriodicField.from_function(PeriodicGrid(2, 32), smooth_mode)
    with pytest.raises(ValueError):
        galerkin_refinement(u0, P, FIXED, [16, 32, 64], 0.01)
