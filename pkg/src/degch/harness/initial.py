"""Initial fields built from an :class:`InitialCondition`."""
from pathlib import Path

import numpy as np

from ..climb import loop_field
from ..interface.experiment import perturbed_circle_field
from ..spectral import PeriodicField
from .snapshot import MAGIC, load_snapshot


def tanh_circle(grid, center, R, width):
    X, Y = grid.coords()
    r = np.hypot(X - center[0], Y - center[1])
    return PeriodicField(grid, np.tanh((R - r) / width))


def from_file(grid, path):
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        vals = load_snapshot(path).values
    else:
        vals = np.load(path, allow_pickle=False)
    if vals.shape != grid.shape:
        raise ValueError(f"field in {path} has shape {vals.shape}, grid is {grid.shape}")
    return PeriodicField(grid, vals)


def build_initial(cfg):
    """The initial field of a :class:`RunConfig`."""
    ic, grid, p = cfg.initial_condition, cfg.grid, cfg.model
    w = ic.width if ic.width is not None else p.interface_width
    if ic.type == "constant":
        return PeriodicField.constant(grid, ic.value)
    if ic.type == "random":
        rng = np.random.default_rng(cfg.seed)
        v = ic.mean + ic.amplitude * rng.uniform(-1.0, 1.0, grid.shape)
        return PeriodicField(grid, np.clip(v, -1.0, 1.0))
    if ic.type == "file":
        return from_file(grid, ic.path)
    if grid.dim != 2:
        raise ValueError(f"initial condition {ic.type!r} needs a 2D grid")
    if ic.type == "tanh_circle":
        return tanh_circle(grid, ic.center, ic.radius, w)
    if ic.type == "mode_perturbed_circle":
        return perturbed_circle_field(grid, ic.radius, ic.k, ic.delta, w, ic.center)
    if ic.type == "tanh_loops":
        return loop_field(grid, ic.centers, ic.radii, p.epsilon, profile_width=w)
    raise ValueError(f"unknown initial condition {ic.type!r}")
