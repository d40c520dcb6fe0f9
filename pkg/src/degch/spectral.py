"""Fourier pseudospectral operators on the periodic box [0, 2*pi]^dim.

Fields are stored in physical space; coefficients use the real-to-complex
layout of ``numpy.fft.rfftn`` and never leave this module's helpers.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, NonFiniteField

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid with ``n`` points per axis on [0, 2*pi)^dim."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.n < 2 or self.n % 2:
            raise ValueError("points per axis must be a positive even integer")

    @property
    def spacing(self):
        return TWO_PI / self.n

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def size(self):
        return self.n ** self.dim

    @property
    def cell_volume(self):
        return self.spacing ** self.dim

    @property
    def volume(self):
        return TWO_PI ** self.dim

    def axis(self):
        return np.arange(self.n) * self.spacing

    def coords(self):
        """Coordinate arrays (``indexing='ij'``), one per axis."""
        x = self.axis()
        if self.dim == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    # wavenumber tables in rfftn layout
    @cached_property
    def _k(self):
        n = self.n
        full = np.fft.fftfreq(n, 1.0 / n)
        half = np.fft.rfftfreq(n, 1.0 / n)
        if self.dim == 1:
            return (half,)
        kx, ky = np.meshgrid(full, half, indexing="ij")
        return (kx, ky)

    @cached_property
    def k2(self):
        return sum(k * k for k in self._k)

    @cached_property
    def kabs(self):
        return np.sqrt(self.k2)

    @cached_property
    def kderiv(self):
        # first-derivative symbols with the Nyquist coefficient removed
        out = []
        for k in self._k:
            kd = k.copy()
            kd[np.abs(kd) == self.n // 2] = 0.0
            out.append(kd)
        return tuple(out)

    @cached_property
    def dealias_mask(self):
        kmax = self.n // 3
        mask = np.ones(self._k[0].shape, dtype=bool)
        for k in self._k:
            mask &= np.abs(k) <= kmax
        return mask

    def fft(self, a):
        return np.fft.rfftn(a)

    def ifft(self, ah):
        return np.fft.irfftn(ah, s=self.shape, axes=tuple(range(self.dim)))

    def apply_symbol(self, a, symbol):
        return self.ifft(symbol * self.fft(a))

    def dealias(self, a):
        """2/3-rule truncation of a physical-space array."""
        return self.ifft(self.dealias_mask * self.fft(a))

    def integrate(self, a):
        """Rectangle-rule integral over the box."""
        return float(np.sum(a) * self.cell_volume)


class PeriodicField:
    """Real scalar field sampled on a :class:`PeriodicGrid`."""

    def __init__(self, grid, values):
        values = np.array(values, dtype=np.float64)
        if values.shape != grid.shape:
            raise DimensionMismatch(f"values shape {values.shape} does not match grid {grid.shape}")
        self.grid = grid
        self.values = values
        self._coef = None

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(*grid.coords()))

    @classmethod
    def constant(cls, grid, c):
        return cls(grid, np.full(grid.shape, float(c)))

    @property
    def coefficients(self):
        if self._coef is None:
            self._coef = self.grid.fft(self.values)
        return self._coef

    def invalidate(self):
        self._coef = None

    def copy(self):
        return PeriodicField(self.grid, self.values.copy())

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))

    def integral(self):
        return self.grid.integrate(self.values)

    def __repr__(self):
        return f"PeriodicField(dim={self.grid.dim}, n={self.grid.n})"


def _check(f):
    if not isinstance(f, PeriodicField):
        raise TypeError("expected a PeriodicField")
    if not f.is_finite():
        raise NonFiniteField("field contains non-finite values")
    return f


def gradient(f):
    """Spectral gradient; returns a tuple with one field per axis."""
    f = _check(f)
    g = f.grid
    fh = f.coefficients
    return tuple(PeriodicField(g, g.ifft(1j * k * fh)) for k in g.kderiv)


def laplacian(f):
    f = _check(f)
    g = f.grid
    return PeriodicField(g, g.ifft(-g.k2 * f.coefficients))


def divergence(v):
    v = tuple(v)
    if not v:
        raise DimensionMismatch("empty vector field")
    g = v[0].grid
    if len(v) != g.dim:
        raise DimensionMismatch(f"{len(v)} components given for a {g.dim}D grid")
    acc = 0
    for comp, k in zip(v, g.kderiv):
        _check(comp)
        acc = acc + 1j * k * comp.coefficients
    return PeriodicField(g, g.ifft(acc))


def fractional_laplacian(f, s):
    """(-Delta)^s with symbol |xi|^(2s); the zero mode maps to zero."""
    if not (0.0 < s <= 1.0):
        raise ValueError("s must lie in (0, 1]")
    f = _check(f)
    g = f.grid
    return PeriodicField(g, g.ifft(g.kabs ** (2.0 * s) * f.coefficients))


def quadratic_form(f, symbol):
    """sum over modes of symbol * |f_hat|^2, normalized as an integral over the box.

    ``symbol`` is given on the half-spectrum layout of the grid.
    """
    g = f.grid
    fh = f.coefficients
    w = np.full(fh.shape, 2.0)
    # modes without a conjugate partner in the half spectrum
    w[..., 0] = 1.0
    w[..., -1] = 1.0
    total = np.sum(w * symbol * np.abs(fh) ** 2)
    return float(total * g.volume / g.size ** 2)


def fractional_seminorm(f, s=0.25):
    """Integral of |(-Delta)^s f|^2 over the box, from Parseval."""
    f = _check(f)
    return quadratic_form(f, f.grid.kabs ** (4.0 * s))
