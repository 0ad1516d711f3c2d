"""Periodic 1D grids and the discrete calculus shared by the physics modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic lattice of ``n_sites`` points on ``[0, length)``."""

    n_sites: int
    length: float

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 4:
            raise ValueError(f"n_sites must be an integer >= 4, got {self.n_sites}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def dx(self) -> float:
        return self.length / self.n_sites

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n_sites) * self.dx

    def wavenumbers(self) -> np.ndarray:
        """Grid modes q_n = 2*pi*n/L in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n_sites, d=self.dx)

    def mode_index(self) -> np.ndarray:
        """Integer n with n in (-N/2, N/2], in FFT order."""
        n = np.fft.fftfreq(self.n_sites, d=1.0 / self.n_sites).round().astype(int)
        if self.n_sites % 2 == 0:
            n[self.n_sites // 2] = self.n_sites // 2
        return n

    def plane_wave(self, n: int) -> np.ndarray:
        """exp(i q_n x) sampled on the grid."""
        return np.exp(2j * np.pi * n * np.arange(self.n_sites) / self.n_sites)


def make_grid(n_sites: int, length: float) -> Grid1D:
    return Grid1D(n_sites, float(length))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One real value per site."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_sites,):
            raise ValueError(f"expected {self.grid.n_sites} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid1D) -> ScalarField:
        return cls(grid, np.zeros(grid.n_sites))

    @classmethod
    def from_function(cls, grid: Grid1D, f) -> ScalarField:
        return cls(grid, f(grid.x))

    def _wrap(self, values):
        return ScalarField(self.grid, values)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self._wrap(self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self._wrap(self.values - other.values)

    def __neg__(self):
        return self._wrap(-self.values)

    def __mul__(self, c):
        return self._wrap(self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Two complex components (spin up, spin down) per site; ``values`` has shape (n_sites, 2)."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.n_sites, 2):
            raise ValueError(f"expected shape ({self.grid.n_sites}, 2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("spinor values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def plane_wave(cls, grid: Grid1D, n: int, chi=(1.0, 0.0), normalized: bool = True) -> SpinorField:
        """exp(i q_n x) * chi, normalized to unit norm over the box unless ``normalized`` is False."""
        chi = np.asarray(chi, dtype=complex)
        psi = grid.plane_wave(n)[:, None] * chi[None, :]
        if normalized:
            psi = psi / np.sqrt(np.vdot(chi, chi).real * grid.length)
        return cls(grid, psi)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.dx))

    def normalized(self) -> SpinorField:
        return SpinorField(self.grid, self.values / self.norm())

    def _wrap(self, values):
        return SpinorField(self.grid, values)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self._wrap(self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self._wrap(self.values - other.values)

    def __mul__(self, c):
        c = np.asarray(c)
        if c.ndim == 1:
            c = c[:, None]
        return self._wrap(self.values * c)

    __rmul__ = __mul__


def _check_same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ValueError("fields live on different grids")


def _central(values: np.ndarray, dx: float) -> np.ndarray:
    return (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2 * dx)


def central_derivative(f):
    """Second-order central difference with periodic wraparound, same field kind as the input."""
    return f._wrap(_central(f.values, f.grid.dx))


def forward_difference(f: ScalarField) -> np.ndarray:
    """(f_{j+1} - f_j)/dx, the central difference centred on the half-site j + 1/2."""
    return (np.roll(f.values, -1) - f.values) / f.grid.dx


def second_derivative(values: np.ndarray, dx: float) -> np.ndarray:
    """Three-point Laplacian (f_{j+1} - 2 f_j + f_{j-1})/dx^2, periodic."""
    return (np.roll(values, -1, axis=0) - 2 * values + np.roll(values, 1, axis=0)) / dx**2


def stencil_symbol(grid: Grid1D, q) -> np.ndarray:
    """Eigenvalue of the central difference on exp(iqx): i sin(q dx)/dx."""
    return 1j * np.sin(np.asarray(q) * grid.dx) / grid.dx


def dft_modes(f: ScalarField) -> list[tuple[float, complex]]:
    """Fourier amplitudes c_n = (1/N) sum_j f_j exp(-i q_n x_j), sorted by q.

    With this normalization f_j = sum_n c_n exp(i q_n x_j) and Parseval reads
    sum_j |f_j|^2 dx = L * sum_n |c_n|^2.
    """
    g = f.grid
    amps = np.fft.fft(f.values) / g.n_sites
    n = g.mode_index()
    q = 2 * np.pi * n / g.length
    order = np.argsort(q, kind="stable")
    return [(float(q[i]), complex(amps[i])) for i in order]


def inverse_dft(grid: Grid1D, modes) -> np.ndarray:
    """Reconstruct site values from ``dft_modes`` output (complex array; real part for real fields)."""
    q = np.array([m[0] for m in modes])
    c = np.array([m[1] for m in modes])
    n = np.rint(q * grid.length / (2 * np.pi)).astype(int) % grid.n_sites
    spectrum = np.zeros(grid.n_sites, dtype=complex)
    spectrum[n] = c
    return np.fft.ifft(spectrum) * grid.n_sites


def integrate(f) -> float:
    """Periodic Riemann sum sum_j f_j dx; accepts a ScalarField or a raw site array (complex allowed)."""
    if isinstance(f, ScalarField):
        return float(np.sum(f.values) * f.grid.dx)
    raise TypeError("integrate expects a ScalarField; use integrate_values for raw arrays")


def integrate_values(values: np.ndarray, dx: float):
    return np.sum(values, axis=0) * dx


def grid_norm(values: np.ndarray, dx: float) -> float:
    """Discrete L2 norm sqrt(sum |v|^2 dx) over all components."""
    return float(np.sqrt(np.sum(np.abs(values) ** 2) * dx))


def sawtooth(grid: Grid1D, slope: float) -> np.ndarray:
    """slope * x on [0, L): the periodic stand-in for a linear profile, with a jump at the wrap."""
    return slope * grid.x


def interior_mask(grid: Grid1D, margin: int = 1) -> np.ndarray:
    """Sites at least ``margin`` away from the sawtooth wrap between x_{N-1} and x_0."""
    mask = np.ones(grid.n_sites, dtype=bool)
    mask[:margin] = False
    mask[grid.n_sites - margin:] = False
    return mask
