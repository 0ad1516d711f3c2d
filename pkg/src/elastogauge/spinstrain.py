"""Spin-orbit coupling to the strain field: spin currents, the strain-spin-current density,
spin-flip matrix elements and a toy model of strain-noise spin relaxation.

Wavefunctions depend on x only, so the transport index l of J_il is
populated for l = x alone.  Cartesian indices run 0, 1, 2 for x, y, z.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .lattice import Grid1D, ScalarField, SpinorField, _central, integrate_values

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in itertools.permutations(range(3)):
    LEVI_CIVITA[_i, _j, _k] = np.linalg.det(np.eye(3)[[_i, _j, _k]])

SPIN_STATES = {"up": np.array([1, 0], dtype=complex), "down": np.array([0, 1], dtype=complex)}


@dataclass(frozen=True)
class SpinOrbitParams:
    g: float = 1.0
    m: float = 1.0
    mu_B: float = 1.0


@dataclass(frozen=True, eq=False)
class ElectricFieldConfig:
    """E_j(x) for j = x, y, z; ``values`` has shape (n_sites, 3)."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.broadcast_to(np.asarray(self.values, dtype=float), (self.grid.n_sites, 3)).copy()
        if not np.all(np.isfinite(v)):
            raise ValueError("electric field must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, grid: Grid1D, E) -> ElectricFieldConfig:
        return cls(grid, np.asarray(E, dtype=float))

    @classmethod
    def from_components(cls, Ex: ScalarField, Ey: ScalarField, Ez: ScalarField) -> ElectricFieldConfig:
        return cls(Ex.grid, np.stack([Ex.values, Ey.values, Ez.values], axis=1))


@dataclass(frozen=True, eq=False)
class StrainTensor3:
    """Symmetric space-like strain R_kl, uniform (3, 3) or per site (n_sites, 3, 3)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape[-2:] != (3, 3) or v.ndim not in (2, 3):
            raise ValueError(f"strain must have shape (3, 3) or (n, 3, 3), got {v.shape}")
        if not np.array_equal(v, np.swapaxes(v, -1, -2)):
            raise ValueError("strain tensor must be symmetric")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def symmetric(cls, a) -> StrainTensor3:
        """Symmetrize an arbitrary array as (a + a^T)/2."""
        a = np.asarray(a, dtype=float)
        return cls(0.5 * (a + np.swapaxes(a, -1, -2)))

    @classmethod
    def from_components(cls, **comps) -> StrainTensor3:
        """e.g. ``StrainTensor3.from_components(xy=0.1, zz=0.2)``."""
        axes = {"x": 0, "y": 1, "z": 2}
        R = np.zeros((3, 3))
        for key, val in comps.items():
            k, l = axes[key[0]], axes[key[1]]
            R[k, l] = R[l, k] = val
        return cls(R)


def _pauli_bilinear(bra: np.ndarray, ket: np.ndarray) -> np.ndarray:
    """bra^dagger sigma_i ket per site; (n, 2) x (n, 2) -> (n, 3)."""
    return np.einsum("na,iab,nb->ni", np.conj(bra), PAULI, ket)


def spin_current_bilinear(phi: SpinorField, psi: SpinorField, params: SpinOrbitParams = SpinOrbitParams()) -> np.ndarray:
    """J_il(phi, psi) = -(i mu_B / 2m)[(d_l phi)^dagger sigma_i psi - phi^dagger sigma_i d_l psi], complex.

    Shape (n_sites, 3, 3) with only l = x nonzero.  phi = psi gives the
    spin-current density.
    """
    dx = psi.grid.dx
    dphi = _central(phi.values, dx)
    dpsi = _central(psi.values, dx)
    bracket = _pauli_bilinear(dphi, psi.values) - _pauli_bilinear(phi.values, dpsi)
    J = np.zeros((psi.grid.n_sites, 3, 3), dtype=complex)
    J[:, :, 0] = -1j * params.mu_B / (2 * params.m) * bracket
    return J


def spin_current(psi: SpinorField, params: SpinOrbitParams = SpinOrbitParams(), tol: float = 1e-12) -> np.ndarray:
    """Real spin-current density J_il per site, shape (n_sites, 3, 3)."""
    J = spin_current_bilinear(psi, psi, params)
    scale = max(1.0, float(np.max(np.abs(J))))
    resid = float(np.max(np.abs(J.imag)))
    if resid > tol * scale:
        raise ArithmeticError(f"spin current has imaginary residue {resid:.3g}")
    return J.real.copy()


def charge_current(psi: SpinorField, params: SpinOrbitParams = SpinOrbitParams()) -> np.ndarray:
    """Spin-traced analog of J_xx: the same bracket with sigma_i replaced by the identity."""
    dpsi = _central(psi.values, psi.grid.dx)
    bracket = np.sum(np.conj(dpsi) * psi.values - np.conj(psi.values) * dpsi, axis=1)
    return (-1j * params.mu_B / (2 * params.m) * bracket).real


def _strain_sites(R: StrainTensor3, n: int) -> np.ndarray:
    return np.broadcast_to(R.values, (n, 3, 3))


def strain_spin_coupling_density(J: np.ndarray, R: StrainTensor3, E: ElectricFieldConfig, g: float) -> np.ndarray:
    """H'_SO = -(g/2) eps_ijk J_il R_kl E_j per site."""
    n = J.shape[0]
    Rs = _strain_sites(R, n)
    return -0.5 * g * np.einsum("ijk,nil,nkl,nj->n", LEVI_CIVITA, J, Rs, E.values)


def strain_spin_coupling_bruteforce(J: np.ndarray, R: StrainTensor3, E: ElectricFieldConfig, g: float) -> np.ndarray:
    """Same contraction as an explicit loop over all 81 (i, j, k, l) terms."""
    n = J.shape[0]
    Rs = _strain_sites(R, n)
    out = np.zeros(n, dtype=np.result_type(J, float))
    for i, j, k, l in itertools.product(range(3), repeat=4):
        e = LEVI_CIVITA[i, j, k]
        if e == 0:
            continue
        out = out + e * J[:, i, l] * Rs[:, k, l] * E.values[:, j]
    return -0.5 * g * out


def _sigma_cross_E(E: np.ndarray) -> np.ndarray:
    """(sigma x E)_m = eps_mab sigma_a E_b as (n, 3, 2, 2)."""
    return np.einsum("mab,aij,nb->nmij", LEVI_CIVITA, PAULI, E)


def _so_density(grad_bra: np.ndarray, bra: np.ndarray, grad_ket: np.ndarray, ket: np.ndarray,
                E: ElectricFieldConfig, params: SpinOrbitParams) -> np.ndarray:
    """-(i mu_B/4m) sum_m [(G_m bra)^dagger (sigma x E)_m ket - bra^dagger (sigma x E)_m G_m ket].

    ``grad_*`` has shape (n, 3, 2): the m-th gradient component of each spinor.
    """
    S = _sigma_cross_E(E.values)
    t1 = np.einsum("nma,nmab,nb->n", np.conj(grad_bra), S, ket)
    t2 = np.einsum("na,nmab,nmb->n", np.conj(bra), S, grad_ket)
    return -1j * params.mu_B / (4 * params.m) * (t1 - t2)


def spin_orbit_density(psi: SpinorField, E: ElectricFieldConfig, params: SpinOrbitParams = SpinOrbitParams()) -> np.ndarray:
    """Strain-free spin-orbit density with the ordinary gradient (x component only)."""
    n = psi.grid.n_sites
    grad = np.zeros((n, 3, 2), dtype=complex)
    grad[:, 0] = _central(psi.values, psi.grid.dx)
    return _so_density(grad, psi.values, grad, psi.values, E, params).real


def covariant_gradient(psi: SpinorField, R: StrainTensor3, g: float) -> np.ndarray:
    """D_m psi = d_m psi - g R_mk d_k psi with only d_x psi nonzero; shape (n, 3, 2)."""
    n = psi.grid.n_sites
    d = _central(psi.values, psi.grid.dx)
    Rs = _strain_sites(R, n)
    grad = -g * Rs[:, :, 0, None] * d[:, None, :]
    grad[:, 0] += d
    return grad


def covariant_spin_orbit_density(psi: SpinorField, E: ElectricFieldConfig, R: StrainTensor3,
                                 params: SpinOrbitParams = SpinOrbitParams()) -> np.ndarray:
    """Spin-orbit density with every gradient replaced by the covariant one."""
    grad = covariant_gradient(psi, R, params.g)
    return _so_density(grad, psi.values, grad, psi.values, E, params).real


def plane_wave_spinor(grid: Grid1D, n: int, spin) -> SpinorField:
    chi = SPIN_STATES[spin] if isinstance(spin, str) else np.asarray(spin, dtype=complex)
    return SpinorField.plane_wave(grid, n, chi)


def spin_flip_matrix_element(grid: Grid1D, n: int, spin, n_prime: int, spin_prime, R: StrainTensor3,
                             E: ElectricFieldConfig, params: SpinOrbitParams = SpinOrbitParams()) -> complex:
    """<k' s'| H'_SO |k s> as the grid integral of the bilinear coupling density between unit plane waves."""
    bra = plane_wave_spinor(grid, n_prime, spin_prime)
    ket = plane_wave_spinor(grid, n, spin)
    J = spin_current_bilinear(bra, ket, params)
    dens = strain_spin_coupling_density(J, R, E, params.g)
    return complex(integrate_values(dens, grid.dx))


def matrix_element_table(grid: Grid1D, n_values, R: StrainTensor3, E: ElectricFieldConfig,
                         params: SpinOrbitParams = SpinOrbitParams()) -> np.ndarray:
    """H'_SO on the (n, spin) window ordered as [(n0, up), (n0, down), (n1, up), ...]."""
    labels = [(n, s) for n in n_values for s in ("up", "down")]
    H = np.zeros((len(labels), len(labels)), dtype=complex)
    for a, (n1, s1) in enumerate(labels):
        for b, (n2, s2) in enumerate(labels):
            H[a, b] = spin_flip_matrix_element(grid, n2, s2, n1, s1, R, E, params)
    return H


# ---------------------------------------------------------------- relaxation toy


@dataclass(frozen=True)
class RelaxationParams:
    """Two-level spin driven by Ornstein-Uhlenbeck strain noise.

    The transverse field is coupling * strain_amplitude * xi(t) * (E x r), with
    r the unit strain direction (R_yx fluctuations by default) and xi an OU
    process of unit variance and correlation time ``tau_c``.
    """

    coupling: float = 0.2
    tau_c: float = 1.0
    E: tuple[float, float, float] = (0.0, 0.0, 1.0)
    strain_amplitude: float = 1.0
    strain_direction: tuple[float, float, float] = (0.0, 1.0, 0.0)
    splitting: float = 1.0
    dt: float = 0.05
    n_steps: int = 2000
    n_realizations: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.tau_c <= 0:
            raise ValueError("tau_c must be positive")
        if self.dt <= 0 or self.n_steps < 1 or self.n_realizations < 1:
            raise ValueError("dt, n_steps and n_realizations must be positive")
        if self.dt > 0.1 * self.tau_c:
            raise ValueError(f"dt={self.dt} too coarse for noise correlation time {self.tau_c} (need dt <= tau_c/10)")
        if np.linalg.norm(self.transverse_field()) * self.dt > 0.1:
            raise ValueError("coupling * dt too large for the weak-coupling toy (need |h| dt <= 0.1)")

    def transverse_field(self) -> np.ndarray:
        r = np.asarray(self.strain_direction, dtype=float)
        r = r / np.linalg.norm(r)
        return self.coupling * self.strain_amplitude * np.cross(np.asarray(self.E, dtype=float), r)


@dataclass(frozen=True)
class DecayCurve:
    t: np.ndarray
    sz_mean: np.ndarray
    sz_stderr: np.ndarray
    rate: float


def ou_noise(z: np.ndarray, dt: float, tau_c: float) -> np.ndarray:
    """Stationary unit-variance Ornstein-Uhlenbeck paths from standard normals via the exact update.

    ``z`` has shape (..., n_steps + 1); the recursion runs along the last axis.
    """
    decay = np.exp(-dt / tau_c)
    kick = np.sqrt(1 - decay**2)
    xi = np.empty_like(z)
    xi[..., 0] = z[..., 0]
    for i in range(1, z.shape[-1]):
        xi[..., i] = decay * xi[..., i - 1] + kick * z[..., i]
    return xi


def _noise_block(params: RelaxationParams, realizations) -> np.ndarray:
    z = np.array([np.random.default_rng([params.seed, r]).standard_normal(params.n_steps + 1)
                  for r in realizations])
    return ou_noise(z, params.dt, params.tau_c)


def fit_decay_rate(t: np.ndarray, sz: np.ndarray, floor: float = 0.25) -> float:
    """-slope of log <sigma_z> against t over the points where <sigma_z> stays above ``floor``."""
    sel = sz > floor
    if sel.sum() < 3:
        raise ValueError("not enough points above the fitting floor")
    if np.all(sz[sel] == 1.0):
        return 0.0
    return float(-np.polyfit(t[sel], np.log(sz[sel]), 1)[0])


def relaxation_toy(params: RelaxationParams) -> DecayCurve:
    """Ensemble average of <sigma_z>(t) starting from spin up.

    Each step applies the exact 2x2 propagator of (1/2) Delta sigma_z + xi h.sigma
    with xi held at the midpoint of the OU samples.  Realization r draws its
    noise from ``default_rng([seed, r])``.
    """
    h = params.transverse_field()
    xi = _noise_block(params, range(params.n_realizations))
    xi_mid = 0.5 * (xi[:, 1:] + xi[:, :-1])
    up = np.ones(params.n_realizations, dtype=complex)
    down = np.zeros(params.n_realizations, dtype=complex)
    sz = np.empty((params.n_steps + 1, params.n_realizations))
    sz[0] = 1.0
    half = 0.5 * params.splitting
    for step in range(params.n_steps):
        bx, by = h[0] * xi_mid[:, step], h[1] * xi_mid[:, step]
        bz = half + h[2] * xi_mid[:, step]
        b = np.sqrt(bx**2 + by**2 + bz**2)
        c = np.cos(b * params.dt)
        s = np.where(b > 0, np.sin(b * params.dt) / np.where(b > 0, b, 1.0), params.dt)
        new_up = (c - 1j * s * bz) * up - 1j * s * (bx - 1j * by) * down
        new_down = -1j * s * (bx + 1j * by) * up + (c + 1j * s * bz) * down
        up, down = new_up, new_down
        pu, pd = np.abs(up) ** 2, np.abs(down) ** 2
        sz[step + 1] = (pu - pd) / (pu + pd)
    t = np.arange(params.n_steps + 1) * params.dt
    mean = sz.mean(axis=1)
    stderr = sz.std(axis=1, ddof=1) / np.sqrt(params.n_realizations) if params.n_realizations > 1 else np.zeros_like(mean)
    return DecayCurve(t, mean, stderr, fit_decay_rate(t, mean))


def golden_rule_relaxation_rate(params: RelaxationParams) -> float:
    """Weak-coupling prediction 2 |h_perp|^2 S(Delta), S(w) = 2 tau_c / (1 + w^2 tau_c^2)."""
    h = params.transverse_field()
    h_perp2 = h[0] ** 2 + h[1] ** 2
    S = 2 * params.tau_c / (1 + (params.splitting * params.tau_c) ** 2)
    return float(2 * h_perp2 * S)
