"""Local-translation gauge machinery in 1+1 dimensions.

Index 0 is the time-like coordinate x^0 = c_s t, index 1 is x.  Tensor
fields are stored as their upper triangle (R_00, R_01, R_11), so symmetry
holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    Grid1D,
    ScalarField,
    SpinorField,
    _central,
    _check_same_grid,
    central_derivative,
    grid_norm,
    integrate_values,
)


@dataclass(frozen=True)
class CouplingConstants:
    g: float = 0.1
    c_s: float = 1.0
    m_star: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        if self.c_s <= 0:
            raise ValueError("c_s must be positive")
        if self.m_star <= 0:
            raise ValueError("m_star must be positive")
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    @property
    def g0(self) -> float:
        return self.c_s * self.g


@dataclass(frozen=True, eq=False)
class ElasticTensorField:
    """Symmetric R_{mu nu}; ``R01`` is the phonon-like component, ``R11`` the strain R_x."""

    R00: ScalarField
    R01: ScalarField
    R11: ScalarField

    def __post_init__(self):
        _check_same_grid(self.R00, self.R01, self.R11)

    @property
    def grid(self) -> Grid1D:
        return self.R00.grid

    @classmethod
    def zeros(cls, grid: Grid1D) -> ElasticTensorField:
        z = ScalarField.zeros(grid)
        return cls(z, z, z)

    @classmethod
    def from_arrays(cls, grid: Grid1D, R00=0.0, R01=0.0, R11=0.0) -> ElasticTensorField:
        def mk(v):
            return ScalarField(grid, np.broadcast_to(np.asarray(v, dtype=float), (grid.n_sites,)))

        return cls(mk(R00), mk(R01), mk(R11))

    def component(self, mu: int, nu: int) -> ScalarField:
        key = tuple(sorted((mu, nu)))
        return {(0, 0): self.R00, (0, 1): self.R01, (1, 1): self.R11}[key]

    def as_array(self) -> np.ndarray:
        """Full (2, 2, n_sites) array."""
        out = np.empty((2, 2, self.grid.n_sites))
        for mu in range(2):
            for nu in range(2):
                out[mu, nu] = self.component(mu, nu).values
        return out


@dataclass(frozen=True, eq=False)
class GaugeParameter:
    """Translation field a_mu(x); the applied parameter is ``eps * a``.

    ``da_dt`` optionally holds the time derivatives of (a_0, a_1); absent
    means the configuration is static.
    """

    a0: ScalarField
    a1: ScalarField
    eps: float = 1.0
    da_dt: tuple[ScalarField, ScalarField] | None = field(default=None)

    def __post_init__(self):
        _check_same_grid(self.a0, self.a1)
        if not np.isfinite(self.eps):
            raise ValueError("eps must be finite")

    @property
    def grid(self) -> Grid1D:
        return self.a0.grid

    @classmethod
    def spatial(cls, a1: ScalarField, eps: float = 1.0) -> GaugeParameter:
        return cls(ScalarField.zeros(a1.grid), a1, eps)

    def scaled(self, eps: float) -> GaugeParameter:
        return GaugeParameter(self.a0, self.a1, eps, self.da_dt)


def translate_wavefunction(psi: SpinorField, delta_a: ScalarField) -> SpinorField:
    """First-order local translation psi' = (1 - i delta_a p) psi = psi - delta_a d_x psi."""
    _check_same_grid(psi, delta_a)
    dpsi = _central(psi.values, psi.grid.dx)
    return SpinorField(psi.grid, psi.values - delta_a.values[:, None] * dpsi)


def _d(mu: int, f: ScalarField, df_dt: ScalarField | None, c_s: float) -> np.ndarray:
    if mu == 1:
        return _central(f.values, f.grid.dx)
    if df_dt is None:
        return np.zeros(f.grid.n_sites)
    return df_dt.values / c_s


def gauge_transform(R: ElasticTensorField, a: GaugeParameter, c_s: float = 1.0) -> ElasticTensorField:
    """R'_{mu nu} = R_{mu nu} - d_mu a_nu - d_nu a_mu, with d_0 = (1/c_s) d_t."""
    if R.grid != a.grid:
        raise ValueError("tensor field and gauge parameter live on different grids")
    comps = (a.a0, a.a1)
    rates = a.da_dt if a.da_dt is not None else (None, None)

    def shifted(mu, nu):
        d_mu_a_nu = _d(mu, comps[nu], rates[nu], c_s)
        d_nu_a_mu = _d(nu, comps[mu], rates[mu], c_s)
        return ScalarField(R.grid, R.component(mu, nu).values - a.eps * (d_mu_a_nu + d_nu_a_mu))

    return ElasticTensorField(shifted(0, 0), shifted(0, 1), shifted(1, 1))


def spatial_potential(psi: SpinorField, R: ElasticTensorField, c: CouplingConstants) -> SpinorField:
    """-i g R_x p psi = -g R_x d_x psi."""
    dpsi = _central(psi.values, psi.grid.dx)
    return SpinorField(psi.grid, -c.g * R.R11.values[:, None] * dpsi)


def temporal_potential(psi: SpinorField, R: ElasticTensorField, c: CouplingConstants) -> SpinorField:
    """-i g0 R p psi = -g0 R_01 d_x psi."""
    dpsi = _central(psi.values, psi.grid.dx)
    return SpinorField(psi.grid, -c.g0 * R.R01.values[:, None] * dpsi)


def covariant_derivative(psi: SpinorField, R: ElasticTensorField, c: CouplingConstants,
                         direction: str = "space") -> SpinorField:
    """Covariant derivative pieces along ``direction``.

    ``"space"`` returns the full D_x psi = (1 - g R_x) d_x psi.  ``"time"``
    returns only the potential term -g0 R d_x psi; the caller adds d_t psi.
    """
    if psi.grid != R.grid:
        raise ValueError("spinor and tensor field live on different grids")
    if direction == "space":
        dpsi = _central(psi.values, psi.grid.dx)
        return SpinorField(psi.grid, (1.0 - c.g * R.R11.values)[:, None] * dpsi)
    if direction == "time":
        return temporal_potential(psi, R, c)
    raise ValueError(f"direction must be 'space' or 'time', got {direction!r}")


def potential_commutator(psi: SpinorField, R: ElasticTensorField, c: CouplingConstants) -> SpinorField:
    """[V_t, V_x] psi for the two potential operators, composed in both orders.

    This is the non-abelian piece of the field strength acting on a test
    wavefunction; it is nonzero as soon as R or R_x varies in space.
    """
    tx = temporal_potential(spatial_potential(psi, R, c), R, c)
    xt = spatial_potential(temporal_potential(psi, R, c), R, c)
    return tx - xt


@dataclass(frozen=True)
class FieldStrength:
    """Linearized G_{mu nu beta}; ``full`` has shape (2, 2, 2, n_sites)."""

    full: np.ndarray

    @property
    def G010(self) -> np.ndarray:
        return self.full[0, 1, 0]

    @property
    def G011(self) -> np.ndarray:
        return self.full[0, 1, 1]

    def independent(self) -> dict[str, np.ndarray]:
        return {"G010": self.G010, "G011": self.G011}


def field_strength_linear(R: ElasticTensorField, dR_dt: ElasticTensorField | None = None,
                          c_s: float = 1.0) -> FieldStrength:
    """G_{mu nu beta} = d_mu R_{nu beta} - d_nu R_{mu beta}.

    Only G_{01 beta} is computed; G_{10 beta} is stored as its exact negative
    and the diagonal mu = nu entries are zero.
    """
    n = R.grid.n_sites
    full = np.zeros((2, 2, 2, n))
    for beta in range(2):
        rate = None if dR_dt is None else dR_dt.component(1, beta)
        d0 = _d(0, R.component(1, beta), rate, c_s)
        d1 = _d(1, R.component(0, beta), None, c_s)
        full[0, 1, beta] = d0 - d1
        full[1, 0, beta] = -full[0, 1, beta]
    return FieldStrength(full)


def shifted_strain(R: ElasticTensorField, delta_a: ScalarField, c: CouplingConstants) -> ElasticTensorField:
    """Strain after a local translation delta_a, to first order.

    R_x' = R_x - (1/g - R_x) d_x delta_a - delta_a d_x R_x, chosen so that
    D_x' psi' = tau(delta_a) D_x psi holds at first order.  For R_x = 0 it
    reduces to R_x' = -(1/g) d_x delta_a.
    """
    if c.g == 0:
        raise ValueError("covariance bookkeeping needs a nonzero coupling g")
    da = _central(delta_a.values, delta_a.grid.dx)
    rx = R.R11.values
    drx = _central(rx, delta_a.grid.dx)
    new = rx - (1.0 / c.g - rx) * da - delta_a.values * drx
    return ElasticTensorField(R.R00, R.R01, ScalarField(R.grid, new))


def covariance_residual(psi: SpinorField, R: ElasticTensorField, a: GaugeParameter, eps: float,
                        c: CouplingConstants) -> float:
    """Grid 2-norm of D_x' psi' - tau(delta_a) D_x psi with delta_a = eps * a_1."""
    delta_a = ScalarField(psi.grid, eps * a.a1.values)
    psi_t = translate_wavefunction(psi, delta_a)
    R_t = shifted_strain(R, delta_a, c)
    lhs = covariant_derivative(psi_t, R_t, c, "space")
    rhs = translate_wavefunction(covariant_derivative(psi, R, c, "space"), delta_a)
    return grid_norm(lhs.values - rhs.values, psi.grid.dx)


def symmetrized_interaction_density(psi: SpinorField, R: ScalarField, g0: float) -> np.ndarray:
    """-(1/2) g0 psi^dagger (d_x R) psi per site (complex dtype, kept for the reality check)."""
    dR = central_derivative(R).values
    dens = np.sum(np.conj(psi.values) * psi.values, axis=1)
    return -0.5 * g0 * dR * dens


def hermiticity_probe(psi: SpinorField, R: ScalarField, g0: float) -> float:
    """|Im| of the integrated symmetrized interaction; zero for a Hermitian coupling."""
    val = integrate_values(symmetrized_interaction_density(psi, R, g0), psi.grid.dx)
    return float(abs(np.imag(val)))


def unsymmetrized_expectation(psi: SpinorField, R: ScalarField, g0: float) -> complex:
    """integral of -g0 psi^dagger R d_x psi, the raw time-sector coupling before symmetrization."""
    dpsi = _central(psi.values, psi.grid.dx)
    dens = np.sum(np.conj(psi.values) * R.values[:, None] * dpsi, axis=1)
    return complex(-g0 * integrate_values(dens, psi.grid.dx))
