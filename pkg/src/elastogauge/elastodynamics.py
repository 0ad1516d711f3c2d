"""Gauge-fixed 1D elastic field: energy, leapfrog evolution and dispersion measurement.

After gauge fixing the strain R_x is static data and only the phonon
component phi = R_01 evolves, under d_t^2 phi = c_s^2 d_x^2 phi.  The spatial
gradient in the energy is the half-site central difference, the adjoint of
the three-point Laplacian used by the integrator, so the semi-discrete energy
is an exact invariant of the spatial discretization.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .lattice import Grid1D, ScalarField, _check_same_grid, forward_difference, second_derivative


@dataclass(frozen=True, eq=False)
class ElasticState1D:
    """(phi, pi_phi) with pi_phi = (1/c_s^2) d_t phi, plus the strain R_x and its rate."""

    phi: ScalarField
    pi_phi: ScalarField
    R_x: ScalarField
    pi_Rx: ScalarField
    c_s: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        _check_same_grid(self.phi, self.pi_phi, self.R_x, self.pi_Rx)
        if self.c_s <= 0:
            raise ValueError("c_s must be positive")

    @property
    def grid(self) -> Grid1D:
        return self.phi.grid

    @property
    def phi_dot(self) -> np.ndarray:
        return self.c_s**2 * self.pi_phi.values

    @property
    def is_gauge_fixed(self) -> bool:
        return not np.any(self.pi_Rx.values)

    @classmethod
    def from_velocity(cls, grid: Grid1D, phi, phi_dot=0.0, R_x=0.0, c_s: float = 1.0,
                      t: float = 0.0) -> ElasticState1D:
        """Build a gauge-fixed state from site arrays for phi and d_t phi."""
        def field(v):
            return ScalarField(grid, np.broadcast_to(np.asarray(v, dtype=float), (grid.n_sites,)))

        return cls(field(phi), field(np.asarray(phi_dot) / c_s**2), field(R_x),
                   ScalarField.zeros(grid), c_s, t)

    @classmethod
    def vacuum(cls, grid: Grid1D, c_s: float = 1.0) -> ElasticState1D:
        return cls.from_velocity(grid, 0.0, 0.0, 0.0, c_s)

    def __add__(self, other):
        return replace(self, phi=self.phi + other.phi, pi_phi=self.pi_phi + other.pi_phi)

    def __mul__(self, a):
        return replace(self, phi=self.phi * a, pi_phi=self.pi_phi * a)

    __rmul__ = __mul__


@dataclass(frozen=True)
class EvolveParams:
    dt: float
    n_steps: int
    c_s: float = 1.0
    save_every: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if self.save_every < 1:
            raise ValueError("save_every must be >= 1")

    def courant(self, grid: Grid1D) -> float:
        return self.c_s * self.dt / grid.dx

    @classmethod
    def from_courant(cls, grid: Grid1D, courant: float, n_steps: int, c_s: float = 1.0,
                     save_every: int = 1) -> EvolveParams:
        return cls(courant * grid.dx / c_s, n_steps, c_s, save_every)


MAX_COURANT = 0.9


@dataclass(frozen=True)
class Trajectory:
    """Snapshots of phi and d_t phi at ``times``; R_x is carried once since it never changes."""

    grid: Grid1D
    times: np.ndarray
    phi: np.ndarray
    phi_dot: np.ndarray
    R_x: np.ndarray
    c_s: float

    def state(self, i: int) -> ElasticState1D:
        return ElasticState1D.from_velocity(self.grid, self.phi[i], self.phi_dot[i], self.R_x,
                                            self.c_s, float(self.times[i]))

    @property
    def final(self) -> ElasticState1D:
        return self.state(-1)

    def __len__(self):
        return len(self.times)


def hamiltonian_density(state: ElasticState1D) -> ScalarField:
    """(1/2)[(1/c_s^2)(d_t phi)^2 + (d_x phi)^2] per site."""
    if not state.is_gauge_fixed:
        raise ValueError("hamiltonian_density needs a gauge-fixed state (pi_Rx = 0)")
    kinetic = state.phi_dot**2 / state.c_s**2
    grad = forward_difference(state.phi) ** 2
    return ScalarField(state.grid, 0.5 * (kinetic + grad))


def total_energy(state: ElasticState1D) -> float:
    return float(np.sum(hamiltonian_density(state).values) * state.grid.dx)


def shadow_energy(state: ElasticState1D, dt: float) -> float:
    """The quadratic form that velocity Verlet conserves exactly for this linear system.

    E~ = E - (dt^2 / 8) c_s^2 * integral (d_xx phi)^2.  It differs from the
    physical energy by O((omega dt)^2) and has no time-step error of its own.
    """
    lap = second_derivative(state.phi.values, state.grid.dx)
    return total_energy(state) - dt**2 * state.c_s**2 / 8 * float(np.sum(lap**2) * state.grid.dx)


def apply_gauge_fixing(state: ElasticState1D) -> ElasticState1D:
    """Impose d_t R_x = 0: zero the strain momentum, keep the strain itself."""
    if state.is_gauge_fixed:
        return state
    return replace(state, pi_Rx=ScalarField.zeros(state.grid))


def evolve_leapfrog(state: ElasticState1D, params: EvolveParams) -> Trajectory:
    """Kick-drift-kick integration of the gauge-fixed wave equation.

    Snapshots are stored every ``params.save_every`` steps, including the
    initial state and the final step.
    """
    grid = state.grid
    if not state.is_gauge_fixed:
        raise ValueError("state is not gauge fixed; call apply_gauge_fixing first")
    if params.c_s != state.c_s:
        raise ValueError(f"params.c_s={params.c_s} differs from state.c_s={state.c_s}")
    courant = params.courant(grid)
    if courant > MAX_COURANT:
        raise ValueError(f"CFL violated: c_s*dt/dx = {courant:.4g} > {MAX_COURANT}")

    dt, dx = params.dt, grid.dx
    c2 = params.c_s**2
    phi = state.phi.values.copy()
    v = state.phi_dot.copy()
    times, phis, vels = [state.t], [phi.copy()], [v.copy()]
    acc = c2 * second_derivative(phi, dx)
    for step in range(1, params.n_steps + 1):
        v += 0.5 * dt * acc
        phi += dt * v
        acc = c2 * second_derivative(phi, dx)
        v += 0.5 * dt * acc
        if step % params.save_every == 0 or step == params.n_steps:
            times.append(state.t + step * dt)
            phis.append(phi.copy())
            vels.append(v.copy())
    R_x = state.R_x.values.copy()
    R_x.setflags(write=False)
    return Trajectory(grid, np.array(times), np.array(phis), np.array(vels), R_x, params.c_s)


def semidiscrete_frequency(grid: Grid1D, q, c_s: float) -> np.ndarray:
    """Frequency of mode q under the three-point Laplacian: (2 c_s/dx) |sin(q dx/2)|."""
    return 2 * c_s / grid.dx * np.abs(np.sin(np.asarray(q) * grid.dx / 2))


def leapfrog_frequency(grid: Grid1D, q, c_s: float, dt: float) -> np.ndarray:
    """Exact angular frequency of mode q for the fully discrete kick-drift-kick scheme."""
    w = semidiscrete_frequency(grid, q, c_s)
    return 2 / dt * np.arcsin(w * dt / 2)


class TrajectoryTooShort(ValueError):
    pass


def _peak_frequency(series: np.ndarray, dt: float, pad: int = 16) -> float:
    n = len(series)
    m = pad * n
    power = np.abs(np.fft.fft((series - series.mean()) * np.hanning(n), n=m))
    k = int(np.argmax(power))
    a, b, c = power[(k - 1) % m], power[k], power[(k + 1) % m]
    denom = a - 2 * b + c
    shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
    bin_ = k + shift
    if bin_ > m / 2:
        bin_ -= m
    return float(abs(2 * np.pi * bin_ / (m * dt)))


def measure_dispersion(traj: Trajectory, modes=None, min_cycles: float = 2.0,
                       rtol_zero: float = 1e-12) -> list[tuple[float, float]]:
    """Dominant temporal frequency of each spatial Fourier mode of phi.

    Each mode's complex amplitude is tracked through the (uniformly spaced)
    snapshots and the peak of its Hann-windowed, zero-padded spectrum is
    refined by three-point quadratic interpolation.  ``modes`` is a list of
    integers n (q = 2 pi n / L); by default every non-negative n below N/2.
    Modes that stay identically zero report omega = 0.  A mode whose
    measured omega * T is below ``2 pi * min_cycles`` raises TrajectoryTooShort.
    """
    grid = traj.grid
    times = traj.times
    steps = np.diff(times)
    if len(times) < 8 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise TrajectoryTooShort("need at least 8 uniformly spaced snapshots")
    dt = steps[0]
    duration = times[-1] - times[0]
    amps = np.fft.fft(traj.phi, axis=1) / grid.n_sites
    if modes is None:
        modes = range(0, (grid.n_sites + 1) // 2)
    scale = max(np.max(np.abs(amps)), np.finfo(float).tiny)
    out = []
    for n in modes:
        q = 2 * np.pi * n / grid.length
        series = amps[:, n % grid.n_sites]
        if np.max(np.abs(series - series.mean())) <= rtol_zero * scale:
            out.append((q, 0.0))
            continue
        omega = _peak_frequency(series, dt)
        if n != 0 and omega * duration < 2 * np.pi * min_cycles:
            raise TrajectoryTooShort(
                f"mode n={n}: omega*T = {omega * duration:.3g} < {2 * np.pi * min_cycles:.3g}")
        out.append((q, omega))
    return out
