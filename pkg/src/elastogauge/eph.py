"""Electron-phonon coupling induced by the time-sector gauge potential.

Electrons live in a window of plane waves k_n = 2 pi n / L with spin; phonons
in a truncated Fock space.  The interaction is the symmetrized density
-(1/2) g0 psi^dagger (d_x phi) psi with phi the quantized field at t = 0,
which in momentum space reads

    H_I = sum_{k,q,sigma} M(q) c^dagger_{k+q,sigma} c_{k,sigma} a_q + h.c.,
    M(q) = (g0/2) i q sqrt(1/(2 L rho omega_q)).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .lattice import Grid1D, ScalarField
from .phonons import DENSE_LIMIT, FockBasis, QOperator, free_hamiltonian

SPINS = ("up", "down")


@dataclass(frozen=True, eq=False)
class ElectronBasis:
    """Fixed-number fermion states over orbitals (n, spin), |n| <= n_k.

    Orbitals are ordered by spin, then by n; a state is a sorted tuple of
    occupied orbital indices, and fermionic signs follow that ordering.
    """

    length: float
    n_k: int
    n_electrons: int = 1
    spins: tuple[str, ...] = SPINS
    n_values: tuple[int, ...] | None = None
    orbitals: tuple[tuple[int, str], ...] = field(init=False, repr=False)
    states: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        for s in self.spins:
            if s not in SPINS:
                raise ValueError(f"unknown spin label {s!r}")
        ns = self.n_values if self.n_values is not None else tuple(range(-self.n_k, self.n_k + 1))
        orbitals = tuple((n, s) for s in self.spins for n in sorted(ns))
        if not 0 <= self.n_electrons <= len(orbitals):
            raise ValueError("n_electrons out of range")
        states = tuple(itertools.combinations(range(len(orbitals)), self.n_electrons))
        object.__setattr__(self, "orbitals", orbitals)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "_orb_index", {o: i for i, o in enumerate(orbitals)})
        object.__setattr__(self, "_state_index", {s: i for i, s in enumerate(states)})

    @classmethod
    def window(cls, length: float, n_values, spins=SPINS, n_electrons: int = 1) -> ElectronBasis:
        """Basis over an explicit list of plane-wave indices."""
        n_values = tuple(sorted(int(n) for n in n_values))
        return cls(length, max(abs(n) for n in n_values), n_electrons, tuple(spins), n_values)

    @property
    def dim(self) -> int:
        return len(self.states)

    def k(self, orbital: int) -> float:
        return 2 * np.pi * self.orbitals[orbital][0] / self.length

    def orbital_index(self, n: int, spin: str) -> int | None:
        return self._orb_index.get((n, spin))

    def state_index(self, occupied) -> int:
        return self._state_index[tuple(sorted(occupied))]

    def single(self, n: int, spin: str = "up") -> int:
        """Index of the one-electron state in orbital (n, spin)."""
        return self.state_index((self._orb_index[(n, spin)],))

    def hop(self, state: tuple[int, ...], dest: int, src: int):
        """Apply c^dagger_dest c_src; returns (sign, new_state) or None."""
        if src not in state:
            return None
        if dest != src and dest in state:
            return None
        occ = list(state)
        sign = (-1) ** occ.index(src)
        occ.remove(src)
        pos = sum(1 for o in occ if o < dest)
        sign *= (-1) ** pos
        occ.insert(pos, dest)
        return sign, tuple(occ)


@dataclass(frozen=True, eq=False)
class JointBasis:
    """Electron (x) phonon product space; joint index = i_e * dim_ph + i_ph."""

    electrons: ElectronBasis
    phonons: FockBasis

    def __post_init__(self):
        if not np.isclose(self.electrons.length, self.phonons.modes.length, rtol=1e-12, atol=0):
            raise ValueError("electron and phonon grids are incommensurate (different L)")

    @property
    def dim(self) -> int:
        return self.electrons.dim * self.phonons.dim

    @property
    def length(self) -> float:
        return self.electrons.length

    def index(self, i_e: int, i_ph: int) -> int:
        return i_e * self.phonons.dim + i_ph

    def split(self, idx: int) -> tuple[int, int]:
        return divmod(idx, self.phonons.dim)

    def state(self, n: int, spin: str = "up", occupation=None) -> int:
        """Joint index of one electron in (n, spin) with the given phonon occupation (vacuum default)."""
        if occupation is None:
            occupation = [0] * len(self.phonons.modes)
        return self.index(self.electrons.single(n, spin), self.phonons.index(occupation))


@dataclass(frozen=True)
class LatticePotential:
    """Lattice potential U(x) on a grid; U(q) = integral dx e^{-iqx} U(x)."""

    potential: ScalarField

    @property
    def grid(self) -> Grid1D:
        return self.potential.grid

    def fourier(self, q: float) -> complex:
        g = self.grid
        return complex(np.sum(np.exp(-1j * q * g.x) * self.potential.values) * g.dx)

    def conjugate_symmetry_error(self) -> float:
        g = self.grid
        qs = g.wavenumbers()
        return max(abs(self.fourier(q) - np.conj(self.fourier(-q))) for q in qs)


def coupling_from_potential(U: LatticePotential, length: float, q: float) -> float:
    """Half coupling g0/2 = |U(q)| / L; at q = 0 this is the spatial mean of U."""
    return abs(U.fourier(q)) / length


def _half_coupling(g0, q: float, length: float) -> float:
    if isinstance(g0, LatticePotential):
        return coupling_from_potential(g0, length, q)
    return 0.5 * float(g0)


def matrix_element(q: float, g0, length: float, rho: float, c_s: float) -> complex:
    """M(q) = (g0/2) i q sqrt(1/(2 L rho omega_q)) for a single phonon absorbed at wavenumber q."""
    omega = c_s * abs(q)
    return _half_coupling(g0, q, length) * 1j * q * np.sqrt(1.0 / (2 * length * rho * omega))


def interaction_hamiltonian(joint: JointBasis, g0, rho: float = 1.0, c_s: float | None = None) -> QOperator:
    """Momentum-space H_I on the joint basis.

    ``g0`` is a constant or a LatticePotential (then g0/2 -> |U(q)|/L per mode).
    Scattering that leaves the electron window is dropped.  The phonon
    frequencies come from the Fock basis mode set; ``c_s`` if given must match it.
    """
    el, ph = joint.electrons, joint.phonons
    modes = ph.modes
    if c_s is not None and not np.isclose(c_s, modes.c_s, rtol=1e-12, atol=0):
        raise ValueError(f"c_s={c_s} does not match the phonon mode set (c_s={modes.c_s})")
    L = joint.length
    dph = ph.dim
    rows, cols, vals = [], [], []
    for qi, mode in enumerate(modes):
        amp = modes.amplitudes[qi]
        M = _half_coupling(g0, mode.q, L) * 1j * mode.q * amp
        if M == 0:
            continue
        # a_q on phonon states
        a_pairs = []
        for j, occ in enumerate(ph.states):
            nq = occ[qi]
            if nq == 0:
                continue
            target = occ.copy()
            target[qi] -= 1
            a_pairs.append((ph.index(target), j, np.sqrt(nq)))
        if not a_pairs:
            continue
        for ie, st in enumerate(el.states):
            for src in st:
                n_src, spin = el.orbitals[src]
                dest = el.orbital_index(n_src + mode.n, spin)
                if dest is None:
                    continue
                hopped = el.hop(st, dest, src)
                if hopped is None:
                    continue
                sign, new = hopped
                je = el.state_index(new)
                for i_to, i_from, amp_a in a_pairs:
                    rows.append(je * dph + i_to)
                    cols.append(ie * dph + i_from)
                    vals.append(sign * M * amp_a)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(joint.dim, joint.dim), dtype=complex)
    return QOperator(joint, (A + A.conj().T).tocsr())


def electron_energies(joint: JointBasis, m_star: float) -> np.ndarray:
    """Kinetic energy sum k^2/(2 m*) of each electron basis state."""
    el = joint.electrons
    e_orb = np.array([el.k(i) ** 2 / (2 * m_star) for i in range(len(el.orbitals))])
    return np.array([e_orb[list(s)].sum() for s in el.states])


def bare_hamiltonian(joint: JointBasis, m_star: float) -> QOperator:
    """H_0 = sum_k k^2/(2m*) n_k + sum_q omega_q n_q, diagonal in the joint basis."""
    e_el = electron_energies(joint, m_star)
    e_ph = np.real(free_hamiltonian(joint.phonons).matrix.diagonal())
    diag = (e_el[:, None] + e_ph[None, :]).ravel()
    return QOperator(joint, sp.diags(diag.astype(complex), format="csr"))


def momentum_quanta(joint: JointBasis) -> np.ndarray:
    """Total momentum of each joint state in units of 2 pi / L (an exact integer)."""
    el, ph = joint.electrons, joint.phonons
    p_el = np.array([sum(el.orbitals[o][0] for o in s) for s in el.states], dtype=np.int64)
    p_ph = ph.states @ np.array([m.n for m in ph.modes], dtype=np.int64)
    return (p_el[:, None] + p_ph[None, :]).ravel()


def total_momentum(joint: JointBasis) -> QOperator:
    """P_total = sum k n_k + sum q n_q."""
    p = momentum_quanta(joint) * (2 * np.pi / joint.length)
    return QOperator(joint, sp.diags(p.astype(complex), format="csr"))


def spin_labels(joint: JointBasis) -> np.ndarray:
    """Net spin (number up minus number down) of each joint state."""
    el = joint.electrons
    s = np.array([sum(1 if el.orbitals[o][1] == "up" else -1 for o in st) for st in el.states])
    return np.repeat(s, joint.phonons.dim)


def gaussian_delta(x, eta: float) -> np.ndarray:
    return np.exp(-0.5 * (np.asarray(x) / eta) ** 2) / (np.sqrt(2 * np.pi) * eta)


def final_state_couplings(joint: JointBasis, initial: int, H_I: QOperator, H_0: QOperator):
    """Indices, matrix elements <f|H_I|i> and energy differences E_f - E_i of states reached from ``initial``."""
    col = H_I.matrix[:, initial].tocoo()
    e0 = np.real(H_0.matrix.diagonal())
    return col.row, col.data, e0[col.row] - e0[initial]


def mean_level_spacing(energies: np.ndarray) -> float:
    e = np.sort(np.asarray(energies))
    gaps = np.diff(e)
    gaps = gaps[gaps > 1e-12]
    if len(gaps) == 0:
        raise ValueError("need at least two distinct final-state energies to define a level spacing")
    return float(np.mean(gaps))


def golden_rule_rate(joint: JointBasis, k_n: int, g0, eta: float | None = None, *, spin: str = "up",
                     occupation=None, m_star: float = 1.0, rho: float = 1.0) -> float:
    """Gamma = 2 pi sum_f |<f|H_I|i>|^2 delta_eta(E_f - E_i) from |k_n, spin; occupation>.

    delta_eta is a normalized Gaussian of width ``eta``; the default is twice
    the mean spacing of the connected final-state energies.
    """
    H_I = interaction_hamiltonian(joint, g0, rho)
    H_0 = bare_hamiltonian(joint, m_star)
    i = joint.state(k_n, spin, occupation)
    rows, M, dE = final_state_couplings(joint, i, H_I, H_0)
    if len(rows) == 0:
        return 0.0
    if eta is None:
        eta = 2 * mean_level_spacing(dE)
    if eta <= 0:
        raise ValueError("broadening eta must be positive")
    return float(2 * np.pi * np.sum(np.abs(M) ** 2 * gaussian_delta(dE, eta)))


def transition_probability(joint: JointBasis, k_n: int, g0, times, *, spin: str = "up",
                           occupation=None, m_star: float = 1.0, rho: float = 1.0) -> np.ndarray:
    """P(t) = 1 - |<i|e^{-iHt}|i>|^2 by exact sparse propagation on the joint basis."""
    H = bare_hamiltonian(joint, m_star) + interaction_hamiltonian(joint, g0, rho)
    i = joint.state(k_n, spin, occupation)
    psi0 = np.zeros(joint.dim, dtype=complex)
    psi0[i] = 1.0
    times = np.asarray(times, dtype=float)
    if times[0] != 0:
        times = np.concatenate([[0.0], times])
        drop_first = True
    else:
        drop_first = False
    # uniform spacing lets expm_multiply reuse one Krylov setup
    t = np.linspace(times[0], times[-1], len(times))
    if not np.allclose(t, times):
        raise ValueError("times must be uniformly spaced")
    states = spla.expm_multiply(-1j * H.matrix.tocsc(), psi0, start=t[0], stop=t[-1], num=len(t),
                                endpoint=True)
    surv = 1.0 - np.abs(states[:, i]) ** 2
    return surv[1:] if drop_first else surv


def rate_from_evolution(times, P, p_max: float = 0.1, t_min: float = 0.0) -> float:
    """Least-squares slope dP/dt over t >= t_min where P <= p_max."""
    times, P = np.asarray(times), np.asarray(P)
    sel = (times >= t_min) & (P <= p_max)
    if sel.sum() < 3:
        raise ValueError("fewer than 3 points inside the fitting window")
    return float(np.polyfit(times[sel], P[sel], 1)[0])


class NearDegeneracyWarning(UserWarning):
    pass


def second_order_shift(joint: JointBasis, k_n: int, g0, *, spin: str = "up", m_star: float = 1.0,
                       rho: float = 1.0) -> tuple[float, float]:
    """Rayleigh-Schroedinger shift sum |M|^2/(E_i - E_m) of |k; 0> and the smallest |E_i - E_m|."""
    H_I = interaction_hamiltonian(joint, g0, rho)
    H_0 = bare_hamiltonian(joint, m_star)
    i = joint.state(k_n, spin)
    rows, M, dE = final_state_couplings(joint, i, H_I, H_0)
    if len(rows) == 0:
        return 0.0, np.inf
    return float(np.sum(np.abs(M) ** 2 / (-dE))), float(np.min(np.abs(dE)))


def exact_shift_vs_pt(joint: JointBasis, k_n: int, g0, *, spin: str = "up", m_star: float = 1.0,
                      rho: float = 1.0, gap_factor: float = 10.0) -> tuple[float, float]:
    """Energy shift of |k; 0_ph> from full diagonalization and from second-order perturbation theory.

    The exact eigenvalue is the one whose eigenvector overlaps |k; 0> most.
    If any intermediate state lies within ``gap_factor * |M|`` of E_k the
    comparison is meaningless: a NearDegeneracyWarning is emitted and the
    perturbative value is returned as nan.
    """
    if joint.dim > DENSE_LIMIT:
        raise ValueError(f"joint dimension {joint.dim} exceeds dense limit {DENSE_LIMIT}")
    H_0 = bare_hamiltonian(joint, m_star)
    H_I = interaction_hamiltonian(joint, g0, rho)
    i = joint.state(k_n, spin)
    e0 = np.real(H_0.matrix.diagonal())
    w, v = np.linalg.eigh((H_0 + H_I).dense())
    j = int(np.argmax(np.abs(v[i]) ** 2))
    exact = float(w[j] - e0[i])
    pt2, gap = second_order_shift(joint, k_n, g0, spin=spin, m_star=m_star, rho=rho)
    rows, M, _ = final_state_couplings(joint, i, H_I, H_0)
    mmax = float(np.max(np.abs(M))) if len(M) else 0.0
    if mmax > 0 and gap < gap_factor * mmax:
        warnings.warn(f"near degeneracy: gap {gap:.3g} < {gap_factor} * |M| = {gap_factor * mmax:.3g}",
                      NearDegeneracyWarning, stacklevel=2)
        return exact, float("nan")
    return exact, pt2
