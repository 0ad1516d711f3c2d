"""Quantized acoustic modes: mode spectrum, truncated Fock space, ladder operators, field operator."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .lattice import Grid1D

DEFAULT_MAX_DIM = 200_000
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class Mode:
    n: int
    q: float
    omega: float


@dataclass(frozen=True)
class ModeSet:
    modes: tuple[Mode, ...]
    length: float
    c_s: float
    rho: float = 1.0

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    @property
    def q(self) -> np.ndarray:
        return np.array([m.q for m in self.modes])

    @property
    def omega(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes])

    @property
    def amplitudes(self) -> np.ndarray:
        """Zero-point amplitude sqrt(1/(2 L rho omega_q)) of each mode."""
        return np.sqrt(1.0 / (2 * self.length * self.rho * self.omega))

    def index_of(self, n: int) -> int:
        for i, m in enumerate(self.modes):
            if m.n == n:
                return i
        raise KeyError(f"mode n={n} not in mode set")


def mode_spectrum(grid: Grid1D, c_s: float, n_list, rho: float = 1.0) -> ModeSet:
    """Acoustic modes q_n = 2 pi n / L with omega_n = c_s |q_n|; the zero mode is rejected."""
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise ValueError("n_list is empty")
    if c_s <= 0 or rho <= 0:
        raise ValueError("c_s and rho must be positive")
    if len(set(n_list)) != len(n_list):
        raise ValueError("duplicate mode numbers")
    for n in n_list:
        if n == 0:
            raise ValueError("zero mode n=0 has omega=0 and a divergent field amplitude")
        if abs(n) >= grid.n_sites / 2:
            raise ValueError(f"|n|={abs(n)} must be below n_sites/2={grid.n_sites / 2}")
    modes = []
    for n in sorted(n_list):
        q = 2 * np.pi * n / grid.length
        modes.append(Mode(n, q, c_s * abs(q)))
    return ModeSet(tuple(modes), grid.length, c_s, rho)


@dataclass(frozen=True, eq=False)
class FockBasis:
    """Occupation vectors for ``modes`` with n_q <= n_max and optionally sum n_q <= N_max."""

    modes: ModeSet
    n_max: int
    N_max: int | None
    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.states.setflags(write=False)
        lookup = {tuple(s): i for i, s in enumerate(self.states.tolist())}
        object.__setattr__(self, "_lookup", lookup)

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, occupation) -> int:
        return self._lookup[tuple(int(v) for v in occupation)]

    def contains(self, occupation) -> bool:
        return tuple(int(v) for v in occupation) in self._lookup

    def vacuum_index(self) -> int:
        return self.index([0] * len(self.modes))

    def basis_vector(self, occupation) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(occupation)] = 1.0
        return v

    def protected(self) -> np.ndarray:
        """Mask of states where one more quantum in any mode stays inside the basis."""
        occ = self.states
        ok = np.all(occ <= self.n_max - 1, axis=1)
        if self.N_max is not None:
            ok &= occ.sum(axis=1) <= self.N_max - 1
        return ok

    def number_operator(self, mode: int) -> sp.csr_matrix:
        return sp.diags(self.states[:, mode].astype(complex), format="csr")


def build_fock_basis(modes: ModeSet, n_max: int, N_max: int | None = None,
                     max_dim: int = DEFAULT_MAX_DIM) -> FockBasis:
    """Enumerate occupation vectors in lexicographic order."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if N_max is not None and N_max < 0:
        raise ValueError("N_max must be non-negative")
    m = len(modes)
    if N_max is None:
        dim = (n_max + 1) ** m
        if dim > max_dim:
            raise ValueError(f"Fock dimension {dim} exceeds limit {max_dim}")
        states = np.array(list(itertools.product(range(n_max + 1), repeat=m)), dtype=int)
    else:
        states = np.array(list(_capped(m, n_max, N_max, max_dim)), dtype=int).reshape(-1, m)
    return FockBasis(modes, n_max, N_max, states)


def _capped(m, n_max, N_max, max_dim):
    count = 0

    def rec(prefix, left):
        nonlocal count
        if len(prefix) == m:
            count += 1
            if count > max_dim:
                raise ValueError(f"Fock dimension exceeds limit {max_dim}")
            yield tuple(prefix)
            return
        for k in range(min(n_max, left) + 1):
            yield from rec(prefix + [k], left - k)

    yield from rec([], N_max)


@dataclass(frozen=True, eq=False)
class QOperator:
    """Sparse operator on a basis (anything exposing ``dim``)."""

    basis: object
    matrix: sp.csr_matrix

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"matrix shape {m.shape} does not match basis dimension {self.basis.dim}")
        m.sort_indices()
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_error() < tol

    def dense(self) -> np.ndarray:
        if self.dim > DENSE_LIMIT:
            raise ValueError(f"dense conversion refused above dimension {DENSE_LIMIT}")
        return self.matrix.toarray()

    def dagger(self) -> QOperator:
        return QOperator(self.basis, self.matrix.conj().T.tocsr())

    def expectation(self, state: np.ndarray) -> complex:
        return complex(np.vdot(state, self.matrix @ state))

    def element(self, bra: int, ket: int) -> complex:
        return complex(self.matrix[bra, ket])

    def __matmul__(self, other):
        if isinstance(other, QOperator):
            return QOperator(self.basis, self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other):
        return QOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other):
        return QOperator(self.basis, self.matrix - other.matrix)

    def __mul__(self, c):
        return QOperator(self.basis, self.matrix * c)

    __rmul__ = __mul__


def commutator(A: QOperator, B: QOperator) -> QOperator:
    return A @ B - B @ A


def ladder_operator(basis: FockBasis, mode: int, kind: str = "annihilate") -> QOperator:
    """a_q or a_q^dagger for the mode at position ``mode`` in the mode set.

    Creation out of the truncated space (n = n_max or total = N_max) maps to zero.
    """
    if not 0 <= mode < len(basis.modes):
        raise KeyError(f"unknown mode index {mode}")
    if kind not in ("create", "annihilate"):
        raise ValueError("kind must be 'create' or 'annihilate'")
    step = 1 if kind == "create" else -1
    rows, cols, vals = [], [], []
    for j, occ in enumerate(basis.states):
        n = occ[mode]
        target = occ.copy()
        target[mode] = n + step
        if target[mode] < 0 or not basis.contains(target):
            continue
        rows.append(basis.index(target))
        cols.append(j)
        vals.append(np.sqrt(n + 1) if step == 1 else np.sqrt(n))
    m = sp.csr_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim), dtype=complex)
    return QOperator(basis, m)


def free_hamiltonian(basis: FockBasis) -> QOperator:
    """sum_q omega_q a_q^dagger a_q (normal ordered, no zero-point term)."""
    energies = basis.states @ basis.modes.omega
    return QOperator(basis, sp.diags(energies.astype(complex), format="csr"))


def field_operator(basis: FockBasis, x: float, t: float = 0.0) -> QOperator:
    """phi(x, t) = sum_q A_q [a_q e^{i(qx - w t)} + h.c.], A_q = sqrt(1/(2 L rho w_q))."""
    modes = basis.modes
    total = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for i, (m, amp) in enumerate(zip(modes, modes.amplitudes)):
        a = ladder_operator(basis, i, "annihilate").matrix
        phase = np.exp(1j * (m.q * x - m.omega * t))
        total = total + amp * (phase * a + np.conj(phase) * a.conj().T)
    return QOperator(basis, total)


def field_gradient_operator(basis: FockBasis, x: float, t: float = 0.0) -> QOperator:
    """d_x phi(x, t), differentiated analytically term by term."""
    modes = basis.modes
    total = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for i, (m, amp) in enumerate(zip(modes, modes.amplitudes)):
        a = ladder_operator(basis, i, "annihilate").matrix
        phase = np.exp(1j * (m.q * x - m.omega * t))
        total = total + amp * (1j * m.q * phase * a - 1j * m.q * np.conj(phase) * a.conj().T)
    return QOperator(basis, total)


def coherent_state(basis: FockBasis, mode: int, alpha: complex) -> np.ndarray:
    """Truncated coherent state of one mode (others in vacuum), renormalized after truncation."""
    psi = np.zeros(basis.dim, dtype=complex)
    occ = np.zeros(len(basis.modes), dtype=int)
    log_fact = 0.0
    for n in range(basis.n_max + 1):
        occ[mode] = n
        if not basis.contains(occ):
            break
        if n > 0:
            log_fact += np.log(n)
        psi[basis.index(occ)] = alpha**n * np.exp(-0.5 * log_fact)
    return psi / np.linalg.norm(psi)


def evolve_dense(H: QOperator, state: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) state by dense exponentiation (desk-scale only)."""
    return scipy.linalg.expm(-1j * t * H.dense()) @ state


def heisenberg(op: QOperator, H: QOperator, t: float) -> np.ndarray:
    """e^{iHt} A e^{-iHt} as a dense matrix."""
    U = scipy.linalg.expm(-1j * t * H.dense())
    return U.conj().T @ op.dense() @ U
