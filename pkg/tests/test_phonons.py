import itertools

import numpy as np
import pytest

from elastogauge.lattice import make_grid
from elastogauge.phonons import (
    build_fock_basis,
    coherent_state,
    commutator,
    field_gradient_operator,
    field_operator,
    free_hamiltonian,
    heisenberg,
    ladder_operator,
    mode_spectrum,
)


@pytest.fixture
def grid2pi():
    return make_grid(64, 2 * np.pi)


def test_mode_spectrum_examples(grid2pi):
    [m] = mode_spectrum(grid2pi, 1.0, [3]).modes
    assert (m.q, m.omega) == pytest.approx((3.0, 3.0))
    [m] = mode_spectrum(grid2pi, 2.0, [-1]).modes
    assert (m.q, m.omega) == pytest.approx((-1.0, 2.0))


def test_mode_spectrum_sorted_and_positive(grid2pi):
    ms = mode_spectrum(grid2pi, 1.5, [4, -2, 1])
    assert list(ms.q) == sorted(ms.q)
    assert np.all(ms.omega > 0)


@pytest.mark.parametrize("bad", [[0], [], [32], [1, 1]])
def test_mode_spectrum_rejects(grid2pi, bad):
    with pytest.raises(ValueError):
        mode_spectrum(grid2pi, 1.0, bad)


def brute_force_dim(n_modes, n_max, N_max=None):
    return sum(1 for occ in itertools.product(range(n_max + 1), repeat=n_modes)
               if N_max is None or sum(occ) <= N_max)


@pytest.mark.parametrize("modes, n_max, N_max, expected", [
    ([1], 2, None, 3),
    ([1, 2], 1, None, 4),
    ([1, 2], 2, 2, 6),
])
def test_fock_dimensions(grid2pi, modes, n_max, N_max, expected):
    basis = build_fock_basis(mode_spectrum(grid2pi, 1.0, modes), n_max, N_max)
    assert basis.dim == expected == brute_force_dim(len(modes), n_max, N_max)


@pytest.mark.parametrize("m, n_max, N_max", [(3, 3, None), (4, 3, 5), (3, 2, 0)])
def test_fock_enumeration_matches_brute_force(grid2pi, m, n_max, N_max):
    basis = build_fock_basis(mode_spectrum(grid2pi, 1.0, range(1, m + 1)), n_max, N_max)
    expected = [occ for occ in itertools.product(range(n_max + 1), repeat=m)
                if N_max is None or sum(occ) <= N_max]
    assert [tuple(s) for s in basis.states.tolist()] == expected
    for i, occ in enumerate(expected):
        assert basis.index(occ) == i


def test_fock_dimension_limit(grid2pi):
    ms = mode_spectrum(grid2pi, 1.0, range(1, 9))
    with pytest.raises(ValueError, match="exceeds"):
        build_fock_basis(ms, 5)
    with pytest.raises(ValueError, match="exceeds"):
        build_fock_basis(ms, 5, 8, max_dim=100)
    with pytest.raises(ValueError):
        build_fock_basis(ms, 0)


def test_ladder_matrix_elements(grid2pi):
    basis = build_fock_basis(mode_spectrum(grid2pi, 1.0, [1]), 5)
    a = ladder_operator(basis, 0, "annihilate")
    ad = ladder_operator(basis, 0, "create")
    vac = basis.basis_vector([0])
    assert np.all(a @ vac == 0)
    np.testing.assert_array_equal(ad @ vac, basis.basis_vector([1]))
    for n in range(1, 6):
        assert a.element(basis.index([n - 1]), basis.index([n])) == pytest.approx(np.sqrt(n), abs=1e-15)
    # truncation: creation at the cutoff gives zero
    assert np.all(ad @ basis.basis_vector([5]) == 0)
    with pytest.raises(KeyError):
        ladder_operator(basis, 1)


def test_ccr_on_protected_subspace(grid2pi):
    basis = build_fock_basis(mode_spectrum(grid2pi, 1.0, [1, -2, 3]), 3, 5)
    prot = basis.protected()
    for i, j in itertools.product(range(3), repeat=2):
        a = ladder_operator(basis, i)
        ad = ladder_operator(basis, j, "create")
        C = commutator(a, ad).matrix.toarray()[np.ix_(prot, prot)]
        np.testing.assert_allclose(C, np.eye(prot.sum()) * (i == j), atol=1e-12)
        C = commutator(a, ladder_operator(basis, j)).matrix.toarray()
        assert np.max(np.abs(C)) <= 1e-12


def test_ccr_fails_on_cutoff_rows(grid2pi):
    basis = build_fock_basis(mode_spectrum(grid2pi, 1.0, [1]), 3)
    C = commutator(ladder_operator(basis, 0), ladder_operator(basis, 0, "create")).dense()
    assert C[3, 3] == pytest.approx(-3.0)


def test_free_hamiltonian_spectrum(grid2pi):
    ms = mode_spectrum(grid2pi, 1.3, [1, 2])
    basis = build_fock_basis(ms, 3)
    H = free_hamiltonian(basis)
    assert H.is_hermitian()
    w = ms.omega
    assert H.expectation(basis.basis_vector([0, 0])) == 0
    assert H.expectation(basis.basis_vector([1, 0])) == pytest.approx(w[0])
    assert H.expectation(basis.basis_vector([0, 2])) == pytest.approx(2 * w[1])
    for i in range(2):
        n_op = basis.number_operator(i)
        assert commutator(H, type(H)(basis, n_op)).matrix.nnz == 0


def test_field_operator_vacuum_elements():
    grid = make_grid(32, 3.0)
    ms = mode_spectrum(grid, 1.7, [-2, -1, 1, 3], rho=2.5)
    basis = build_fock_basis(ms, 2, 2)
    vac = basis.basis_vector([0] * 4)
    amps = np.sqrt(1 / (2 * grid.length * 2.5 * ms.omega))
    for x, t in [(0.0, 0.0), (0.7, 0.0), (1.3, 2.1)]:
        phi = field_operator(basis, x, t)
        assert phi.is_hermitian()
        assert abs(phi.expectation(vac)) < 1e-15
    x = 0.9
    phi = field_operator(basis, x, 0.0)
    for i, m in enumerate(ms):
        occ = [0] * 4
        occ[i] = 1
        elem = phi.element(basis.index(occ), basis.vacuum_index())
        assert elem == pytest.approx(amps[i] * np.exp(-1j * m.q * x), abs=1e-14)
    fluct = np.vdot(vac, phi.matrix @ (phi.matrix @ vac)).real
    assert fluct == pytest.approx(np.sum(1 / (2 * grid.length * 2.5 * ms.omega)), rel=1e-13)


def test_field_gradient_matches_finite_difference(grid2pi):
    basis = build_fock_basis(mode_spectrum(grid2pi, 1.0, [1, -2]), 2)
    h = 1e-5
    fd = (field_operator(basis, 0.4 + h).dense() - field_operator(basis, 0.4 - h).dense()) / (2 * h)
    np.testing.assert_allclose(field_gradient_operator(basis, 0.4).dense(), fd, atol=1e-9)


def test_heisenberg_phase(grid2pi):
    ms = mode_spectrum(grid2pi, 1.0, [1, 2])
    basis = build_fock_basis(ms, 4)
    H = free_hamiltonian(basis)
    prot = basis.protected()
    for i, m in enumerate(ms):
        a = ladder_operator(basis, i)
        for t in (0.3, 2.0):
            lhs = heisenberg(a, H, t)
            rhs = np.exp(-1j * m.omega * t) * a.dense()
            np.testing.assert_allclose(lhs[np.ix_(prot, prot)], rhs[np.ix_(prot, prot)], atol=1e-10)


def test_field_time_dependence_is_heisenberg_evolution(grid2pi):
    basis = build_fock_basis(mode_spectrum(grid2pi, 1.0, [1, -1]), 3)
    H = free_hamiltonian(basis)
    t, x = 0.8, 1.1
    lhs = heisenberg(field_operator(basis, x, 0.0), H, t)
    np.testing.assert_allclose(lhs, field_operator(basis, x, t).dense(), atol=1e-12)


def test_coherent_state_expectation(grid2pi):
    basis = build_fock_basis(mode_spectrum(grid2pi, 1.0, [2]), 14)
    alpha = 0.7 - 0.4j
    psi = coherent_state(basis, 0, alpha)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    a = ladder_operator(basis, 0)
    assert a.expectation(psi) == pytest.approx(alpha, abs=1e-7)
