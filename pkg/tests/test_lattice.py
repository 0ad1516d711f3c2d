import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from elastogauge.lattice import (
    ScalarField,
    SpinorField,
    central_derivative,
    dft_modes,
    grid_norm,
    integrate,
    inverse_dft,
    make_grid,
    stencil_symbol,
)

from conftest import loglog_slope

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_make_grid_spacing():
    g = make_grid(8, 8.0)
    assert g.dx == 1.0
    assert g.x[3] == 3.0
    assert make_grid(4, 2 * np.pi).dx == pytest.approx(np.pi / 2, abs=0)


@pytest.mark.parametrize("n, L", [(3, 1.0), (8, 0.0), (8, -1.0), (0, 1.0)])
def test_make_grid_rejects_bad_discretization(n, L):
    with pytest.raises(ValueError):
        make_grid(n, L)


def test_fields_validate_shape_and_finiteness(grid):
    with pytest.raises(ValueError):
        ScalarField(grid, np.zeros(grid.n_sites + 1))
    with pytest.raises(ValueError):
        ScalarField(grid, np.full(grid.n_sites, np.nan))
    with pytest.raises(ValueError):
        SpinorField(grid, np.zeros((grid.n_sites, 3)))


def test_fields_are_immutable(grid):
    f = ScalarField(grid, np.ones(grid.n_sites))
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_derivative_of_constant_is_zero(grid):
    f = ScalarField(grid, np.full(grid.n_sites, 3.7))
    assert np.all(central_derivative(f).values == 0.0)
    s = SpinorField(grid, np.full((grid.n_sites, 2), 1 - 2j))
    assert np.all(central_derivative(s).values == 0.0)


def test_derivative_of_sine_is_second_order(grid):
    L = grid.length
    f = ScalarField.from_function(grid, lambda x: np.sin(2 * np.pi * x / L))
    exact = 2 * np.pi / L * np.cos(2 * np.pi * grid.x / L)
    err = np.max(np.abs(central_derivative(f).values - exact))
    # truncation term k^3 dx^2 / 6
    k = 2 * np.pi / L
    assert err <= 1.01 * k**3 * grid.dx**2 / 6


@pytest.mark.parametrize("n", [1, 3, -5, 20])
def test_plane_wave_stencil_eigenvalue(grid, n):
    psi = SpinorField.plane_wave(grid, n, (0.6, 0.8j), normalized=False)
    q = 2 * np.pi * n / grid.length
    expected = 1j * np.sin(q * grid.dx) / grid.dx * psi.values
    np.testing.assert_allclose(central_derivative(psi).values, expected, atol=1e-12)
    assert stencil_symbol(grid, q) == pytest.approx(1j * np.sin(q * grid.dx) / grid.dx)


def test_derivative_convergence_order():
    errs, dxs = [], []
    for n in (32, 64, 128, 256):
        g = make_grid(n, 2 * np.pi)
        f = ScalarField.from_function(g, lambda x: np.sin(3 * x))
        errs.append(np.max(np.abs(central_derivative(f).values - 3 * np.cos(3 * g.x))))
        dxs.append(g.dx)
    assert abs(loglog_slope(dxs, errs) - 2.0) <= 0.1


def test_dft_constant_has_only_zero_mode(grid):
    modes = dft_modes(ScalarField(grid, np.full(grid.n_sites, 2.5)))
    for q, c in modes:
        if q == 0:
            assert c == pytest.approx(2.5)
        else:
            assert abs(c) < 1e-12


def test_dft_single_sine_mode(grid):
    q1 = 2 * np.pi / grid.length
    modes = dict(dft_modes(ScalarField(grid, np.sin(q1 * grid.x))))
    assert abs(modes[q1]) == pytest.approx(0.5, abs=1e-12)
    assert abs(modes[-q1]) == pytest.approx(0.5, abs=1e-12)
    others = [abs(c) for q, c in modes.items() if abs(abs(q) - q1) > 1e-9]
    assert max(others) < 1e-12


def test_dft_mode_range_and_order():
    g = make_grid(8, 2 * np.pi)
    qs = [q for q, _ in dft_modes(ScalarField.zeros(g))]
    assert qs == [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]


@settings(max_examples=50, deadline=None)
@given(arrays(float, 24, elements=finite))
def test_dft_roundtrip_and_parseval(values):
    g = make_grid(24, 3.0)
    f = ScalarField(g, values)
    modes = dft_modes(f)
    np.testing.assert_allclose(inverse_dft(g, modes).real, values, atol=1e-12)
    lhs = np.sum(values**2) * g.dx
    rhs = g.length * sum(abs(c) ** 2 for _, c in modes)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_integrate_examples():
    g = make_grid(50, 7.0)
    assert integrate(ScalarField(g, np.full(50, 1.5))) == pytest.approx(10.5, abs=1e-12)
    assert abs(integrate(ScalarField.from_function(g, lambda x: np.sin(2 * np.pi * x / 7.0)))) < 1e-12
    sin2 = integrate(ScalarField.from_function(g, lambda x: np.sin(2 * np.pi * x / 7.0) ** 2))
    assert sin2 == pytest.approx(3.5, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(arrays(float, 16, elements=finite))
def test_integral_of_derivative_vanishes(values):
    g = make_grid(16, 2.0)
    assert abs(integrate(central_derivative(ScalarField(g, values)))) < 1e-12


def test_plane_wave_normalization(grid):
    psi = SpinorField.plane_wave(grid, 2, (1.0, 1.0j))
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    assert grid_norm(psi.values, grid.dx) == pytest.approx(1.0, abs=1e-12)
