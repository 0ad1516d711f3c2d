"""Numerical laboratory for elasticity as a gauge theory of local translations.

Modules:

- ``lattice``: periodic 1D grids, fields, central differences, DFT, quadrature
- ``gauge``: local translations, covariant derivatives, gauge transforms, field strength
- ``elastodynamics``: gauge-fixed wave dynamics, energy, leapfrog, dispersion
- ``phonons``: mode spectrum, truncated Fock space, ladder and field operators
- ``eph``: electron-phonon interaction, golden-rule rates, exact diagonalization
- ``spinstrain``: spin currents, strain-spin-current coupling, spin relaxation toy
- ``runner`` / ``cli``: seeded experiments with CSV/JSON output
"""

from .lattice import (
    Grid1D,
    ScalarField,
    SpinorField,
    central_derivative,
    dft_modes,
    integrate,
    make_grid,
)

__version__ = "0.1.0"

__all__ = [
    "Grid1D",
    "ScalarField",
    "SpinorField",
    "central_derivative",
    "dft_modes",
    "integrate",
    "make_grid",
]
