"""Strain-assisted spin-orbit coupling: spin currents and selection rules.

Run with ``python3 demos/05_spin_strain.py``.
"""

# %% A spin-up plane wave carries spin current J_zx; adding spin-down moving backwards gives a pure spin current.
import numpy as np

from elastogauge.lattice import SpinorField, make_grid
from elastogauge.spinstrain import (
    ElectricFieldConfig,
    SpinOrbitParams,
    StrainTensor3,
    charge_current,
    matrix_element_table,
    spin_current,
)

grid = make_grid(64, 2 * np.pi)
params = SpinOrbitParams(g=0.5, m=1.0, mu_B=1.0)
up = SpinorField.plane_wave(grid, 2, (1, 0), normalized=False)
down = SpinorField.plane_wave(grid, -2, (0, 1), normalized=False)
mix = SpinorField(grid, (up.values + down.values) / np.sqrt(2))
print("J_zx (up, +k)            :", spin_current(up, params)[0, 2, 0])
print("J_zx (up +k, down -k)    :", spin_current(mix, params)[0, 2, 0])
print("charge current of mixture:", charge_current(mix, params)[0])

# %% With E along z, strain only flips spins: the sigma_z-diagonal block vanishes.
E = ElectricFieldConfig.uniform(grid, [0, 0, 1.0])
R = StrainTensor3.from_components(xx=0.3, xy=0.2)
H = matrix_element_table(grid, [-1, 0, 1], R, E, params)
np.set_printoptions(precision=3, suppress=True, linewidth=120)
print("matrix elements, order (n, spin) = (-1,up),(-1,dn),(0,up),(0,dn),(1,up),(1,dn):")
print(H.real)
