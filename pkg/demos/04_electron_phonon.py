"""An electron emitting phonons: golden rule vs exact evolution, and the polaron-like shift.

Run with ``python3 demos/04_electron_phonon.py`` (about 10 s).
"""

# %% Emission rate: a fast electron in a long ring, one-phonon sector.
import numpy as np

from elastogauge import eph, phonons
from elastogauge.lattice import make_grid

L, kn = 200.0, 95
grid = make_grid(4096, L)
ms = phonons.mode_spectrum(grid, 1.0, range(32, 223))
joint = eph.JointBasis(eph.ElectronBasis.window(L, range(kn - 222, kn + 1), spins=("up",)),
                       phonons.build_fock_basis(ms, 1, 1))
print("joint dimension:", joint.dim)
g0 = 0.09
gamma = eph.golden_rule_rate(joint, kn, g0)
times = np.linspace(0, 40, 161)
P = eph.transition_probability(joint, kn, g0, times)
fit = eph.rate_from_evolution(times, P, p_max=0.1, t_min=5.0)
print(f"golden rule rate {gamma:.4e}, exact evolution slope {fit:.4e}, ratio {fit / gamma:.3f}")
print("depletion of the initial state at t = 40:", P[-1])

# %% Energy shift: exact diagonalization approaches second-order perturbation theory.
small_grid = make_grid(64, 2 * np.pi)
fb = phonons.build_fock_basis(phonons.mode_spectrum(small_grid, 1.0, [-3, -2, -1, 1, 2, 3]), 2, 2)
joint = eph.JointBasis(eph.ElectronBasis.window(2 * np.pi, range(-6, 7), spins=("up",)), fb)
for g0 in (0.16, 0.08, 0.04, 0.02):
    ex, pt = eph.exact_shift_vs_pt(joint, 1, g0)
    print(f"g0 = {g0:5.2f}  exact {ex:+.6e}  second order {pt:+.6e}  relative gap {abs(ex - pt) / abs(pt):.2e}")
