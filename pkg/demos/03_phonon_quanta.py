"""Quantized sound: Fock space, ladder operators and the classical limit.

Run with ``python3 demos/03_phonon_quanta.py``.
"""

# %% Two acoustic modes, at most three quanta each.
import numpy as np

from elastogauge import phonons
from elastogauge.lattice import make_grid

grid = make_grid(64, 2 * np.pi)
ms = phonons.mode_spectrum(grid, c_s=1.0, n_list=[1, 2], rho=1.0)
basis = phonons.build_fock_basis(ms, n_max=3)
print("dimension:", basis.dim, " protected states:", int(basis.protected().sum()))

# %% [a, a^dagger] = 1 holds on states that cannot be pushed past the cutoff.
a = phonons.ladder_operator(basis, 0, "annihilate")
ad = phonons.ladder_operator(basis, 0, "create")
C = phonons.commutator(a, ad).dense()
prot = basis.protected()
print("max |[a, a+] - 1| on protected states:", np.max(np.abs(C[np.ix_(prot, prot)] - np.eye(prot.sum()))))
print("at the cutoff edge the commutator is  :", C[~prot][:, ~prot].diagonal().real)

# %% The free Hamiltonian is diagonal with energies sum_q omega_q n_q.
H = phonons.free_hamiltonian(basis)
print("lowest levels:", np.round(np.sort(np.linalg.eigvalsh(H.dense()))[:6], 6))

# %% A coherent state follows the classical standing/traveling wave.
big = phonons.build_fock_basis(phonons.mode_spectrum(grid, 1.0, [1]), n_max=12)
Hb = phonons.free_hamiltonian(big)
psi0 = phonons.coherent_state(big, 0, 0.8 - 0.5j)
for t in np.linspace(0, 2 * np.pi, 5):
    psi = phonons.evolve_dense(Hb, psi0, t)
    val = phonons.field_operator(big, 0.3, 0.0).expectation(psi).real
    amp = big.modes.amplitudes[0]
    classical = 2 * amp * np.real((0.8 - 0.5j) * np.exp(1j * (0.3 - t)))
    print(f"t = {t:5.2f}  <phi(0.3)> = {val:+.6f}   classical = {classical:+.6f}")
