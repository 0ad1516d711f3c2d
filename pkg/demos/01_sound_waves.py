"""Sound waves on a periodic lattice: dispersion and energy bookkeeping.

Run with ``python3 demos/01_sound_waves.py``.
"""

# %% A standing wave of mode n oscillates at omega = c_s |q|.
import numpy as np

from elastogauge.elastodynamics import (
    ElasticState1D,
    EvolveParams,
    evolve_leapfrog,
    leapfrog_frequency,
    measure_dispersion,
    shadow_energy,
    total_energy,
)
from elastogauge.lattice import make_grid

c_s = 1.5
grid = make_grid(128, 2 * np.pi)
modes = [1, 2, 4, 8, 16, 32]
phi = sum(np.sin(n * grid.x) / n for n in modes)
state = ElasticState1D.from_velocity(grid, phi, 0.0, 0.0, c_s)
params = EvolveParams.from_courant(grid, courant=0.5, n_steps=6000, c_s=c_s, save_every=2)
traj = evolve_leapfrog(state, params)

# %% Measure omega(q) from the time series of each Fourier amplitude.
print(f"{'n':>3} {'q dx':>6} {'measured':>10} {'c_s|q|':>8} {'scheme':>8}")
for (q, w), n in zip(measure_dispersion(traj, modes), modes):
    print(f"{n:3d} {q * grid.dx:6.3f} {w:10.5f} {c_s * q:8.4f} {leapfrog_frequency(grid, q, c_s, params.dt):8.4f}")
# Long waves follow the continuum line; short waves bend below it, exactly as the scheme predicts.

# %% Energy: the physical energy oscillates slightly, the shadow energy is conserved to roundoff.
E = np.array([total_energy(traj.state(i)) for i in range(0, len(traj), 300)])
S = np.array([shadow_energy(traj.state(i), params.dt) for i in range(0, len(traj), 300)])
print("max |E/E0 - 1|      :", np.max(np.abs(E / E[0] - 1)))
print("max |S/S0 - 1|      :", np.max(np.abs(S / S[0] - 1)))
# The wobble in E is of order (omega dt)^2 and is dominated by the short mode n = 32; it is bounded,
# not a drift. For a single long wave on a fine grid it drops below 1e-6.
