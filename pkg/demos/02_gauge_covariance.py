"""Local translations act like a gauge symmetry on the electron wavefunction.

Run with ``python3 demos/02_gauge_covariance.py``.
"""

# %% Build a smooth spinor, a strain potential and a position-dependent displacement.
import numpy as np

from elastogauge.gauge import (
    CouplingConstants,
    ElasticTensorField,
    GaugeParameter,
    covariance_residual,
    gauge_transform,
)
from elastogauge.lattice import ScalarField, SpinorField, make_grid

grid = make_grid(256, 2 * np.pi)
x = grid.x
c = CouplingConstants(g=0.4, c_s=2.0)
psi = SpinorField(grid, np.stack([np.exp(2j * x) * (1 + 0.3 * np.cos(x)), 0.5 * np.exp(-1j * x)], axis=1))
psi = psi.normalized()
R = ElasticTensorField.from_arrays(grid, 0.0, 0.2 * np.sin(x), 0.1 + 0.3 * np.cos(2 * x))
a = GaugeParameter.spatial(ScalarField(grid, np.sin(x) + 0.5 * np.cos(3 * x)))

# %% The covariant derivative of the translated field equals the translated covariant derivative
# up to second order in the displacement size eps.
eps = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3])
res = np.array([covariance_residual(psi, R, a, e, c) for e in eps])
for e, r in zip(eps, res):
    print(f"eps = {e:8.2e}   residual = {r:.3e}")
print("log-log slope:", np.polyfit(np.log(eps), np.log(res), 1)[0])

# %% The potential itself shifts by the symmetrized gradient of the displacement.
R2 = gauge_transform(R, a.scaled(1e-2), c.c_s)
print("max |R_11' - R_11| :", np.max(np.abs(R2.R11.values - R.R11.values)))
