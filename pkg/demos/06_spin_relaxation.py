"""Spin relaxation from a fluctuating strain field.

Run with ``python3 demos/06_spin_relaxation.py`` (a few seconds).
"""

# %% Ornstein-Uhlenbeck strain noise drives transverse fields; <sigma_z> decays exponentially.
import numpy as np

from elastogauge.spinstrain import RelaxationParams, golden_rule_relaxation_rate, relaxation_toy

p = RelaxationParams(coupling=0.2, n_steps=300, n_realizations=2000, seed=1)
curve = relaxation_toy(p)
for i in range(0, len(curve.t), 50):
    print(f"t = {curve.t[i]:5.1f}  <sz> = {curve.sz_mean[i]:.4f} +- {curve.sz_stderr[i]:.4f}")
print(f"fitted rate {curve.rate:.4f}, weak-coupling prediction {golden_rule_relaxation_rate(p):.4f}")

# %% The rate scales as the square of the coupling.
lams, rates = [0.2, 0.1, 0.05], []
for lam in lams:
    steps = int(300 * (0.2 / lam) ** 2)
    rates.append(relaxation_toy(RelaxationParams(coupling=lam, n_steps=steps, n_realizations=2000, seed=1)).rate)
print("rates:", np.round(rates, 5), " slope:", np.polyfit(np.log(lams), np.log(rates), 1)[0])

# %% No electric field (or no coupling): nothing relaxes.
print("E = 0 ->", relaxation_toy(RelaxationParams(coupling=0.2, E=(0, 0, 0), n_steps=100)).sz_mean[-1])
