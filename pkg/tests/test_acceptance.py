"""Acceptance suite: one check per acceptance criterion, each printing a PASS/FAIL line.

Run with pytest (the lines appear in the terminal summary) or directly::

    python3 tests/test_acceptance.py
"""

import time
import warnings

import numpy as np
import pytest

from elastogauge import phonons
from elastogauge.eph import (
    ElectronBasis,
    JointBasis,
    bare_hamiltonian,
    exact_shift_vs_pt,
    interaction_hamiltonian,
    total_momentum,
)
from elastogauge.elastodynamics import (
    ElasticState1D,
    EvolveParams,
    evolve_leapfrog,
    leapfrog_frequency,
    shadow_energy,
    total_energy,
)
from elastogauge.lattice import SpinorField, make_grid
from elastogauge.runner import EXPERIMENTS, RunConfig, emit_report, run_experiment
from elastogauge.spinstrain import (
    ElectricFieldConfig,
    RelaxationParams,
    SpinOrbitParams,
    StrainTensor3,
    covariant_spin_orbit_density,
    matrix_element_table,
    relaxation_toy,
    spin_current,
    spin_orbit_density,
    strain_spin_coupling_bruteforce,
    strain_spin_coupling_density,
)

RESULTS: dict[int, str] = {}


def record(number, title, checks, elapsed, limit=None):
    """Store one summary line; ``checks`` maps a label to (passed, detail)."""
    ok = all(passed for passed, _ in checks.values())
    if limit is not None:
        ok = ok and elapsed < limit
    detail = "; ".join(f"{k}={v}" for k, (_, v) in checks.items())
    budget = f" (limit {limit:g} s)" if limit is not None else ""
    RESULTS[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}; {elapsed:.1f} s{budget}"
    print(RESULTS[number])
    failed = [k for k, (passed, _) in checks.items() if not passed]
    assert not failed, f"criterion {number} failed: {failed}"
    assert limit is None or elapsed < limit, f"criterion {number} exceeded {limit} s"


def run(cfg):
    return run_experiment(RunConfig.from_dict(cfg))


def test_criterion_1_dispersion():
    t0 = time.perf_counter()
    checks = {}
    for c_s in (1.0, 2.0):
        report = run({"experiment": "dispersion", "grid": {"n_sites": 128, "length": 2 * np.pi},
                      "constants": {"c_s": c_s}, "params": {"modes": list(range(1, 11)), "kdx_max": 0.3}})
        err = report.scalars["max_relative_error"]
        checks[f"c_s={c_s:g} max|w/(c|q|)-1|"] = (err <= 0.01, f"{err:.2e}")
    record(1, "dispersion w = c_s|q|", checks, time.perf_counter() - t0, 10)


def test_criterion_2_energy_conservation():
    t0 = time.perf_counter()
    grid = make_grid(4096, 2 * np.pi)
    state = ElasticState1D.from_velocity(grid, np.sin(grid.x), 0.0, 0.0, 1.0)
    params = EvolveParams.from_courant(grid, 0.5, 10_000, save_every=10)
    traj = evolve_leapfrog(state, params)
    E = np.array([total_energy(traj.state(i)) for i in range(len(traj))])
    S = np.array([shadow_energy(traj.state(i), params.dt) for i in range(len(traj))])
    dev = E / E[0] - 1
    # trend of the bounded oscillation, fitted over whole oscillation periods
    t, T = traj.times, traj.times[-1]
    period = np.pi / leapfrog_frequency(grid, 1.0, 1.0, params.dt)
    whole = t <= np.floor(T / period) * period
    trend = abs(np.polyfit(t[whole], dev[whole], 1)[0]) * T
    amplitude = np.max(np.abs(dev))
    shadow_drift = np.max(np.abs(S / S[0] - 1))
    record(2, "energy conservation over 1e4 steps at CFL 0.5", {
        "max|dE/E|": (amplitude < 1e-6, f"{amplitude:.2e}"),
        "secular trend over run": (trend < 0.01 * amplitude, f"{trend:.1e}"),
        "shadow energy drift": (shadow_drift < 1e-12, f"{shadow_drift:.1e}"),
    }, time.perf_counter() - t0, 10)


def test_criterion_3_gauge_covariance():
    t0 = time.perf_counter()
    report = run({"experiment": "gauge-check", "params": {"eps": [1e-2, 5e-3, 2.5e-3]}})
    slope, rigid = report.scalars["slope"], report.scalars["constant_shift_residual"]
    record(3, "gauge covariance residual", {
        "slope": (abs(slope - 2) <= 0.1, f"{slope:.3f}"),
        "rigid translation residual": (rigid <= 1e-12, f"{rigid:.1e}"),
    }, time.perf_counter() - t0, 5)


def test_criterion_4_bosonic_algebra():
    t0 = time.perf_counter()
    report = run({"experiment": "quanta", "params": {"modes": [1, 2], "n_max": 3}})
    s = report.scalars
    record(4, "bosonic algebra and free spectrum", {
        "max commutator error": (s["commutator_error"] <= 1e-12, f"{s['commutator_error']:.1e}"),
        "spectrum exact": (report.assertions["free_spectrum_exact"], f"{s['spectrum_error']:.1e}"),
    }, time.perf_counter() - t0, 5)


def test_criterion_5_classical_correspondence():
    t0 = time.perf_counter()
    grid = make_grid(512, 2 * np.pi)
    c_s, rho, n, alpha = 1.0, 1.0, 1, 0.8 - 0.5j
    ms = phonons.mode_spectrum(grid, c_s, [n], rho)
    basis = phonons.build_fock_basis(ms, 12)
    H = phonons.free_hamiltonian(basis)
    psi0 = phonons.coherent_state(basis, 0, alpha)
    q, w, A = ms.q[0], ms.omega[0], ms.amplitudes[0]
    x = grid.x
    phi0 = 2 * A * np.real(alpha * np.exp(1j * q * x))
    phidot0 = 2 * A * np.real(-1j * w * alpha * np.exp(1j * q * x))
    state = ElasticState1D.from_velocity(grid, phi0, phidot0, 0.0, c_s)
    period = 2 * np.pi / w
    base = EvolveParams.from_courant(grid, 0.25, 1, c_s)
    steps = int(np.ceil(period / base.dt))
    stride = steps // 16
    traj = evolve_leapfrog(state, EvolveParams(period / steps, steps, c_s, stride))
    xs = x[::8]
    ops = [phonons.field_operator(basis, xi, 0.0) for xi in xs]
    err = 0.0
    for i, t in enumerate(traj.times):
        psi = phonons.evolve_dense(H, psi0, t)
        quantum = np.array([op.expectation(psi).real for op in ops])
        err = max(err, np.max(np.abs(quantum - traj.phi[i][::8])))
    record(5, "coherent-state field vs classical mode", {
        "max pointwise error over one period": (err < 1e-4, f"{err:.1e}"),
    }, time.perf_counter() - t0, 30)


def test_criterion_6_electron_phonon():
    t0 = time.perf_counter()
    checks = {}
    L = 2 * np.pi
    grid = make_grid(32, L)
    fb = phonons.build_fock_basis(phonons.mode_spectrum(grid, 1.0, [-2, -1, 1, 2]), 2, 2)
    joint = JointBasis(ElectronBasis(L, 4, 1), fb)
    H_I = interaction_hamiltonian(joint, 0.7)
    herm = H_I.hermiticity_error()
    checks["H_I hermiticity"] = (herm < 1e-12, f"{herm:.1e}")
    nnz = phonons.commutator(bare_hamiltonian(joint, 1.0) + H_I, total_momentum(joint)).matrix.count_nonzero()
    checks["[H, P] nonzeros"] = (nnz == 0, str(nnz))

    rate = run({"experiment": "eph-rate"})
    ratio = rate.scalars["ratio"]
    checks["evolution/golden-rule rate"] = (abs(ratio - 1) <= 0.1, f"{ratio:.3f}")

    shift = run({"experiment": "eph-shift"})
    slope = shift.scalars["slope"]
    checks["ED-PT2 discrepancy slope"] = (abs(slope - 2) <= 0.2, f"{slope:.3f}")

    # dimension 4: |k,0> couples only to |k-q,1>; closed-form 2x2 eigenvalue
    small = JointBasis(ElectronBasis.window(L, [1, 2], spins=("up",)),
                       phonons.build_fock_basis(phonons.mode_spectrum(grid, 1.0, [1]), 1))
    g0, k, q = 0.3, 2.0, 1.0
    e_top, e_bot = k**2 / 2, (k - q) ** 2 / 2 + q
    M2 = (g0 / 2) ** 2 * q**2 / (2 * L * q)
    half = (e_top - e_bot) / 2
    closed = (e_top + e_bot) / 2 + np.sign(half) * np.sqrt(half**2 + M2) - e_top
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ex, _ = exact_shift_vs_pt(small, 2, g0)
    checks["dimension"] = (small.dim == 4, str(small.dim))
    checks["dim-4 closed form"] = (abs(ex - closed) <= 1e-12, f"{abs(ex - closed):.1e}")
    record(6, "electron-phonon coupling", checks, time.perf_counter() - t0, 60)


def test_criterion_7_spin_strain():
    t0 = time.perf_counter()
    params = SpinOrbitParams(g=0.7, m=1.3, mu_B=0.9)
    grid = make_grid(48, 3.0)
    k = 2 * np.pi / grid.length
    decomposition = brute = 0.0
    for seed in range(20):
        r = np.random.default_rng(seed)
        vals = sum(np.exp(1j * m * k * grid.x)[:, None] * (r.normal(size=2) + 1j * r.normal(size=2))
                   for m in range(-3, 4))
        psi = SpinorField(grid, vals).normalized()
        E = ElectricFieldConfig(grid, r.normal(size=(48, 3)))
        R = StrainTensor3.symmetric(r.normal(size=(48, 3, 3)))
        J = spin_current(psi, params)
        full = covariant_spin_orbit_density(psi, E, R, params)
        parts = spin_orbit_density(psi, E, params) + strain_spin_coupling_density(J, R, E, params.g)
        decomposition = max(decomposition, np.max(np.abs(full - parts)))
        brute = max(brute, np.max(np.abs(strain_spin_coupling_density(J, R, E, params.g)
                                         - strain_spin_coupling_bruteforce(J, R, E, params.g))))
    Ez = ElectricFieldConfig.uniform(grid, [0.0, 0.0, 1.0])
    ns = [-2, -1, 0, 1, 2]
    H = matrix_element_table(grid, ns, StrainTensor3.from_components(xx=0.3, xy=0.2, zz=0.5), Ez, params)
    spins = np.array([0, 1] * len(ns))
    same = spins[:, None] == spins[None, :]
    diag = np.max(np.abs(H[same]))
    flip = np.max(np.abs(H[~same]))
    record(7, "spin-strain coupling", {
        "decomposition error (20 configs)": (decomposition <= 1e-10, f"{decomposition:.1e}"),
        "sigma_z-diagonal max": (diag < 1e-14, f"{diag:.1e}"),
        "spin-flip max": (flip > 0, f"{flip:.2e}"),
        "contraction vs 81-term loop": (brute <= 1e-14, f"{brute:.1e}"),
    }, time.perf_counter() - t0, 10)


def test_criterion_8_relaxation():
    t0 = time.perf_counter()
    still = relaxation_toy(RelaxationParams(coupling=0.0, n_realizations=2000))
    report = run({"experiment": "relaxation", "params": {"n_realizations": 2000, "scaling_halvings": 3}})
    slope = report.scalars["rate_slope"]
    record(8, "spin relaxation toy", {
        "zero coupling <sz> == 1": (bool(np.all(still.sz_mean == 1.0)), repr(float(still.sz_mean.min()))),
        "rate slope vs coupling": (abs(slope - 2) <= 0.2, f"{slope:.3f}"),
    }, time.perf_counter() - t0, 60)


def test_criterion_9_reproducibility(tmp_path):
    t0 = time.perf_counter()
    checks = {}
    for name in sorted(EXPERIMENTS):
        cfg = RunConfig.from_dict({"experiment": name, "seed": 17})
        a, b = tmp_path / name / "a", tmp_path / name / "b"
        emit_report(run_experiment(cfg), a)
        emit_report(run_experiment(cfg), b)
        files = sorted(p.name for p in a.iterdir())
        same = files == sorted(p.name for p in b.iterdir()) and all(
            (a / f).read_bytes() == (b / f).read_bytes() for f in files)
        checks[name] = (same, "identical" if same else "DIFFERENT")
    record(9, "byte-identical reruns", checks, time.perf_counter() - t0)


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    failures = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
