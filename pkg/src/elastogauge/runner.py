"""Named, seeded experiments with strict JSON configs and CSV/JSON outputs.

A config looks like::

    {
      "experiment": "dispersion",
      "grid": {"n_sites": 128, "length": 6.283185307179586},
      "constants": {"c_s": 1.0},
      "params": {"modes": [1, 2, 3]},
      "seed": 0
    }

Unknown keys anywhere are rejected before anything is computed.
"""

from __future__ import annotations

import copy
import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import eph, phonons
from .elastodynamics import (
    ElasticState1D,
    EvolveParams,
    evolve_leapfrog,
    measure_dispersion,
    shadow_energy,
    total_energy,
)
from .gauge import CouplingConstants, ElasticTensorField, GaugeParameter, covariance_residual
from .lattice import ScalarField, SpinorField, make_grid
from .spinstrain import (
    ElectricFieldConfig,
    RelaxationParams,
    SpinOrbitParams,
    StrainTensor3,
    golden_rule_relaxation_rate,
    matrix_element_table,
    relaxation_toy,
)

OUTPUT_ENV = "ELASTOGAUGE_OUTPUT_ROOT"

GRID_DEFAULTS = {"n_sites": 128, "length": 2 * np.pi}
CONSTANT_DEFAULTS = {"c_s": 1.0, "g": 0.5, "g0": None, "m_star": 1.0, "m": 1.0, "mu_B": 1.0, "rho": 1.0}
TOP_LEVEL = {"experiment", "grid", "constants", "params", "seed", "output_dir"}


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class RunConfig:
    experiment: str
    grid: dict
    constants: dict
    params: dict
    seed: int = 0
    output_dir: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> RunConfig:
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a mapping")
        for key in raw:
            if key not in TOP_LEVEL:
                raise ConfigError(key, "unknown key")
        if "experiment" not in raw:
            raise ConfigError("experiment", "missing")
        name = raw["experiment"]
        if name not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
        grid = _merge("grid", EXPERIMENTS[name].grid_defaults, raw.get("grid", {}))
        constants = _merge("constants", CONSTANT_DEFAULTS, raw.get("constants", {}))
        params = _merge("params", EXPERIMENTS[name].defaults, raw.get("params", {}))
        seed = raw.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed", "must be an unsigned integer")
        out = raw.get("output_dir")
        if out is not None and not isinstance(out, str):
            raise ConfigError("output_dir", "must be a string path")
        cfg = cls(name, grid, constants, params, seed, out)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> RunConfig:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    def validate(self):
        n, L = self.grid["n_sites"], self.grid["length"]
        if not isinstance(n, int) or n < 4:
            raise ConfigError("grid.n_sites", "must be an integer >= 4")
        if not _number(L) or L <= 0:
            raise ConfigError("grid.length", "must be a positive number")
        for key in ("c_s", "m_star", "m", "rho"):
            v = self.constants[key]
            if not _number(v) or v <= 0:
                raise ConfigError(f"constants.{key}", "must be a positive number")
        for key in ("g", "mu_B"):
            if not _number(self.constants[key]):
                raise ConfigError(f"constants.{key}", "must be a number")
        g0 = self.constants["g0"]
        if g0 is not None:
            if not _number(g0):
                raise ConfigError("constants.g0", "must be a number")
        EXPERIMENTS[self.experiment].check(self)

    @property
    def g0(self) -> float:
        g0 = self.constants["g0"]
        return self.constants["c_s"] * self.constants["g"] if g0 is None else g0

    def echo(self) -> dict:
        return {"experiment": self.experiment, "grid": self.grid, "constants": self.constants,
                "params": self.params, "seed": self.seed}


def _number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


def _merge(section: str, defaults: dict, given) -> dict:
    if not isinstance(given, dict):
        raise ConfigError(section, "must be a mapping")
    for key in given:
        if key not in defaults:
            raise ConfigError(f"{section}.{key}", "unknown key")
    out = copy.deepcopy(defaults)
    out.update(given)
    return out


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]


@dataclass
class RunReport:
    experiment: str
    config: dict
    scalars: dict = field(default_factory=dict)
    tables: dict[str, Table] = field(default_factory=dict)
    assertions: dict[str, bool] = field(default_factory=dict)
    files: list[str] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    defaults: dict
    run: Callable
    check: Callable = lambda cfg: None
    grid_defaults: dict | None = None


EXPERIMENTS: dict[str, Experiment] = {}


def experiment(name, description, defaults, check=None, grid=None):
    def wrap(fn):
        EXPERIMENTS[name] = Experiment(name, description, defaults, fn, check or (lambda cfg: None),
                                       {**GRID_DEFAULTS, **(grid or {})})
        return fn
    return wrap


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# ---------------------------------------------------------------- experiments


def _check_dispersion(cfg):
    p = cfg.params
    if not 0 < p["courant"] <= 0.9:
        raise ConfigError("params.courant", "must lie in (0, 0.9]")
    if any((not isinstance(n, int)) or n <= 0 or n >= cfg.grid["n_sites"] / 2 for n in p["modes"]):
        raise ConfigError("params.modes", "must be positive integers below n_sites/2")
    if p["periods"] < 2:
        raise ConfigError("params.periods", "need at least 2 periods of the slowest mode")


@experiment("dispersion", "leapfrog wave evolution and measured omega(q) vs c_s|q|",
            {"modes": list(range(1, 11)), "courant": 0.5, "periods": 20, "save_every": 4,
             "rel_tol": 0.01, "kdx_max": 0.3},
            _check_dispersion)
def _run_dispersion(cfg, report):
    p, c_s = cfg.params, cfg.constants["c_s"]
    grid = make_grid(cfg.grid["n_sites"], cfg.grid["length"])
    x = grid.x
    phi = sum(np.sin(2 * np.pi * n * x / grid.length + 0.37 * n) / n for n in p["modes"])
    state = ElasticState1D.from_velocity(grid, phi, 0.0, 0.0, c_s)
    q_min = 2 * np.pi * min(p["modes"]) / grid.length
    T = p["periods"] * 2 * np.pi / (c_s * q_min)
    base = EvolveParams.from_courant(grid, p["courant"], 1, c_s)
    n_steps = int(np.ceil(T / base.dt))
    traj = evolve_leapfrog(state, EvolveParams(base.dt, n_steps, c_s, p["save_every"]))
    rows, worst = [], 0.0
    for q, w in measure_dispersion(traj, p["modes"]):
        expected = c_s * abs(q)
        rows.append((q, w, expected))
        if abs(q) * grid.dx < p["kdx_max"]:
            worst = max(worst, abs(w / expected - 1))
    report.tables["dispersion"] = Table(["q", "omega_measured", "omega_expected"], rows)
    report.scalars["max_relative_error"] = worst
    report.scalars["energy_relative_drift"] = abs(total_energy(traj.final) / total_energy(state) - 1)
    report.scalars["shadow_energy_relative_drift"] = abs(
        shadow_energy(traj.final, base.dt) / shadow_energy(state, base.dt) - 1)
    report.assertions["dispersion_within_tolerance"] = worst <= p["rel_tol"]


@experiment("gauge-check", "covariance residual of the spatial covariant derivative vs eps",
            {"eps": [1e-2, 5e-3, 2.5e-3], "slope_tol": 0.1, "n_random_modes": 3},
            grid={"n_sites": 512})
def _run_gauge(cfg, report):
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    grid = make_grid(cfg.grid["n_sites"], cfg.grid["length"])
    x, L = grid.x, grid.length
    k = 2 * np.pi / L

    def smooth(scale):
        out = np.zeros(grid.n_sites)
        for m in range(1, p["n_random_modes"] + 1):
            a, b = rng.normal(size=2) * scale / m
            out += a * np.cos(m * k * x) + b * np.sin(m * k * x)
        return out

    c = CouplingConstants(g=cfg.constants["g"], c_s=cfg.constants["c_s"], m_star=cfg.constants["m_star"],
                          rho=cfg.constants["rho"])
    psi = SpinorField(grid, np.stack([np.exp(2j * k * x) * (1 + 0.3 * np.cos(k * x)),
                                      0.5 * np.exp(-1j * k * x)], axis=1)).normalized()
    R = ElasticTensorField.from_arrays(grid, 0.0, smooth(0.2), 0.1 + smooth(0.2))
    a = GaugeParameter.spatial(ScalarField(grid, smooth(1.0)))
    eps = list(p["eps"])
    res = [covariance_residual(psi, R, a, e, c) for e in eps]
    slope = _slope(eps, res)
    const = GaugeParameter.spatial(ScalarField(grid, np.ones(grid.n_sites)))
    const_res = covariance_residual(psi, ElasticTensorField.zeros(grid), const, eps[0], c)
    report.tables["gauge"] = Table(["eps", "residual"], list(zip(eps, res)))
    report.scalars.update(slope=slope, constant_shift_residual=const_res)
    report.assertions["residual_slope_is_2"] = abs(slope - 2) <= p["slope_tol"]
    report.assertions["rigid_translation_exact"] = const_res <= 1e-12


@experiment("quanta", "bosonic algebra, free spectrum and Heisenberg phases on a small Fock space",
            {"modes": [1, 2], "n_max": 3, "t": 0.7})
def _run_quanta(cfg, report):
    p = cfg.params
    grid = make_grid(cfg.grid["n_sites"], cfg.grid["length"])
    ms = phonons.mode_spectrum(grid, cfg.constants["c_s"], p["modes"], cfg.constants["rho"])
    basis = phonons.build_fock_basis(ms, p["n_max"])
    prot = basis.protected()
    comm_err = 0.0
    for i in range(len(ms)):
        a = phonons.ladder_operator(basis, i, "annihilate")
        for j in range(len(ms)):
            ad = phonons.ladder_operator(basis, j, "create")
            b = phonons.ladder_operator(basis, j, "annihilate")
            C1 = phonons.commutator(a, ad).matrix.toarray()[np.ix_(prot, prot)]
            C2 = phonons.commutator(a, b).matrix.toarray()[np.ix_(prot, prot)]
            target = np.eye(prot.sum()) * (i == j)
            comm_err = max(comm_err, np.max(np.abs(C1 - target)), np.max(np.abs(C2)))
    H = phonons.free_hamiltonian(basis)
    eig = np.sort(np.linalg.eigvalsh(H.dense()))
    expected = np.sort(basis.states @ ms.omega)
    rows = [tuple(int(v) for v in occ) + (float(H.matrix[i, i].real), float(occ @ ms.omega))
            for i, occ in enumerate(basis.states)]
    heis_err = 0.0
    for i, m in enumerate(ms):
        a = phonons.ladder_operator(basis, i, "annihilate")
        lhs = phonons.heisenberg(a, H, p["t"])
        rhs = np.exp(-1j * m.omega * p["t"]) * a.dense()
        heis_err = max(heis_err, np.max(np.abs((lhs - rhs)[np.ix_(prot, prot)])))
    report.tables["spectrum"] = Table([f"n_{m.n}" for m in ms] + ["energy", "expected"], rows)
    report.scalars.update(commutator_error=comm_err, spectrum_error=float(np.max(np.abs(eig - expected))),
                          heisenberg_error=heis_err, dimension=basis.dim)
    report.assertions["ccr_on_protected_subspace"] = comm_err <= 1e-12
    report.assertions["free_spectrum_exact"] = bool(np.array_equal(eig, expected))
    report.assertions["heisenberg_phase"] = heis_err <= 1e-10


def _eph_rate_setup(cfg):
    p = cfg.params
    L = cfg.grid["length"]
    grid = make_grid(cfg.grid["n_sites"], L)
    kn = p["k_index"]
    ms = phonons.mode_spectrum(grid, cfg.constants["c_s"], range(p["q_index_min"], p["q_index_max"] + 1),
                               cfg.constants["rho"])
    fb = phonons.build_fock_basis(ms, 1, 1)
    el = eph.ElectronBasis.window(L, range(kn - p["q_index_max"], kn + 1), spins=("up",))
    return eph.JointBasis(el, fb)


def _check_eph_rate(cfg):
    p = cfg.params
    if not 0 < p["q_index_min"] <= p["q_index_max"] < cfg.grid["n_sites"] / 2:
        raise ConfigError("params.q_index_max", "need 0 < q_index_min <= q_index_max < n_sites/2")
    if p["t_max"] <= p["t_fit_min"]:
        raise ConfigError("params.t_max", "must exceed t_fit_min")


@experiment("eph-rate", "golden-rule emission rate vs exact short-time evolution",
            {"k_index": 95, "q_index_min": 32, "q_index_max": 222, "g0": 0.09, "eta": None,
             "t_max": 40.0, "n_times": 161, "t_fit_min": 5.0, "p_max": 0.1, "rel_tol": 0.1},
            _check_eph_rate, grid={"n_sites": 4096, "length": 200.0})
def _run_eph_rate(cfg, report):
    p = cfg.params
    joint = _eph_rate_setup(cfg)
    kw = dict(m_star=cfg.constants["m_star"], rho=cfg.constants["rho"])
    g0 = cfg.g0 if p["g0"] is None else p["g0"]
    gamma = eph.golden_rule_rate(joint, p["k_index"], g0, p["eta"], **kw)
    times = np.linspace(0, p["t_max"], p["n_times"])
    P = eph.transition_probability(joint, p["k_index"], g0, times, **kw)
    slope = eph.rate_from_evolution(times, P, p["p_max"], p["t_fit_min"])
    report.tables["eph_rate"] = Table(["t", "P"], list(zip(times.tolist(), P.tolist())))
    report.scalars.update(golden_rule_rate=gamma, evolution_rate=slope, ratio=slope / gamma,
                          dimension=joint.dim)
    report.assertions["rate_matches_evolution"] = abs(slope / gamma - 1) <= p["rel_tol"]


@experiment("eph-shift", "exact diagonalization vs second-order energy shift",
            {"k_index": 1, "k_window": 6, "modes": [-3, -2, -1, 1, 2, 3], "n_max": 2, "N_max": 2,
             "g0_values": [0.16, 0.08, 0.04, 0.02], "slope_tol": 0.2})
def _run_eph_shift(cfg, report):
    p = cfg.params
    L = cfg.grid["length"]
    grid = make_grid(cfg.grid["n_sites"], L)
    ms = phonons.mode_spectrum(grid, cfg.constants["c_s"], p["modes"], cfg.constants["rho"])
    fb = phonons.build_fock_basis(ms, p["n_max"], p["N_max"])
    el = eph.ElectronBasis.window(L, range(-p["k_window"], p["k_window"] + 1), spins=("up",))
    joint = eph.JointBasis(el, fb)
    rows, rel = [], []
    for g0 in p["g0_values"]:
        ex, pt = eph.exact_shift_vs_pt(joint, p["k_index"], g0, m_star=cfg.constants["m_star"],
                                       rho=cfg.constants["rho"])
        r = abs(ex - pt) / abs(pt)
        rows.append((g0, ex, pt, r))
        rel.append(r)
    slope = _slope(p["g0_values"], rel)
    report.tables["eph_shift"] = Table(["g0", "shift_exact", "shift_pt2", "relative_difference"], rows)
    report.scalars.update(slope=slope, dimension=joint.dim)
    report.assertions["discrepancy_scales_as_g0_squared"] = abs(slope - 2) <= p["slope_tol"]


@experiment("spin-selection", "E || z selection rule and Hermiticity of strain spin-flip elements",
            {"n_values": [-2, -1, 0, 1, 2], "E_z": 1.0, "strain": {"xx": 0.3, "xy": 0.2}})
def _run_spin_selection(cfg, report):
    p = cfg.params
    grid = make_grid(cfg.grid["n_sites"], cfg.grid["length"])
    params = SpinOrbitParams(cfg.constants["g"], cfg.constants["m"], cfg.constants["mu_B"])
    try:
        R = StrainTensor3.from_components(**p["strain"])
    except (KeyError, IndexError):
        raise ConfigError("params.strain", "keys must be pairs of x/y/z, e.g. 'xy'") from None
    E = ElectricFieldConfig.uniform(grid, [0.0, 0.0, p["E_z"]])
    H = matrix_element_table(grid, p["n_values"], R, E, params)
    labels = [(n, s) for n in p["n_values"] for s in ("up", "down")]
    rows = [(n1, s1, n2, s2, H[a, b].real, H[a, b].imag)
            for a, (n1, s1) in enumerate(labels) for b, (n2, s2) in enumerate(labels)]
    diag = max(abs(H[a, b]) for a, (n1, s1) in enumerate(labels) for b, (n2, s2) in enumerate(labels)
               if s1 == s2)
    flip = max(abs(H[a, b]) for a, (n1, s1) in enumerate(labels) for b, (n2, s2) in enumerate(labels)
               if s1 != s2)
    herm = float(np.max(np.abs(H - H.conj().T)))
    report.tables["spin_selection"] = Table(["n_bra", "spin_bra", "n_ket", "spin_ket", "re", "im"], rows)
    report.scalars.update(max_spin_conserving=float(diag), max_spin_flip=float(flip), hermiticity_error=herm)
    report.assertions["sigma_z_diagonal_vanishes"] = diag < 1e-14
    report.assertions["hermitian"] = herm < 1e-12


def _check_relaxation(cfg):
    p = cfg.params
    try:
        _relax_params(cfg, p["coupling"])
    except ValueError as exc:
        raise ConfigError("params", str(exc)) from None


def _relax_params(cfg, coupling, n_steps=None):
    p = cfg.params
    return RelaxationParams(coupling=coupling, tau_c=p["tau_c"], E=tuple(p["E"]),
                            strain_amplitude=p["strain_amplitude"], splitting=p["splitting"], dt=p["dt"],
                            n_steps=n_steps or p["n_steps"], n_realizations=p["n_realizations"],
                            seed=cfg.seed)


@experiment("relaxation", "spin decay under OU strain noise and lambda^2 rate scaling",
            {"coupling": 0.2, "tau_c": 1.0, "E": [0.0, 0.0, 1.0], "strain_amplitude": 1.0, "splitting": 1.0,
             "dt": 0.05, "n_steps": 200, "n_realizations": 2000, "scaling_halvings": 3, "slope_tol": 0.2},
            _check_relaxation)
def _run_relaxation(cfg, report):
    p = cfg.params
    curve = relaxation_toy(_relax_params(cfg, p["coupling"]))
    report.tables["decay"] = Table(["t", "sz_mean", "sz_stderr"],
                                   list(zip(curve.t.tolist(), curve.sz_mean.tolist(), curve.sz_stderr.tolist())))
    report.scalars.update(rate=curve.rate, golden_rule_rate=golden_rule_relaxation_rate(
        _relax_params(cfg, p["coupling"])))
    if p["scaling_halvings"] > 0:
        lams = [p["coupling"] / 2**i for i in range(p["scaling_halvings"] + 1)]
        rates, rows = [], []
        for lam in lams:
            # keep the fitted window at a fixed number of decay times
            steps = max(p["n_steps"], int(round(p["n_steps"] * (p["coupling"] / lam) ** 2)))
            c = relaxation_toy(_relax_params(cfg, lam, steps))
            rates.append(c.rate)
            rows.append((lam, c.rate, golden_rule_relaxation_rate(_relax_params(cfg, lam))))
        slope = _slope(lams, rates) if min(rates) > 0 else float("nan")
        report.tables["rates"] = Table(["coupling", "rate", "golden_rule_rate"], rows)
        report.scalars["rate_slope"] = slope
        report.assertions["rate_scales_as_coupling_squared"] = bool(abs(slope - 2) <= p["slope_tol"])


# ---------------------------------------------------------------- driver


def run_experiment(config: RunConfig) -> RunReport:
    report = RunReport(config.experiment, config.echo())
    t0 = time.perf_counter()
    EXPERIMENTS[config.experiment].run(config, report)
    report.wall_time = time.perf_counter() - t0
    return report


def resolve_output_dir(config: RunConfig, override: str | None = None) -> Path:
    if override:
        return Path(override)
    if config.output_dir:
        return Path(config.output_dir)
    root = os.environ.get(OUTPUT_ENV, "runs")
    return Path(root) / config.experiment


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if np.isfinite(f) else str(f)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def emit_report(report: RunReport, out_dir, formats=("csv", "structured")) -> list[Path]:
    """Write one CSV per table and ``summary.json``; returns the written paths.

    Wall-clock timing stays on the report object so that reruns produce
    byte-identical files.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")
    written = []
    if "csv" in formats:
        for name, table in report.tables.items():
            path = out / f"{name}.csv"
            with path.open("w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(table.columns)
                for row in table.rows:
                    w.writerow([_fmt(v) for v in row])
            written.append(path)
    report.files = [p.name for p in written] + (["summary.json"] if "structured" in formats else [])
    if "structured" in formats:
        summary = {
            "experiment": report.experiment,
            "config": report.config,
            "scalars": report.scalars,
            "assertions": report.assertions,
            "passed": report.passed,
            "files": report.files,
        }
        path = out / "summary.json"
        path.write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(path)
    return written
