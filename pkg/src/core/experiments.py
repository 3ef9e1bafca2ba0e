# src/core/experiments.py

"""
Experiments behind the command-line workbench. Each run_* function computes an
ExperimentResult (CSV columns, rows and a JSON summary); run_experiment writes
both files into the configured output directory.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from configs.environment import EnvironmentConfig
from src.core import majorant as mj
from src.core.dynamics import (
    IntegratorConfig,
    energy_drift,
    gap_drift,
    integrate,
    model_by_name,
    weighted_action_drift,
)
from src.core.fourier import cubic_hamiltonian_map, idft, mode_table, omegas, time_average
from src.core.lattice import LatticeState
from src.core.spectral import eigen_doubled, flaschka, separation_margin, unperturbed_spectrum
from src.utils.logger import WorkbenchLogger
from src.utils.reporting import ReportUtils, config_hash

SERIES_COLUMNS = ["quantity", "t", "k", "value"]
PACKET_COLUMNS = ["model", "n", "quantity", "t", "k", "value"]
SCALING_COLUMNS = ["n", "omega1", "omega2", "divisor", "chi_abs", "bound_ratio", "residual"]
KP_COLUMNS = ["check", "passed", "value"]

ENERGY_FLOOR = np.finfo(float).tiny

logger = WorkbenchLogger("experiments")


@dataclass
class ExperimentResult:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool = True


def random_reduced_state(rng, n, amplitude):
    """Gaussian momenta and positions scaled by amplitude, projected to zero mean"""
    p = amplitude * rng.standard_normal(n)
    q = amplitude * rng.standard_normal(n)
    return LatticeState.from_arrays(p, q, reduce=True)


def _integrator_config(params, n, steps, record_every, gap_every):
    if params.get("dt") is None:
        return IntegratorConfig.default(n, steps, params["integrator"], record_every, gap_every)
    return IntegratorConfig(params["dt"], steps, params["integrator"], record_every, gap_every)


def _series_rows(quantity, times, values, first_k=1):
    rows = []
    for t, row in zip(times, values):
        for offset, value in enumerate(row):
            rows.append([quantity, float(t), first_k + offset, float(value)])
    return rows


def run_spectrum(cfg):
    """Spectrum, free spectrum and gaps of one seeded random state"""
    n = cfg["n"]
    rng = np.random.default_rng(cfg["seed"])
    state = random_reduced_state(rng, n, cfg["amplitude"])
    spectrum = eigen_doubled(flaschka(state))
    free = unperturbed_spectrum(n)

    rows = [[n, "lambda", i, float(v)] for i, v in enumerate(spectrum.lambdas)]
    rows += [[n, "lambda_free", i, float(v)] for i, v in enumerate(free.lambdas)]
    rows += [[n, "gap", j, float(v)] for j, v in enumerate(spectrum.gaps, start=1)]
    summary = {
        "n": n,
        "residual": spectrum.residual,
        "max_abs_gap": float(np.max(np.abs(spectrum.gaps))),
        "max_eigen_shift": float(np.max(np.abs(spectrum.lambdas - free.lambdas))),
        "separation_margin": separation_margin(n),
    }
    return ExperimentResult("spectrum", ["n", "quantity", "index", "value"], rows, summary)


def run_gaps(cfg):
    """Gap and action-proxy series along a trajectory"""
    n = cfg["n"]
    rng = np.random.default_rng(cfg["seed"])
    state = random_reduced_state(rng, n, cfg["amplitude"])
    model = model_by_name(cfg["model"], cfg["beta"])
    gap_every = max(cfg["gap_every"], 1)
    record = integrate(state, model, _integrator_config(cfg.params, n, cfg["steps"], gap_every, gap_every))

    rows = _series_rows("gap", record.gap_times, record.gaps)
    rows += _series_rows("action", record.gap_times, record.actions)
    drifts = gap_drift(record)
    summary = {
        "n": n,
        "model": model.name,
        "samples": int(record.gap_times.size),
        "max_gap_drift": float(np.max(drifts)) if drifts.size else 0.0,
        "energy_drift": energy_drift(record),
    }
    return ExperimentResult("gaps", SERIES_COLUMNS, rows, summary)


def run_simulate(cfg):
    """Energies and specific mode energies of a seeded random trajectory"""
    n = cfg["n"]
    rng = np.random.default_rng(cfg["seed"])
    state = random_reduced_state(rng, n, cfg["amplitude"])
    model = model_by_name(cfg["model"], cfg["beta"])
    integrator = _integrator_config(cfg.params, n, cfg["steps"], cfg["sample_every"], cfg["gap_every"])
    record = integrate(state, model, integrator)

    rows = [["energy", float(t), 0, float(e)] for t, e in zip(record.times, record.energies)]
    rows += _series_rows("specific_energy", record.times, record.mode_energies / n)
    if record.gap_times.size:
        rows += _series_rows("gap", record.gap_times, record.gaps)
    drifts = gap_drift(record)
    summary = {
        "n": n,
        "model": model.name,
        "dt": integrator.dt,
        "samples": int(record.times.size),
        "energy_drift": energy_drift(record),
        "max_gap_drift": float(np.max(drifts)) if drifts.size else None,
    }
    return ExperimentResult("simulate", SERIES_COLUMNS, rows, summary)


def packet_datum(n, R, sigma, phase=0.0):
    """
    Momentum-only excitation of modes 1 and N-1 with specific energy R^2 e^{-2 sigma} mu^4, mu = 1/N.

    p^_1 = sqrt(2 N R^2 e^{-2 sigma} mu^4) e^{i phase}, p^_{N-1} its conjugate, q = 0.
    """
    mu = 1.0 / n
    p_hat = np.zeros(n, dtype=complex)
    p_hat[1] = math.sqrt(2.0 * n * R**2 * math.exp(-2.0 * sigma) * mu**4) * np.exp(1j * phase)
    p_hat[n - 1] = np.conj(p_hat[1])
    return LatticeState.from_arrays(idft(p_hat).real, np.zeros(n), reduce=True)


def _fit_slopes(times, averages, k_max, t_start):
    """Least-squares slope of log <E_k> against k = 1..k_max at each time >= t_start"""
    ks = np.arange(1, k_max + 1)
    slopes = []
    for t, row in zip(times, averages):
        if t < t_start:
            continue
        logs = np.log(np.maximum(row[:k_max], ENERGY_FLOOR))
        slopes.append(float(np.polyfit(ks, logs, 1)[0]))
    return slopes


def _packet_integrator(params, n):
    """
    Integrator for one packet cell. A horizon needing more than max_steps steps
    is covered in exactly max_steps steps by enlarging dt, subject to the
    stability check.
    """
    base = _integrator_config(params, n, 1, 1, 0)
    steps = int(math.ceil(params["t_max"] / base.dt))
    dt = base.dt
    if steps > params["max_steps"]:
        steps = params["max_steps"]
        dt = params["t_max"] / steps
        logger.warning(f"⚠️ Packet N={n}: t_max={params['t_max']:g} capped at {steps} steps, dt raised to {dt:.4g}")
    config = IntegratorConfig(dt, steps, params["integrator"], params["sample_every"], params["sample_every"])
    config.check_stability(n)
    return config


def packet_series(state, model, params, n, R=None):
    """
    Integrate one packet run and derive its diagnostics.

    Returns:
        (record, specific energies, time averages, diagnostics dict)
    """
    cfg = _packet_integrator(params, n)
    steps = cfg.steps
    record = integrate(state, model, cfg)
    specific = record.mode_energies / n
    averages = time_average(record.times, specific)

    mu = 1.0 / n
    sigma, s = params["sigma"], params["s"]
    k_max = min(params.get("fit_k_max") or max(2, n // 4), n - 1)
    ks = np.arange(1, n)
    envelope = mu**4 * np.exp(-2.0 * sigma * ks)
    t_start = params["fit_t_start"] * record.times[-1]
    slopes = _fit_slopes(record.times, averages, k_max, t_start)

    diagnostics = {
        "steps": steps,
        "dt": cfg.dt,
        "energy_drift": energy_drift(record),
        "fit_k_max": k_max,
        "max_fitted_slope": max(slopes) if slopes else None,
        "mean_fitted_slope": float(np.mean(slopes)) if slopes else None,
        "fitted_K": float(np.max(specific[:, :k_max] / envelope[:k_max])),
        "action_drift": weighted_action_drift(record.actions, n, s, sigma) if record.actions.size else 0.0,
    }
    if R:
        bound = 16.0 * R**2 * envelope / ks ** (2.0 * s)
        ratios = np.max(specific[:, : n // 2] / bound[: n // 2], axis=1)
        violated = np.nonzero(ratios > 1.0)[0]
        diagnostics["max_packet_ratio"] = float(np.max(specific[:, :k_max] / (R**2 * envelope[:k_max])))
        diagnostics["max_violation_ratio"] = float(np.max(ratios))
        diagnostics["violation_time"] = float(record.times[violated[0]]) if violated.size else None
    return record, specific, averages, diagnostics


def packet_cell(n, name, params):
    """
    One (N, model) cell of the packet sweep.

    Returns:
        (CSV rows of the cell, diagnostics entry for the summary)
    """
    state = packet_datum(n, params["R"], params["sigma"], params["phase"])
    model = model_by_name(name, params["beta"])
    logger.info(f"🔍 Packet cell N={n} model={name}")
    record, specific, averages, diagnostics = packet_series(state, model, params, n, params["R"])
    half = n // 2
    rows = []
    for quantity, values in (("specific_energy", specific), ("time_average", averages)):
        for row in _series_rows(quantity, record.times, values[:, :half]):
            rows.append([name, n] + row)
    for row in _series_rows("action", record.gap_times, record.actions[:, :half]):
        rows.append([name, n] + row)
    return rows, {"n": n, "model": name, "beta": model.beta, **diagnostics}


def run_packet(cfg):
    """
    Metastable packet runs for every (N, model) cell.

    Cells are independent and run in a process pool when more than one worker
    is configured; their rows are merged in (N, model) order, so the CSV does
    not depend on the worker count.
    """
    grid = [(n, name) for n in cfg["n_values"] for name in cfg["models"]]
    workers = min(cfg["workers"] or EnvironmentConfig.MAX_WORKERS, len(grid))
    if workers > 1:
        logger.info(f"🚀 Running {len(grid)} packet cells on {workers} workers")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(packet_cell, n, name, dict(cfg.params)) for n, name in grid]
            outcomes = [future.result() for future in futures]
    else:
        outcomes = [packet_cell(n, name, cfg.params) for n, name in grid]

    rows = [row for cell_rows, _ in outcomes for row in cell_rows]
    cells = [cell for _, cell in outcomes]
    summary = {"phase": cfg["phase"], "R": cfg["R"], "sigma": cfg["sigma"], "workers": workers, "cells": cells}
    return ExperimentResult("packet", PACKET_COLUMNS, rows, summary)


def chi_coefficient(n):
    """|chi| for the monomial xi_1^2 eta_2: omega_1 omega_2^{1/2} / (4 sqrt(2N) |2 omega_1 - omega_2|)"""
    w = mode_table(n).omega
    return w[1] * math.sqrt(w[2]) / (4.0 * math.sqrt(2.0 * n) * abs(2.0 * w[1] - w[2]))


def scaling_row(n, s):
    w = mode_table(n).omega
    divisor = 2.0 * w[1] - w[2]
    bound_ratio = 2.0**s * w[2] / (8.0 * abs(divisor))
    residual = abs(n**3 * divisor - 2.0 * math.pi**3)
    return [n, float(w[1]), float(w[2]), float(divisor), chi_coefficient(n), float(bound_ratio), float(residual)]


def chi_from_homological_solve(n):
    """The same coefficient read off the homological solve of the cubic Hamiltonian"""
    cubic = cubic_hamiltonian_map(n)
    chi = mj.homological_solve(cubic, omegas(n))
    pairs = n - 1
    exponent = [0] * (2 * pairs)
    exponent[0] = 2
    exponent[pairs + 1] = 1
    return abs(complex(chi.coefficient(0, exponent)))


def run_scaling(cfg):
    """N^2 growth of the second-differential lower bound"""
    n_values = sorted(cfg["n_values"])
    rows = [scaling_row(n, cfg["s"]) for n in n_values]
    log_n = np.log([row[0] for row in rows])
    log_bound = np.log([row[5] for row in rows])
    slope = float(np.polyfit(log_n, log_bound, 1)[0])
    residuals = [row[6] for row in rows]

    crosscheck = {}
    for n in n_values:
        if 3 <= n <= cfg["crosscheck_max_n"]:
            crosscheck[str(n)] = abs(chi_from_homological_solve(n) - chi_coefficient(n))
    summary = {
        "n_values": n_values,
        "fitted_exponent": slope,
        "residual_decreasing": bool(all(b < a for a, b in zip(residuals, residuals[1:]))),
        "chi_crosscheck_error": crosscheck,
    }
    return ExperimentResult("scaling", SCALING_COLUMNS, rows, summary)


def _identity_checks(rng, n_vars, max_degree, trials):
    """Exact invert / compose / flow identities on random sparse maps"""
    ident = mj.identity(n_vars, max_degree)
    failures = {"invert": 0, "associativity": 0, "flow_group": 0}
    for _ in range(trials):
        F = mj.random_sparse_map(rng, n_vars, max_degree, n_terms=3)
        G = mj.invert_near_identity(F)
        if mj.compose(mj.add(ident, F), mj.sub(ident, G)) != ident:
            failures["invert"] += 1

        A, B, C = (mj.random_sparse_map(rng, n_vars, max_degree, n_terms=2) for _ in range(3))
        inner_b, inner_c = mj.add(ident, B), mj.add(ident, C)
        if mj.compose(mj.compose(A, inner_b), inner_c) != mj.compose(A, mj.compose(inner_b, inner_c)):
            failures["associativity"] += 1

        V = mj.random_sparse_map(rng, n_vars, max_degree, n_terms=2)
        t, s = Fraction(1, 2), Fraction(1, 3)
        if mj.compose(mj.flow_near_identity(V, t), mj.flow_near_identity(V, s)) != mj.flow_near_identity(V, t + s):
            failures["flow_group"] += 1
    return failures


def _averaging_check(rng, max_degree):
    """d/dtheta_j L_j g = g - M_j g on a random float map in one rotation pair"""
    g = mj.random_sparse_map(rng, 2, max_degree, n_terms=5, n_out=1, min_degree=1, exact=False, pairs=1)
    lhs = mj.theta_derivative(mj.average_Lj(g, 0), 0)
    rhs = mj.sub(g, mj.average_Mj(g, 0))
    return mj.max_abs_difference(lhs, rhs)


def run_kp_check(cfg):
    """Majorant identity and inequality suites"""
    rng = np.random.default_rng(cfg["seed"])
    rows = []

    constants = mj.MajorantConstants()
    rows.append(["mu_constant", 0.0506 < constants.mu < 0.0508, constants.mu])

    series = mj.series_inequality_check(cfg["n_max"], cfg["r_max"])
    rows.append(["series_inequality", series.passed, series.max_ratio])

    rho = cfg["rho"]
    for fraction in (1.0, 0.5, 0.25):
        report = mj.inversion_bound_check(fraction / (math.e * rho), rho)
        rows.append([f"inversion_bound_{fraction:g}", report.passed, report.norm_g_closed / report.bound])

    failures = _identity_checks(rng, cfg["n_vars"], cfg["max_degree"], cfg["trials"])
    for name, count in failures.items():
        rows.append([f"identity_{name}", count == 0, float(count)])

    averaging_error = _averaging_check(rng, cfg["max_degree"])
    rows.append(["averaging_identity", averaging_error <= 1e-12, averaging_error])

    passed = all(bool(row[1]) for row in rows)
    summary = {
        "passed": passed,
        "worst_series_cell": list(series.worst),
        "checks": {row[0]: {"passed": bool(row[1]), "value": float(row[2])} for row in rows},
    }
    return ExperimentResult("kp-check", KP_COLUMNS, rows, summary, passed=passed)


RUNNERS = {
    "spectrum": run_spectrum,
    "gaps": run_gaps,
    "simulate": run_simulate,
    "packet": run_packet,
    "scaling": run_scaling,
    "kp-check": run_kp_check,
}


def run_experiment(cfg, reporter=None):
    """
    Run one experiment and write <out>/<experiment>.csv and <out>/<experiment>_summary.json.

    Returns:
        ExperimentResult with summary["csv"] and summary["summary_json"] filled in
    """
    reporter = reporter or ReportUtils(report_dir=cfg.output_dir)
    logger.info(f"🚀 Running experiment '{cfg.experiment}'")
    started = time.perf_counter()

    result = RUNNERS[cfg.experiment](cfg)
    echo = cfg.to_dict()
    csv_path = reporter.write_csv(f"{cfg.experiment}.csv", result.columns, result.rows, echo)

    summary = {
        "experiment": cfg.experiment,
        "config": echo,
        "config_sha256": config_hash(echo),
        "passed": result.passed,
        "results": result.summary,
    }
    json_path = reporter.generate_json_report(summary, f"{cfg.experiment}_summary.json")

    logger.performance_metric(f"{cfg.experiment} runtime", round(time.perf_counter() - started, 3))
    result.summary.update({"csv": str(Path(csv_path)), "summary_json": str(Path(json_path))})
    return result
