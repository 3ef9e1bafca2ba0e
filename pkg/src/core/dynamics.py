# src/core/dynamics.py

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from configs.environment import EnvironmentConfig
from src.core.errors import ConfigError, IntegrationError
from src.core.fourier import mode_energies, mode_table, omegas
from src.core.lattice import (
    LatticeState,
    bond_stretch,
    fpu_energy,
    h0,
    relative_toda_energy,
)
from src.core.spectral import eigen_doubled, flaschka
from src.utils.logger import WorkbenchLogger

SCHEMES = ("leapfrog", "yoshida4")

_CUBE_ROOT_TWO = 2.0 ** (1.0 / 3.0)
YOSHIDA_OUTER = 1.0 / (2.0 - _CUBE_ROOT_TWO)
YOSHIDA_INNER = -_CUBE_ROOT_TWO / (2.0 - _CUBE_ROOT_TWO)


def _bond_force(derivative):
    """Force -dV/dq_j = -(U'(x_j) - U'(x_{j-1})) for a nearest-neighbour potential"""
    return -(derivative - np.roll(derivative, 1))


def toda_force(q):
    return _bond_force(np.exp(bond_stretch(q)))


def fpu_force(q, beta):
    x = bond_stretch(q)
    return _bond_force(x + x**2 / 2.0 + beta * x**3 / 6.0)


def harmonic_force(q):
    return _bond_force(bond_stretch(q))


def toda_field(state):
    """(dp, dq) = (-dH/dq, p) for the Toda chain"""
    return toda_force(state.q), state.p.copy()


def fpu_field(state, beta):
    return fpu_force(state.q, beta), state.p.copy()


@dataclass(frozen=True)
class HamiltonianModel:
    """Separable Hamiltonian p^2/2 + V(q): force(q) and the energy used for drift monitors"""

    name: str
    force: Callable
    energy: Callable
    beta: float = None


def toda_model():
    return HamiltonianModel("toda", toda_force, relative_toda_energy)


def fpu_model(beta):
    return HamiltonianModel(
        "fpu",
        lambda q: fpu_force(q, beta),
        lambda state: fpu_energy(state, beta),
        beta=beta,
    )


def harmonic_model():
    return HamiltonianModel("harmonic", harmonic_force, h0)


def model_by_name(name, beta=1.0):
    models = {"toda": toda_model, "fpu": lambda: fpu_model(beta), "harmonic": harmonic_model}
    if name not in models:
        raise ConfigError("model", f"unknown model '{name}', expected one of {sorted(models)}")
    return models[name]()


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    steps: int
    scheme: str = "yoshida4"
    record_every: int = 1
    gap_every: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt", f"must be positive, got {self.dt}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ConfigError("steps", f"must be a non-negative integer, got {self.steps}")
        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"unknown scheme '{self.scheme}', expected one of {SCHEMES}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ConfigError("record_every", f"must be an integer >= 1, got {self.record_every}")
        if int(self.gap_every) != self.gap_every or self.gap_every < 0:
            raise ConfigError("gap_every", f"must be an integer >= 0, got {self.gap_every}")

    @classmethod
    def default(cls, n, steps, scheme="yoshida4", record_every=1, gap_every=0):
        """dt = DT_SAFETY_FACTOR / max omega_k"""
        dt = EnvironmentConfig.get_default_dt(float(np.max(omegas(n))))
        return cls(dt, steps, scheme, record_every, gap_every)

    def check_stability(self, n):
        product = self.dt * float(np.max(omegas(n)))
        if product >= 1.0:
            raise ConfigError("dt", f"dt * max omega = {product:.3f} must be < 1 for N={n}")


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    p: np.ndarray
    q: np.ndarray
    energies: np.ndarray
    mode_energies: np.ndarray
    gap_times: np.ndarray = field(default_factory=lambda: np.empty(0))
    gaps: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    actions: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def __post_init__(self):
        samples = self.times.size
        for name in ("p", "q", "energies", "mode_energies"):
            if getattr(self, name).shape[0] != samples:
                raise IntegrationError(samples, f"record field '{name}' does not match {samples} samples")
        if self.gaps.shape[0] != self.gap_times.size or self.actions.shape[0] != self.gap_times.size:
            raise IntegrationError(samples, "gap series length does not match gap sample times")
        for times in (self.times, self.gap_times):
            if times.size > 1 and np.any(np.diff(times) <= 0):
                raise IntegrationError(samples, "sample times must be strictly increasing")

    @property
    def n_particles(self):
        return self.p.shape[1]

    def state(self, index):
        return LatticeState(self.p[index], self.q[index])

    def final_state(self):
        return self.state(-1)


def action_proxy(spectrum):
    """I_j = N gamma_j^2 / (8 omega_j), the leading-order action"""
    n = spectrum.n
    return n * spectrum.gaps**2 / (8.0 * omegas(n))


def energy_drift(record):
    """max_t |E(t) - E(0)| / |E(0)|"""
    reference = abs(record.energies[0])
    scale = reference if reference > 0 else 1.0
    return float(np.max(np.abs(record.energies - record.energies[0])) / scale)


def gap_drift(record):
    """Per-gap max_t |gamma_j(t) - gamma_j(0)| / max(gamma_j(0), 1e-8)"""
    if record.gaps.size == 0:
        return np.empty(0)
    deviation = np.max(np.abs(record.gaps - record.gaps[0]), axis=0)
    return deviation / np.maximum(np.abs(record.gaps[0]), 1e-8)


def weighted_action_drift(actions, n, s, sigma):
    """
    max_t (1/N) sum_k [k]^{2(s-1)} e^{2 sigma [k]} omega_k |I_k(t) - I_k(0)|

    Args:
        actions: array (samples, N-1)
    """
    actions = np.asarray(actions, dtype=float)
    table = mode_table(n)
    brackets = table.bracket[1:].astype(float)
    weights = brackets ** (2.0 * (s - 1.0)) * np.exp(2.0 * sigma * brackets) * table.omega[1:]
    drift = np.abs(actions - actions[0]) @ weights / n
    return float(np.max(drift))


class SymplecticIntegrator:
    """Kick-drift-kick leapfrog and its fourth-order Yoshida composition"""

    def __init__(self, model, config):
        self.model = model
        self.config = config
        self.logger = WorkbenchLogger(self.__class__.__name__)
        if config.scheme == "yoshida4":
            self.substeps = (YOSHIDA_OUTER, YOSHIDA_INNER, YOSHIDA_OUTER)
        else:
            self.substeps = (1.0,)

    def _leapfrog(self, p, q, dt):
        p = p + 0.5 * dt * self.model.force(q)
        q = q + dt * p
        p = p + 0.5 * dt * self.model.force(q)
        return p, q

    def step(self, p, q, dt=None):
        dt = self.config.dt if dt is None else dt
        for weight in self.substeps:
            p, q = self._leapfrog(p, q, weight * dt)
        return p, q

    def run(self, state):
        """
        Integrate from state and record samples.

        Raises:
            IntegrationError: the first step producing a non-finite state
        """
        cfg = self.config
        cfg.check_stability(state.n_particles)
        self.logger.info(
            f"🚀 Integrating {self.model.name} N={state.n_particles}: "
            f"{cfg.steps} steps, dt={cfg.dt:.4g}, scheme={cfg.scheme}"
        )
        started = time.perf_counter()

        p, q = state.p.copy(), state.q.copy()
        samples = {"times": [], "p": [], "q": [], "energies": [], "modes": []}
        gap_samples = {"times": [], "gaps": [], "actions": []}
        self._record(samples, gap_samples, 0, p, q)

        with np.errstate(over="ignore", invalid="ignore"):
            for step in range(1, cfg.steps + 1):
                p, q = self.step(p, q)
                if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
                    self.logger.error(f"❌ Non-finite state at step {step}")
                    raise IntegrationError(step, "state became non-finite")
                self._record(samples, gap_samples, step, p, q)

        self.logger.performance_metric("integration time", round(time.perf_counter() - started, 3))
        n = state.n_particles
        return TrajectoryRecord(
            times=np.asarray(samples["times"]),
            p=np.asarray(samples["p"]),
            q=np.asarray(samples["q"]),
            energies=np.asarray(samples["energies"]),
            mode_energies=np.asarray(samples["modes"]),
            gap_times=np.asarray(gap_samples["times"]),
            gaps=np.asarray(gap_samples["gaps"]).reshape(-1, n - 1),
            actions=np.asarray(gap_samples["actions"]).reshape(-1, n - 1),
        )

    def _record(self, samples, gap_samples, step, p, q):
        cfg = self.config
        record_sample = step % cfg.record_every == 0
        record_gaps = cfg.gap_every > 0 and step % cfg.gap_every == 0
        if not (record_sample or record_gaps):
            return
        current = LatticeState(p, q)
        if record_sample:
            samples["times"].append(step * cfg.dt)
            samples["p"].append(p.copy())
            samples["q"].append(q.copy())
            samples["energies"].append(self.model.energy(current))
            samples["modes"].append(mode_energies(current.project_to_reduced()))
        if record_gaps:
            spectrum = eigen_doubled(flaschka(current))
            gap_samples["times"].append(step * cfg.dt)
            gap_samples["gaps"].append(spectrum.gaps)
            gap_samples["actions"].append(action_proxy(spectrum))


def integrate(state, model, config):
    """Run one trajectory; see SymplecticIntegrator.run"""
    return SymplecticIntegrator(model, config).run(state)


def flip_momenta(state):
    return LatticeState(-state.p, state.q)
