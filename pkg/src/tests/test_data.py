# src/tests/test_data.py

import numpy as np

from src.core.fourier import XYCoords
from src.core.lattice import LatticeState, h0
from src.core.spectral import FlaschkaCoords

# Lattice sizes exercised by most suites
SMALL_N_VALUES = [4, 8, 16]
GAP_IDENTITY_N_VALUES = [4, 8, 16, 32]
GAP_IDENTITY_SAMPLES = 50
GAP_IDENTITY_RTOL = 1e-10

# Fourier identities: lattice sizes, random states per size and tolerance
IDENTITY_N_VALUES = [4, 8, 16, 64]
IDENTITY_SAMPLES = 100
IDENTITY_TOL = 1e-12

# Central finite-difference step and the tolerance it supports
FD_STEP = 1e-5
FD_TOL = 1e-6

# Expected values
CHI_N8 = 0.4882
MU_RANGE = (0.0506, 0.0508)


def random_state(rng, n, amplitude=1e-3, reduce=True):
    """Gaussian momenta and positions of the given size"""
    p = amplitude * rng.standard_normal(n)
    q = amplitude * rng.standard_normal(n)
    return LatticeState.from_arrays(p, q, reduce=reduce)


def random_flaschka(rng, n, amplitude=1e-3, constrained=True):
    """Real (b, a) with max entry equal to amplitude, optionally projected onto the constraints"""
    b = rng.uniform(-1.0, 1.0, n)
    a = rng.uniform(-1.0, 1.0, n)
    scale = amplitude / max(np.max(np.abs(b)), np.max(np.abs(a)))
    coords = FlaschkaCoords(n, scale * b, scale * a)
    return coords.project_to_constrained() if constrained else coords


def random_xy(rng, n, amplitude=1.0):
    """Real linear Birkhoff coordinates"""
    return XYCoords(n, amplitude * rng.standard_normal(n - 1), amplitude * rng.standard_normal(n - 1))


def state_with_specific_energy(rng, n, target):
    """Reduced random state rescaled so that H_0 / N equals target"""
    state = random_state(rng, n, amplitude=1.0)
    factor = np.sqrt(target * n / h0(state))
    return LatticeState(factor * state.p, factor * state.q, reduced=True)


def packet_params(**overrides):
    """Packet parameters as the experiment runner sees them"""
    params = {
        "beta": 1.0,
        "R": 0.5,
        "sigma": 0.5,
        "s": 1.0,
        "phase": 0.0,
        "t_max": 50.0,
        "dt": None,
        "max_steps": 1_000_000,
        "integrator": "yoshida4",
        "sample_every": 20,
        "fit_k_max": None,
        "fit_t_start": 0.0,
        "workers": None,
    }
    params.update(overrides)
    return params
