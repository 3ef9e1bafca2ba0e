# src/core/lattice.py

"""
Periodic N-particle chain: state container and the Toda, FPU and harmonic
Hamiltonians together with their Taylor pieces.

Indices are periodic, q_N = q_0 and p_N = p_0. Bond stretches are
x_j = q_j - q_{j+1}.
"""

import math
from dataclasses import dataclass

import numpy as np

from src.core.errors import LatticeError

REDUCED_TOL = 1e-12


def _readonly(values):
    array = np.array(values, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def _fsum(values):
    return math.fsum(np.ravel(values).tolist())


@dataclass(frozen=True)
class LatticeState:
    """Real momenta and positions of the periodic chain."""

    p: np.ndarray
    q: np.ndarray
    reduced: bool = False

    def __post_init__(self):
        p = _readonly(self.p)
        q = _readonly(self.q)
        if p.ndim != 1 or p.shape != q.shape:
            raise LatticeError(f"p and q must be vectors of equal length, got {p.shape} and {q.shape}")
        if p.size < 2:
            raise LatticeError(f"a lattice needs N >= 2 particles, got {p.size}")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise LatticeError("state contains non-finite values")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if self.reduced and not self.is_reduced():
            raise LatticeError("state flagged as reduced violates sum(p) = sum(q) = 0")

    @property
    def n_particles(self):
        return self.p.size

    @classmethod
    def zeros(cls, n_particles):
        """Equilibrium state of an N-particle chain"""
        return cls(np.zeros(n_particles), np.zeros(n_particles), reduced=True)

    @classmethod
    def from_arrays(cls, p, q, reduce=False):
        """Build a state, optionally projecting onto the zero-mean subspace"""
        state = cls(p, q)
        return state.project_to_reduced() if reduce else state

    def is_reduced(self, tol=REDUCED_TOL):
        """Check |sum p| and |sum q| against tol * N * max|.|"""
        n = self.n_particles
        p_scale = float(np.max(np.abs(self.p)))
        q_scale = float(np.max(np.abs(self.q)))
        return abs(_fsum(self.p)) <= tol * n * p_scale and abs(_fsum(self.q)) <= tol * n * q_scale

    def project_to_reduced(self):
        """Subtract the means of p and q"""
        n = self.n_particles
        p = self.p - _fsum(self.p) / n
        q = self.q - _fsum(self.q) / n
        return LatticeState(p, q, reduced=True)

    def with_arrays(self, p, q):
        """New state with the same reduced flag"""
        return LatticeState(p, q, reduced=self.reduced)

    def norm(self):
        return float(np.sqrt(_fsum(self.p**2) + _fsum(self.q**2)))


def bond_stretch(q):
    """x_j = q_j - q_{j+1} with cyclic wrap"""
    q = np.asarray(q, dtype=float)
    return q - np.roll(q, -1)


def toda_energy(state):
    """1/2 sum p_j^2 + sum exp(q_j - q_{j+1}); equals N at equilibrium"""
    return 0.5 * _fsum(state.p**2) + _fsum(np.exp(bond_stretch(state.q)))


def relative_toda_energy(state):
    """toda_energy - N, evaluated through expm1 to keep small-amplitude precision"""
    return 0.5 * _fsum(state.p**2) + _fsum(np.expm1(bond_stretch(state.q)))


def fpu_potential(x, beta):
    """U(x) = x^2/2 + x^3/6 + beta x^4/24"""
    x = np.asarray(x, dtype=float)
    return x**2 / 2.0 + x**3 / 6.0 + beta * x**4 / 24.0


def fpu_energy(state, beta):
    return 0.5 * _fsum(state.p**2) + _fsum(fpu_potential(bond_stretch(state.q), beta))


def fpu_cubic_energy(state):
    """FPU energy truncated after the cubic term (alpha-chain with unit coefficient)"""
    x = bond_stretch(state.q)
    return 0.5 * _fsum(state.p**2) + _fsum(x**2 / 2.0 + x**3 / 6.0)


def h0(state):
    """Quadratic part sum (p_j^2 + (q_j - q_{j+1})^2)/2"""
    return 0.5 * (_fsum(state.p**2) + _fsum(bond_stretch(state.q) ** 2))


def h1(q):
    """Cubic part sum (q_j - q_{j+1})^3/6"""
    return _fsum(bond_stretch(q) ** 3) / 6.0


def h_l(q, l):
    """
    Higher Taylor piece H_l(q) = sum (q_j - q_{j+1})^(l+2) / (l+2)!.

    Args:
        q: positions
        l: order, must be >= 2 (use h0 and h1 for the quadratic and cubic parts)

    Returns:
        float
    """
    if int(l) != l or l < 2:
        raise LatticeError(f"h_l requires an integer l >= 2, got {l}")
    l = int(l)
    return _fsum(bond_stretch(q) ** (l + 2)) / math.factorial(l + 2)
