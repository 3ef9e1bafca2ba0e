# src/core/fourier.py

"""
Discrete Fourier transform, linear Birkhoff variables and weighted mode norms.

Conventions:
    dft(u)_k = N^{-1/2} sum_j u_j exp(2 pi i j k / N)
    omega_k  = 2 sin(k pi / N),  [k]_N = min(k mod N, N - k mod N)
    xi_k  = (p^_k + i omega_k q^_k) / sqrt(2 omega_k)
    eta_k = (p^_{N-k} - i omega_k q^_{N-k}) / sqrt(2 omega_k),   k = 1..N-1
    X = (xi + eta)/sqrt(2),  Y = (xi - eta)/(i sqrt(2))

Mode vectors are stored for k = 1..N-1 at array positions 0..N-2.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from src.core.errors import FourierError
from src.core.lattice import LatticeState
from src.core.majorant import TruncatedMap

REALITY_TOL = 1e-12


class ModeTable(NamedTuple):
    k: np.ndarray
    bracket: np.ndarray
    omega: np.ndarray


@lru_cache(maxsize=64)
def mode_table(n):
    """Cached k, [k]_N and omega_k for k = 0..N-1 (omega_0 = 0)"""
    if n < 1:
        raise FourierError(f"N must be positive, got {n}")
    k = np.arange(n)
    brackets = np.minimum(k, n - k)
    omega_values = 2.0 * np.sin(k * np.pi / n)
    omega_values[0] = 0.0
    for array in (k, brackets, omega_values):
        array.setflags(write=False)
    return ModeTable(k, brackets, omega_values)


def bracket(k, n):
    """[k]_N = min(|k mod N|, |N - k mod N|)"""
    r = int(k) % n
    return min(r, n - r)


def omega(n, k):
    """Linear frequency of mode k, 1 <= k <= N-1"""
    if not 1 <= k <= n - 1:
        raise FourierError(f"mode index k={k} outside 1..{n - 1}")
    return float(mode_table(n).omega[k])


def omegas(n):
    """omega_k for k = 1..N-1"""
    return mode_table(n).omega[1:]


@lru_cache(maxsize=16)
def _dft_matrix(n):
    j = np.arange(n)
    matrix = np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)
    matrix.setflags(write=False)
    return matrix


def _use_fft(n, method):
    if method not in ("auto", "fft", "direct"):
        raise FourierError(f"unknown DFT method '{method}'")
    if method == "auto":
        return n & (n - 1) == 0
    return method == "fft"


def dft(u, method="auto"):
    """
    Unitary DFT with the + sign in the exponent.

    Args:
        u: complex vector of length N >= 1
        method: "direct" (O(N^2) reference), "fft" or "auto" (FFT for powers of two)
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 1 or u.size < 1:
        raise FourierError("dft expects a non-empty vector")
    if _use_fft(u.size, method):
        return np.fft.ifft(u, norm="ortho")
    return _dft_matrix(u.size) @ u


def idft(u_hat, method="auto"):
    """Inverse of dft"""
    u_hat = np.asarray(u_hat, dtype=complex)
    if u_hat.ndim != 1 or u_hat.size < 1:
        raise FourierError("idft expects a non-empty vector")
    if _use_fft(u_hat.size, method):
        return np.fft.fft(u_hat, norm="ortho")
    return _dft_matrix(u_hat.size).conj() @ u_hat


def circular_convolution(u, v):
    """(u * v)_j = sum_k u_k v_{j-k} with periodic wrap, by direct summation"""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 1:
        raise FourierError(f"convolution needs equal-length vectors, got {u.shape} and {v.shape}")
    n = u.size
    index = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return v[index] @ u


@dataclass(frozen=True)
class NormParams:
    s: float = 0.0
    sigma: float = 0.0
    nu: float = 1.0

    def __post_init__(self):
        if self.s < 0:
            raise FourierError(f"Sobolev index s must be >= 0, got {self.s}")
        if self.sigma < 0:
            raise FourierError(f"analyticity width sigma must be >= 0, got {self.sigma}")
        if not 0.0 <= self.nu <= 1.0:
            raise FourierError(f"Gevrey exponent nu must lie in [0, 1], got {self.nu}")


@dataclass(frozen=True)
class ModeCoords:
    """Complex linear Birkhoff coordinates (xi_k, eta_k), k = 1..N-1"""

    n: int
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        xi = np.array(self.xi, dtype=complex, copy=True)
        eta = np.array(self.eta, dtype=complex, copy=True)
        if xi.shape != (self.n - 1,) or eta.shape != (self.n - 1,):
            raise FourierError(f"xi and eta must have length N-1={self.n - 1}")
        xi.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def zeros(cls, n):
        return cls(n, np.zeros(n - 1), np.zeros(n - 1))

    def is_real(self, tol=1e-14):
        """Real subspace: eta_k = conj(xi_k)"""
        scale = max(1.0, float(np.max(np.abs(self.xi), initial=0.0)))
        return bool(np.all(np.abs(self.eta - self.xi.conj()) <= tol * scale))

    def to_xy(self):
        X = (self.xi + self.eta) / np.sqrt(2.0)
        Y = (self.xi - self.eta) / (1j * np.sqrt(2.0))
        return XYCoords(self.n, X, Y)

    def as_vector(self):
        return np.concatenate([self.xi, self.eta])

    @classmethod
    def from_vector(cls, n, vector):
        vector = np.asarray(vector, dtype=complex)
        return cls(n, vector[: n - 1], vector[n - 1:])


@dataclass(frozen=True)
class XYCoords:
    """Linear Birkhoff coordinates (X_k, Y_k); real for real states"""

    n: int
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X)
        Y = np.asarray(self.Y)
        if X.shape != (self.n - 1,) or Y.shape != (self.n - 1,):
            raise FourierError(f"X and Y must have length N-1={self.n - 1}")
        scale = max(1.0, float(np.max(np.abs(X), initial=0.0)), float(np.max(np.abs(Y), initial=0.0)))
        if np.iscomplexobj(X) or np.iscomplexobj(Y):
            if np.max(np.abs(np.imag(X)), initial=0.0) <= REALITY_TOL * scale and np.max(
                np.abs(np.imag(Y)), initial=0.0
            ) <= REALITY_TOL * scale:
                X, Y = np.real(X), np.real(Y)
        X = np.array(X, copy=True)
        Y = np.array(Y, copy=True)
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    def to_modes(self):
        xi = (self.X + 1j * self.Y) / np.sqrt(2.0)
        eta = (self.X - 1j * self.Y) / np.sqrt(2.0)
        return ModeCoords(self.n, xi, eta)


def _as_modes(coords):
    if isinstance(coords, XYCoords):
        return coords.to_modes()
    if isinstance(coords, ModeCoords):
        return coords
    raise FourierError(f"expected ModeCoords or XYCoords, got {type(coords).__name__}")


def _require_reduced(state):
    if not state.is_reduced():
        raise FourierError("linear Birkhoff variables need a zero-mean (reduced) state")


def fourier_to_modes(p_hat, q_hat):
    """(p^, q^) of length N to ModeCoords; the k = 0 components are ignored"""
    p_hat = np.asarray(p_hat, dtype=complex)
    q_hat = np.asarray(q_hat, dtype=complex)
    n = p_hat.size
    w = omegas(n)
    root = np.sqrt(2.0 * w)
    p_reflected = p_hat[1:][::-1]
    q_reflected = q_hat[1:][::-1]
    xi = (p_hat[1:] + 1j * w * q_hat[1:]) / root
    eta = (p_reflected - 1j * w * q_reflected) / root
    return ModeCoords(n, xi, eta)


def modes_to_fourier(coords):
    """
    The linear map T: (xi, eta) -> (p^, q^), with p^_0 = q^_0 = 0.

    Returns:
        (p_hat, q_hat) complex vectors of length N
    """
    modes = _as_modes(coords)
    n = modes.n
    w = omegas(n)
    eta_reflected = modes.eta[::-1]
    p_hat = np.zeros(n, dtype=complex)
    q_hat = np.zeros(n, dtype=complex)
    p_hat[1:] = np.sqrt(w / 2.0) * (modes.xi + eta_reflected)
    q_hat[1:] = (modes.xi - eta_reflected) / (1j * np.sqrt(2.0 * w))
    return p_hat, q_hat


def modes_to_arrays(coords):
    """(p, q) as complex arrays; complex unless the coordinates are real"""
    p_hat, q_hat = modes_to_fourier(coords)
    return idft(p_hat), idft(q_hat)


def to_modes(state):
    _require_reduced(state)
    return fourier_to_modes(dft(state.p), dft(state.q))


def to_linear_birkhoff(state):
    """Reduced LatticeState -> XYCoords"""
    return to_modes(state).to_xy()


def from_linear_birkhoff(coords):
    """XYCoords or ModeCoords on the real subspace -> reduced LatticeState"""
    p, q = modes_to_arrays(coords)
    scale = max(1.0, float(np.max(np.abs(p))), float(np.max(np.abs(q))))
    if max(np.max(np.abs(p.imag)), np.max(np.abs(q.imag))) > REALITY_TOL * scale:
        raise FourierError("coordinates do not describe a real state (eta != conj(xi))")
    return LatticeState(p.real, q.real).project_to_reduced()


def _mode_weights(n, params, floor_one):
    table = mode_table(n)
    brackets = table.bracket.astype(float)
    if floor_one:
        brackets = np.maximum(brackets, 1.0)
    return brackets ** (2.0 * params.s) * np.exp(2.0 * params.sigma * brackets**params.nu)


def sobolev_norm(coords, params=NormParams()):
    """
    Discrete Sobolev-analytic (Gevrey for nu < 1) norm
    ||(X,Y)||^2 = (1/N) sum_k [k]^{2s} e^{2 sigma [k]^nu} omega_k (|X_k|^2 + |Y_k|^2)/2.
    """
    modes = _as_modes(coords)
    n = modes.n
    weights = _mode_weights(n, params, floor_one=False)[1:] * omegas(n)
    density = (np.abs(modes.xi) ** 2 + np.abs(modes.eta) ** 2) / 2.0
    return float(np.sqrt(np.sum(weights * density) / n))


def fourier_norm(u, params=NormParams()):
    """||u||^2 = (1/N) sum_k max(1,[k])^{2s} e^{2 sigma [k]} |u^_k|^2 (no omega weight)"""
    u = np.asarray(u)
    n = u.size
    weights = _mode_weights(n, NormParams(params.s, params.sigma), floor_one=True)
    return float(np.sqrt(np.sum(weights * np.abs(dft(u)) ** 2) / n))


def flaschka_norm(b, a, params=NormParams()):
    """||(b,a)||^2 = (1/2N) sum_k max(1,[k])^{2s} e^{2 sigma [k]} (|b^_k|^2 + 4|a^_k|^2)"""
    b = np.asarray(b)
    n = b.size
    weights = _mode_weights(n, NormParams(params.s, params.sigma), floor_one=True)
    density = np.abs(dft(b)) ** 2 + 4.0 * np.abs(dft(a)) ** 2
    return float(np.sqrt(np.sum(weights * density) / (2.0 * n)))


def mode_energies(state):
    """E_k = (|p^_k|^2 + omega_k^2 |q^_k|^2)/2 for k = 1..N-1"""
    _require_reduced(state)
    n = state.n_particles
    p_hat = dft(state.p)[1:]
    q_hat = dft(state.q)[1:]
    return 0.5 * (np.abs(p_hat) ** 2 + omegas(n) ** 2 * np.abs(q_hat) ** 2)


def specific_energies(state):
    return mode_energies(state) / state.n_particles


def time_average(times, values):
    """
    Running average (1/t) int_0^t f(s) ds by the trapezoidal rule.

    Args:
        times: uniformly spaced sample times
        values: samples, time along axis 0

    Returns:
        array shaped like values; the first entry equals values[0]
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size == 0 or values.shape[0] == 0:
        raise FourierError("time_average needs a non-empty series")
    if values.shape[0] != times.size:
        raise FourierError("times and values have different lengths")
    if times.size == 1:
        return values.copy()
    steps = np.diff(times)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise FourierError("time_average needs uniformly increasing sample times")

    integral = cumulative_trapezoid(values, times, axis=0, initial=0.0)
    elapsed = (times - times[0]).reshape((-1,) + (1,) * (values.ndim - 1))
    averages = np.empty_like(values)
    averages[0] = values[0]
    averages[1:] = integral[1:] / elapsed[1:]
    return averages


class Interpolants:
    """
    Trigonometric interpolants of a state: p_j = beta(j/N), q_j - q_{j+1} = alpha(j/N).

    Frequencies use the symmetric representatives k' in (-N/2, N/2].
    """

    def __init__(self, state):
        _require_reduced(state)
        n = state.n_particles
        self.n = n
        k = np.arange(n)
        self.frequencies = np.where(k <= n // 2, k, k - n)
        q_hat = dft(state.q)
        self.alpha_hat = q_hat * (1.0 - np.exp(-2j * np.pi * k / n))
        self.beta_hat = dft(state.p)

    def _evaluate(self, coefficients, x, order):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        phases = np.exp(-2j * np.pi * np.outer(x, self.frequencies))
        factors = (-2j * np.pi * self.frequencies) ** order
        return phases @ (coefficients * factors) / np.sqrt(self.n)

    def alpha(self, x, order=0):
        return self._evaluate(self.alpha_hat, x, order)

    def beta(self, x, order=0):
        return self._evaluate(self.beta_hat, x, order)


def interpolants(state):
    return Interpolants(state)


def interpolant_hs_norm(state, s, quad_points=None):
    """
    Quadrature evaluation of the interpolant norms.

    Returns:
        (l2_part, derivative_part) with
        l2_part = (||alpha||^2 + ||beta||^2)/2 and
        derivative_part = (2 pi)^{-2s} (||d^s alpha||^2 + ||d^s beta||^2)/2;
        they equal ||(X,Y)||^2_{0,0} and ||(X,Y)||^2_{s,0} respectively.
    """
    if int(s) != s or s < 0:
        raise FourierError(f"quadrature norm needs an integer s >= 0, got {s}")
    interp = Interpolants(state)
    points = quad_points or 4 * interp.n
    x = np.arange(points) / points

    def l2_squared(values):
        return float(np.mean(np.abs(values) ** 2))

    l2_part = 0.5 * (l2_squared(interp.alpha(x)) + l2_squared(interp.beta(x)))
    derivative = l2_squared(interp.alpha(x, int(s))) + l2_squared(interp.beta(x, int(s)))
    derivative_part = 0.5 * derivative / (2.0 * np.pi) ** (2 * s)
    return l2_part, derivative_part


def _cubic_terms(n):
    """Selection-rule index triples and coefficients of H_1 in (xi, eta)"""
    w = mode_table(n).omega
    root = np.sqrt(w)
    k1, k2 = np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij")
    k1 = k1.ravel()
    k2 = k2.ravel()
    prefactor = 1.0 / (12.0 * np.sqrt(2.0 * n))

    k3 = (-k1 - k2) % n
    keep = k3 != 0
    pure = (k1[keep], k2[keep], k3[keep])
    pure_sign = (-1.0) ** ((pure[0] + pure[1] + pure[2]) // n)
    pure_coef = prefactor * pure_sign * root[pure[0]] * root[pure[1]] * root[pure[2]]

    k3 = (k1 + k2) % n
    keep = k3 != 0
    mixed = (k1[keep], k2[keep], k3[keep])
    mixed_sign = (-1.0) ** ((mixed[0] + mixed[1] - mixed[2]) // n)
    mixed_coef = 3.0 * prefactor * mixed_sign * root[mixed[0]] * root[mixed[1]] * root[mixed[2]]
    return pure, pure_coef, mixed, mixed_coef


def h1_complex(coords):
    """
    Cubic Hamiltonian H_1 in the variables (xi, eta): the two selection-rule sums
    k1+k2+k3 = 0 mod N (xi xi xi + eta eta eta) and k1+k2-k3 = 0 mod N
    (xi xi eta + eta eta xi), each weighted by (-1)^{(k1+k2 +- k3)/N} sqrt(w1 w2 w3).
    """
    modes = _as_modes(coords)
    n = modes.n
    xi = np.concatenate([[0.0], modes.xi])
    eta = np.concatenate([[0.0], modes.eta])
    pure, pure_coef, mixed, mixed_coef = _cubic_terms(n)
    a, b, c = pure
    total = np.sum(pure_coef * (xi[a] * xi[b] * xi[c] + eta[a] * eta[b] * eta[c]))
    a, b, c = mixed
    total += np.sum(mixed_coef * (xi[a] * xi[b] * eta[c] + eta[a] * eta[b] * xi[c]))
    return complex(total)


def cubic_hamiltonian_map(n):
    """H_1 as a scalar TruncatedMap in the paired variables (xi_1..xi_{N-1}, eta_1..eta_{N-1})"""
    pairs = n - 1
    terms = {}

    def add(xi_modes, eta_modes, coefficient):
        exponent = [0] * (2 * pairs)
        for k in xi_modes:
            exponent[k - 1] += 1
        for k in eta_modes:
            exponent[pairs + k - 1] += 1
        key = tuple(exponent)
        terms[key] = terms.get(key, 0.0) + complex(coefficient)

    pure, pure_coef, mixed, mixed_coef = _cubic_terms(n)
    for a, b, c, coefficient in zip(*pure, pure_coef):
        add((a, b, c), (), coefficient)
        add((), (a, b, c), coefficient)
    for a, b, c, coefficient in zip(*mixed, mixed_coef):
        add((a, b), (c,), coefficient)
        add((c,), (a, b), coefficient)
    return TruncatedMap.scalar(2 * pairs, 3, terms, pairs=pairs)
