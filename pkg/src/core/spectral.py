# src/core/spectral.py

"""
Flaschka variables, the doubled periodic Jacobi matrix and the spectral
coordinates built from it.

    (b_j, a_j) = (-p_j, exp((q_j - q_{j+1})/2) - 1)

L(b, a) is the 2N x 2N symmetric matrix with diagonal b_{k mod N}, entries
1 + a_{k mod N} at (k, k+1) and the corner 1 + a_{N-1} at (0, 2N-1). Its
eigenvalues satisfy lambda_0 < lambda_1 <= lambda_2 < ... < lambda_{2N-1};
the j-th gap is gamma_j = lambda_{2j} - lambda_{2j-1}.

Free eigenvectors g_m(k) = exp(i pi (N+m) k / N) / sqrt(2N) have eigenvalue
-2 cos(m pi / N). Spectral bilinear forms use the transpose, never the
conjugate transpose, so z_j = D_j f^T (L - lambda0_{2j}) f with f = U_j g_j.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sl

from configs.environment import EnvironmentConfig
from src.core.errors import LatticeError, SpectralError
from src.core.fourier import ModeCoords, dft, modes_to_arrays, omegas
from src.core.lattice import LatticeState, bond_stretch
from src.utils.logger import WorkbenchLogger

CONSTRAINT_TOL = 1e-12
MIN_QUAD_POINTS = 16
CONTOUR_TRACE_TOL = 1e-6

logger = WorkbenchLogger("spectral")


def _as_vector(values):
    array = np.asarray(values)
    if np.iscomplexobj(array) and not np.any(array.imag):
        array = array.real
    array = np.array(array, dtype=complex if np.iscomplexobj(array) else float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FlaschkaCoords:
    n: int
    b: np.ndarray
    a: np.ndarray
    constrained: bool = False

    def __post_init__(self):
        b = _as_vector(self.b)
        a = _as_vector(self.a)
        if self.n < 2 or b.shape != (self.n,) or a.shape != (self.n,):
            raise LatticeError(f"b and a must be vectors of length N={self.n} >= 2")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(a))):
            raise LatticeError("Flaschka coordinates contain non-finite values")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)
        if self.constrained and not self.satisfies_constraints():
            raise LatticeError("coordinates flagged as constrained violate sum(b) = 0, prod(1+a) = 1")

    @classmethod
    def zeros(cls, n):
        return cls(n, np.zeros(n), np.zeros(n), constrained=True)

    @classmethod
    def from_arrays(cls, b, a):
        """Build coordinates and record whether the constraints hold"""
        b = np.asarray(b)
        coords = cls(b.size, b, a)
        if coords.satisfies_constraints():
            return cls(coords.n, coords.b, coords.a, constrained=True)
        return coords

    @property
    def is_real(self):
        return not (np.iscomplexobj(self.b) or np.iscomplexobj(self.a))

    def satisfies_constraints(self, tol=CONSTRAINT_TOL):
        total = abs(complex(np.sum(self.b)))
        product = complex(np.prod(1.0 + self.a))
        return total <= tol * max(1.0, float(np.max(np.abs(self.b)))) * self.n and abs(product - 1.0) <= tol * self.n

    def project_to_constrained(self):
        """Subtract the mean of b and rescale 1 + a by its geometric mean"""
        if not self.is_real or np.any(self.a <= -1.0):
            raise LatticeError("projection needs real coordinates with a_j > -1")
        b = self.b - np.mean(self.b)
        log_one_plus_a = np.log1p(self.a)
        a = np.expm1(log_one_plus_a - np.mean(log_one_plus_a))
        return FlaschkaCoords(self.n, b, a, constrained=True)

    def scaled(self, factor):
        return FlaschkaCoords(self.n, factor * self.b, factor * self.a)

    def max_norm(self):
        return float(max(np.max(np.abs(self.b)), np.max(np.abs(self.a))))


def _flaschka_arrays(p, q):
    q = np.asarray(q)
    return -np.asarray(p), np.expm1((q - np.roll(q, -1)) / 2.0)


def flaschka(state):
    """LatticeState -> FlaschkaCoords; constrained when sum(p) = 0"""
    b = -state.p
    a = np.expm1(bond_stretch(state.q) / 2.0)
    return FlaschkaCoords.from_arrays(b, a)


def inverse_flaschka(f):
    """
    Recover (p, q) from real coordinates, fixing the gauge sum(q) = 0.

    Raises:
        LatticeError: complex data, a_j <= -1, or bond stretches not summing to zero
    """
    if not f.is_real:
        raise LatticeError("inverse Flaschka map needs real coordinates")
    if np.any(f.a <= -1.0):
        raise LatticeError("inverse Flaschka map needs a_j > -1 for every j")
    stretches = 2.0 * np.log1p(f.a)
    if abs(math.fsum(stretches)) > 1e-10 * max(1.0, float(np.max(np.abs(stretches)))) * f.n:
        raise LatticeError("bond stretches do not close around the ring (prod(1+a) != 1)")
    q = np.concatenate([[0.0], -np.cumsum(stretches[:-1])])
    return LatticeState(-f.b, q - np.mean(q))


def flaschka_fourier(f):
    """(b^, a^) with the unitary DFT"""
    return dft(f.b), dft(f.a)


def theta_xi(modes):
    """Theta_Xi: linear Birkhoff coordinates -> Flaschka coordinates, complex data allowed"""
    p, q = modes_to_arrays(modes)
    if modes.is_real():
        p, q = p.real, q.real
    b, a = _flaschka_arrays(p, q)
    return FlaschkaCoords(modes.n, b, a)


def dtheta_xi_zero(n):
    """
    Differential of Theta_Xi at the origin as a (2N, 2(N-1)) matrix.

    Input vector [xi_1..xi_{N-1}, eta_1..eta_{N-1}], output [b^_0..b^_{N-1}, a^_0..a^_{N-1}]:
        B^_k = -(omega_k/2)^{1/2} (xi_k + eta_{N-k})
        A^_k = -i varpi_k (2 omega_k)^{-1/2} (xi_k - eta_{N-k}),  varpi_k = (1 - e^{-2 pi i k/N})/2
    """
    if n < 2:
        raise LatticeError(f"N must be >= 2, got {n}")
    w = omegas(n)
    matrix = np.zeros((2 * n, 2 * (n - 1)), dtype=complex)
    for k in range(1, n):
        xi_col = k - 1
        eta_col = (n - 1) + (n - k - 1)
        varpi = (1.0 - np.exp(-2j * np.pi * k / n)) / 2.0
        matrix[k, xi_col] = matrix[k, eta_col] = -np.sqrt(w[k - 1] / 2.0)
        a_coefficient = -1j * varpi / np.sqrt(2.0 * w[k - 1])
        matrix[n + k, xi_col] = a_coefficient
        matrix[n + k, eta_col] = -a_coefficient
    return matrix


def _doubled(n, diagonal, off_diagonal):
    size = 2 * n
    dtype = complex if np.iscomplexobj(diagonal) or np.iscomplexobj(off_diagonal) else float
    matrix = np.zeros((size, size), dtype=dtype)
    index = np.arange(size)
    following = (index + 1) % size
    matrix[index, index] = diagonal[index % n]
    matrix[index, following] = off_diagonal[index % n]
    matrix[following, index] = off_diagonal[index % n]
    return matrix


def build_doubled_jacobi(f):
    return _doubled(f.n, f.b, 1.0 + f.a)


def doubled_perturbation(f):
    """L(b, a) - L(0, 0), assembled from (b, a) without forming 1 + a"""
    return _doubled(f.n, f.b, f.a)


def _free_shift(n, j):
    """L(0, 0) - lambda0_{2j}; annihilates the free cluster j"""
    return _doubled(n, np.full(n, -free_eigenvalue(n, j)), np.ones(n))


def _cluster_form(perturbation, free_shift, free_proj, left, right):
    """
    left^T (L - lambda0_{2j}) right, evaluated as
        left^T E right + h_l^T (L_0 - lambda0_{2j}) h_r,   h = (1 - P_{j0}) v

    Both terms are O(|(b, a)|) for vectors near the free cluster; P_{j0} v is
    annihilated by L_0 - lambda0_{2j}.
    """
    h_left = left - free_proj @ left
    h_right = right - free_proj @ right
    return left.T @ perturbation @ right + h_left.T @ free_shift @ h_right


def _cluster_gaps(f, vectors):
    """
    gamma_j as the eigenvalue splitting of L restricted to the span of the j-th
    eigenvector pair: for the 2x2 form [[r, s], [s, t]], gamma_j = hypot(r - t, 2s).
    """
    n = f.n
    perturbation = doubled_perturbation(f)
    gaps = np.empty(n - 1)
    for j in range(1, n):
        pair = vectors[:, list(pair_indices(n, j))].real
        form = _cluster_form(perturbation, _free_shift(n, j), free_projector(n, j), pair, pair)
        gaps[j - 1] = math.hypot(form[0, 0] - form[1, 1], form[0, 1] + form[1, 0])
    return gaps


@dataclass(frozen=True)
class SpectrumData:
    n: int
    lambdas: np.ndarray
    gaps: np.ndarray
    eigvecs: np.ndarray = None
    residual: float = 0.0

    def pair(self, j):
        return tuple(self.lambdas[list(pair_indices(self.n, j))])


def pair_indices(n, j):
    """Eigenvalue indices of the j-th cluster: (0,), (2j-1, 2j) or (2N-1,)"""
    if not 0 <= j <= n:
        raise SpectralError(f"cluster index j={j} outside 0..{n}")
    if j == 0:
        return (0,)
    if j == n:
        return (2 * n - 1,)
    return (2 * j - 1, 2 * j)


def _gaps(lambdas, n):
    return lambdas[2 : 2 * n - 1 : 2] - lambdas[1 : 2 * n - 2 : 2]


def _fix_phases(vectors):
    """Make the largest-magnitude component of each column real positive"""
    rows = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[rows, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)


def eigen_doubled(f):
    """
    Spectrum of the doubled Jacobi matrix.

    Real coordinates use a symmetric eigensolver with ordered eigenvalues, and
    the gaps come from the 2x2 restriction of L to each eigenvector pair rather
    than from differences of nearly equal eigenvalues. Complex coordinates are
    handled perturbatively with a general eigensolver sorted by real part.

    Raises:
        SpectralError: eigensolver failure or residual above tolerance
    """
    L = build_doubled_jacobi(f)
    try:
        if f.is_real:
            lambdas, vectors = sl.eigh(L)
        else:
            lambdas, vectors = sl.eig(L)
            order = np.lexsort((lambdas.imag, lambdas.real))
            lambdas, vectors = lambdas[order], vectors[:, order]
            vectors = vectors / np.linalg.norm(vectors, axis=0)
    except (sl.LinAlgError, ValueError) as e:
        raise SpectralError(f"eigensolver failed for N={f.n}: {e}") from e

    vectors = _fix_phases(vectors)
    residual = float(np.max(np.linalg.norm(L @ vectors - vectors * lambdas, axis=0)))
    scale = max(1.0, float(np.linalg.norm(L, 2)))
    if residual > EnvironmentConfig.EIGEN_RESIDUAL_TOL * scale:
        raise SpectralError(f"eigen residual {residual:.3e} exceeds tolerance for N={f.n}")
    logger.debug(f"Doubled Jacobi spectrum N={f.n}: residual {residual:.2e}")
    gaps = _cluster_gaps(f, vectors) if f.is_real else _gaps(lambdas, f.n)
    return SpectrumData(f.n, lambdas, gaps, vectors, residual)


def free_eigenvalue(n, m):
    return -2.0 * math.cos(m * math.pi / n)


def free_eigenvector(n, m):
    """g_m(k) = exp(i pi (N+m) k / N) / sqrt(2N), k = 0..2N-1"""
    k = np.arange(2 * n)
    return np.exp(1j * np.pi * (n + m) * k / n) / np.sqrt(2 * n)


def unperturbed_spectrum(n):
    """Closed-form spectrum and eigenvectors of L(0, 0); all gaps vanish"""
    if n < 2:
        raise SpectralError(f"N must be >= 2, got {n}")
    lambdas = np.empty(2 * n)
    vectors = np.empty((2 * n, 2 * n), dtype=complex)
    lambdas[0] = free_eigenvalue(n, 0)
    vectors[:, 0] = free_eigenvector(n, 0)
    for j in range(1, n):
        lambdas[2 * j - 1] = lambdas[2 * j] = free_eigenvalue(n, j)
        vectors[:, 2 * j - 1] = free_eigenvector(n, -j)
        vectors[:, 2 * j] = free_eigenvector(n, j)
    lambdas[2 * n - 1] = free_eigenvalue(n, n)
    vectors[:, 2 * n - 1] = free_eigenvector(n, n)

    L = build_doubled_jacobi(FlaschkaCoords.zeros(n))
    residual = float(np.max(np.linalg.norm(L @ vectors - vectors * lambdas, axis=0)))
    return SpectrumData(n, lambdas, np.zeros(n - 1), vectors, residual)


def free_projector(n, j):
    """P_{j0} = g_j g_j^H + g_{-j} g_{-j}^H (a single term for j = 0, N); real symmetric"""
    if not 0 <= j <= n:
        raise SpectralError(f"cluster index j={j} outside 0..{n}")
    g = free_eigenvector(n, j)
    projector = np.outer(g, g.conj())
    if 0 < j < n:
        projector = projector + np.outer(g.conj(), g)
    return projector.real


def separation_margin(n):
    """
    Smallest ratio |lambda0_{2j} - lambda0_{2k}| / (4|j^2 - k^2|/N^2) over j != k <= N/2.
    A value >= 1 confirms the free separation bound.
    """
    half = n // 2
    ratios = [
        abs(free_eigenvalue(n, j) - free_eigenvalue(n, k)) / (4.0 * abs(j * j - k * k) / n**2)
        for j in range(half + 1)
        for k in range(half + 1)
        if j != k
    ]
    return min(ratios) if ratios else math.inf


def _check_separation(spectrum, j):
    indices = pair_indices(spectrum.n, j)
    lambdas = spectrum.lambdas
    floor = np.finfo(float).eps * max(1.0, float(np.max(np.abs(lambdas))))
    threshold = EnvironmentConfig.SEPARATION_FACTOR * max(spectrum.residual, floor)
    distances = []
    if indices[0] > 0:
        distances.append(lambdas[indices[0]] - lambdas[indices[0] - 1])
    if indices[-1] < lambdas.size - 1:
        distances.append(lambdas[indices[-1] + 1] - lambdas[indices[-1]])
    if distances and min(distances) <= threshold:
        raise SpectralError(
            f"cluster j={j} is not separated from its neighbours (distance {min(distances):.3e})"
        )


def projector(f, j, spectrum=None):
    """
    Spectral projector onto the j-th eigenvalue cluster.

    Real data: sum of v v^T over the cluster's eigenvectors. Complex data are
    delegated to the contour quadrature.
    """
    if not f.is_real:
        return projector_contour(f, j)
    spectrum = spectrum or eigen_doubled(f)
    _check_separation(spectrum, j)
    vectors = spectrum.eigvecs[:, list(pair_indices(f.n, j))]
    return vectors @ vectors.T


def contour_radius(n, j):
    """min(<j>, <N-j>) / (2 N^2) with <j> = max(1, |j|)"""
    return min(max(1, abs(j)), max(1, abs(n - j))) / (2.0 * n**2)


def projector_contour(f, j, quad_points=None):
    """
    P_j = -(1/2 pi i) closed integral of (L - lambda)^{-1} over the circle about lambda0_{2j},
    by the trapezoidal rule.

    Raises:
        SpectralError: singular resolvent or a trace that does not match the cluster size
    """
    quad_points = quad_points or EnvironmentConfig.QUAD_POINTS
    if quad_points < MIN_QUAD_POINTS:
        raise SpectralError(f"contour quadrature needs at least {MIN_QUAD_POINTS} points, got {quad_points}")
    rank = len(pair_indices(f.n, j))
    L = build_doubled_jacobi(f).astype(complex)
    identity = np.eye(2 * f.n)
    centre = free_eigenvalue(f.n, j)
    radius = contour_radius(f.n, j)

    accumulated = np.zeros_like(L)
    for theta in 2.0 * np.pi * np.arange(quad_points) / quad_points:
        phase = np.exp(1j * theta)
        try:
            resolvent = sl.solve(L - (centre + radius * phase) * identity, identity)
        except sl.LinAlgError as e:
            raise SpectralError(f"resolvent is singular on the contour of cluster j={j}") from e
        accumulated += phase * resolvent
    result = -(radius / quad_points) * accumulated

    trace = complex(np.trace(result))
    if abs(trace - rank) > CONTOUR_TRACE_TOL:
        raise SpectralError(f"contour for cluster j={j} encloses trace {trace:.6f}, expected {rank}")
    return result


def transform_u(f, j, spectrum=None):
    """
    U_j = (1 - (P_j - P_{j0})^2)^{-1/2} P_j.

    Raises:
        SpectralError: when ||P_j - P_{j0}|| >= 1
    """
    P = projector(f, j, spectrum)
    difference = P - free_projector(f.n, j)
    size = float(np.linalg.norm(difference, 2))
    if size >= 1.0:
        raise SpectralError(f"||P_{j} - P_{j}0|| = {size:.3f} >= 1; transformation operator undefined")
    square = difference @ difference
    if f.is_real:
        mu, vectors = sl.eigh(square)
        mu = np.clip(mu, 0.0, None)
        inverse_root = (vectors / np.sqrt(1.0 - mu)) @ vectors.T
        return inverse_root @ P
    root = sl.sqrtm(np.eye(2 * f.n) - square)
    return sl.solve(root, P)


def transform_u_series(f, j, terms=12, spectrum=None):
    """
    Binomial-series form of U_j: sum_k C(2k, k) 4^{-k} (Q^{2k} P_{j0} + Q^{2k+1}), Q = P_j - P_{j0}.
    """
    P0 = free_projector(f.n, j)
    Q = projector(f, j, spectrum) - P0
    power = np.eye(2 * f.n, dtype=Q.dtype)
    total = np.zeros_like(Q)
    for k in range(terms):
        coefficient = math.comb(2 * k, k) / 4.0**k
        total = total + coefficient * (power @ P0 + power @ Q)
        power = power @ Q @ Q
    return total


def d_factor(n, j):
    """D_j = (2 omega_j / N)^{-1/2}"""
    return (2.0 * omegas(n)[j - 1] / n) ** -0.5


@dataclass(frozen=True)
class ZCoords:
    n: int
    z: np.ndarray
    w: np.ndarray

    def as_vector(self):
        return np.concatenate([self.z, self.w])

    def to_modes(self):
        return ModeCoords(self.n, self.z, self.w)


def z_map(f):
    """
    z_j = D_j f^T (L - lambda0_{2j}) f with f = U_j g_j, and w_j the same with g_{-j}.

    Returns:
        ZCoords for j = 1..N-1
    """
    n = f.n
    perturbation = doubled_perturbation(f)
    spectrum = eigen_doubled(f) if f.is_real else None
    z = np.empty(n - 1, dtype=complex)
    w = np.empty(n - 1, dtype=complex)
    for j in range(1, n):
        U = transform_u(f, j, spectrum)
        g = free_eigenvector(n, j)
        shift = _free_shift(n, j)
        free_proj = free_projector(n, j)
        f_plus = U @ g
        f_minus = U @ g.conj()
        scale = d_factor(n, j)
        z[j - 1] = scale * _cluster_form(perturbation, shift, free_proj, f_plus, f_plus)
        w[j - 1] = scale * _cluster_form(perturbation, shift, free_proj, f_minus, f_minus)
    return ZCoords(n, z, w)


def dz_zero(n):
    """
    Differential of Z at the origin as a (2(N-1), 2N) matrix acting on [b^, a^]:
        dz_j = (2 omega_j)^{-1/2} (b^_j - 2 e^{i j pi/N} a^_j)
        dw_j = (2 omega_j)^{-1/2} (b^_{N-j} - 2 e^{-i j pi/N} a^_{N-j})
    """
    if n < 2:
        raise SpectralError(f"N must be >= 2, got {n}")
    w = omegas(n)
    matrix = np.zeros((2 * (n - 1), 2 * n), dtype=complex)
    for j in range(1, n):
        scale = 1.0 / np.sqrt(2.0 * w[j - 1])
        matrix[j - 1, j] = scale
        matrix[j - 1, n + j] = -2.0 * np.exp(1j * j * np.pi / n) * scale
        matrix[n - 2 + j, n - j] = scale
        matrix[n - 2 + j, 2 * n - j] = -2.0 * np.exp(-1j * j * np.pi / n) * scale
    return matrix


def matrix_element(b_hat, a_hat, m, l):
    """
    x_m^l = <L_p g_m, g_{m-2l}> = (b^_l - 2 e^{i pi l/N} cos((m-l) pi/N) a^_l) / sqrt(N)

    Unchanged under l -> l + N.
    """
    n = len(b_hat)
    index = l % n
    return (b_hat[index] - 2.0 * np.exp(1j * np.pi * l / n) * np.cos((m - l) * np.pi / n) * a_hat[index]) / np.sqrt(n)


def _second_order(b_hat, a_hat, m, j):
    n = len(b_hat)
    total = 0.0 + 0.0j
    for l in range(n):
        if l % n == 0 or (l - m) % n == 0:
            continue
        denominator = free_eigenvalue(n, m - 2 * l) - free_eigenvalue(n, m)
        total += matrix_element(b_hat, a_hat, m, l) * matrix_element(b_hat, a_hat, m - 2 * l, m - l) / denominator
    return -d_factor(n, j) * total


def z2_taylor(n, b_hat, a_hat):
    """
    Second-order Taylor terms of Z at the origin, from the reduced resolvent of L_0:
        z^2_j = -D_j sum_{l != 0, j} x_j^l x_{j-2l}^{j-l} / (lambda^_{j-2l} - lambda^_j)
    and w^2_j the same with j replaced by -j.
    """
    b_hat = np.asarray(b_hat, dtype=complex)
    a_hat = np.asarray(a_hat, dtype=complex)
    if b_hat.shape != (n,) or a_hat.shape != (n,):
        raise SpectralError(f"Fourier data must have length N={n}")
    z = np.array([_second_order(b_hat, a_hat, j, j) for j in range(1, n)])
    w = np.array([_second_order(b_hat, a_hat, -j, j) for j in range(1, n)])
    return ZCoords(n, z, w)


def psi_map(modes):
    """Psi = -Z o Theta_Xi"""
    coords = z_map(theta_xi(modes))
    return ModeCoords(modes.n, -coords.z, -coords.w)


def gap_vector(state):
    """Spectral gaps gamma_1..gamma_{N-1} of a lattice state"""
    return eigen_doubled(flaschka(state)).gaps
