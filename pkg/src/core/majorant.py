# src/core/majorant.py

"""
Truncated power-series maps and the majorant calculus built on them.

A TruncatedMap stores, per output component, a sparse table from exponent
tuples to coefficients; every stored monomial has total degree <= max_degree.
Coefficients are either exact (int / fractions.Fraction) or complex floats;
exact maps keep composition, inversion and flow identities exact through
max_degree.

When ``pairs`` is set the variables are ordered (xi_1..xi_P, eta_1..eta_P)
and the torus action xi_j -> e^{i theta} xi_j, eta_j -> e^{-i theta} eta_j
gives each monomial the rotation weight m_j = K_j - L_j. Pair indices are
0-based.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from src.core.errors import MajorantError
from src.utils.logger import WorkbenchLogger

SERIES_S = math.pi**2 / 6.0
MU = 1.0 / (math.e * math.sqrt(32.0 * SERIES_S))

MAX_SERIES_N = 40
MAX_SERIES_R = 6

logger = WorkbenchLogger("majorant")


@dataclass(frozen=True)
class MajorantConstants:
    S: float = SERIES_S
    mu: float = MU


def _degree(exponent, graded=None):
    return sum(exponent if graded is None else exponent[:graded])


def _order_key(exponent):
    return (sum(exponent), exponent)


def _is_zero(value):
    return value == 0


def _canonical(table):
    """Drop zeros and order keys graded-lexicographically"""
    return {key: table[key] for key in sorted(table, key=_order_key) if not _is_zero(table[key])}


def _poly_mul(left, right, max_degree, graded=None):
    product = {}
    for e1, c1 in left.items():
        d1 = _degree(e1, graded)
        for e2, c2 in right.items():
            if d1 + _degree(e2, graded) > max_degree:
                continue
            key = tuple(a + b for a, b in zip(e1, e2))
            product[key] = product.get(key, 0) + c1 * c2
    return {key: value for key, value in product.items() if not _is_zero(value)}


def _poly_add(left, right, factor=1):
    total = dict(left)
    for key, value in right.items():
        total[key] = total.get(key, 0) + factor * value
    return {key: value for key, value in total.items() if not _is_zero(value)}


@dataclass(frozen=True)
class TruncatedMap:
    n_vars: int
    max_degree: int
    components: tuple
    pairs: int = None

    def __post_init__(self):
        if self.n_vars < 1:
            raise MajorantError(f"n_vars must be positive, got {self.n_vars}")
        if self.max_degree < 0:
            raise MajorantError(f"max_degree must be >= 0, got {self.max_degree}")
        if self.pairs is not None and 2 * self.pairs != self.n_vars:
            raise MajorantError(f"{self.pairs} rotation pairs need {2 * self.pairs} variables, got {self.n_vars}")
        cleaned = []
        for index, table in enumerate(self.components):
            for exponent in table:
                if len(exponent) != self.n_vars or any(e < 0 for e in exponent):
                    raise MajorantError(f"component {index}: bad exponent {exponent}")
                if sum(exponent) > self.max_degree:
                    raise MajorantError(
                        f"component {index}: monomial {exponent} exceeds max_degree {self.max_degree}"
                    )
            cleaned.append(_canonical(dict(table)))
        object.__setattr__(self, "components", tuple(cleaned))

    @classmethod
    def from_terms(cls, n_vars, max_degree, components, pairs=None):
        """Build a map, silently dropping monomials above max_degree"""
        tables = [
            {key: value for key, value in table.items() if sum(key) <= max_degree} for table in components
        ]
        return cls(n_vars, max_degree, tuple(tables), pairs)

    @classmethod
    def scalar(cls, n_vars, max_degree, terms, pairs=None):
        return cls(n_vars, max_degree, (dict(terms),), pairs)

    @classmethod
    def identity(cls, n_vars, max_degree, pairs=None):
        tables = []
        for i in range(n_vars):
            exponent = [0] * n_vars
            exponent[i] = 1
            tables.append({tuple(exponent): 1})
        return cls(n_vars, max_degree, tuple(tables), pairs)

    @classmethod
    def zero(cls, n_vars, max_degree, n_out=None, pairs=None):
        return cls(n_vars, max_degree, tuple({} for _ in range(n_out or n_vars)), pairs)

    @property
    def n_out(self):
        return len(self.components)

    @property
    def is_exact(self):
        return all(
            isinstance(value, (int, Fraction)) for table in self.components for value in table.values()
        )

    def coefficient(self, component, exponent):
        return self.components[component].get(tuple(exponent), 0)

    def homogeneous(self, degree):
        """The degree-r homogeneous part F^r"""
        tables = [{k: v for k, v in table.items() if sum(k) == degree} for table in self.components]
        return TruncatedMap(self.n_vars, self.max_degree, tuple(tables), self.pairs)

    def lowest_degree(self):
        degrees = [sum(k) for table in self.components for k in table]
        return min(degrees) if degrees else None

    def term_count(self):
        return sum(len(table) for table in self.components)

    def _with_tables(self, tables, max_degree=None, n_vars=None, pairs="same"):
        return TruncatedMap(
            n_vars or self.n_vars,
            self.max_degree if max_degree is None else max_degree,
            tuple(tables),
            self.pairs if pairs == "same" else pairs,
        )


def _check_compatible(F, G):
    if F.n_vars != G.n_vars or F.n_out != G.n_out:
        raise MajorantError(
            f"incompatible shapes: ({F.n_vars} -> {F.n_out}) and ({G.n_vars} -> {G.n_out})"
        )


def identity(n_vars, max_degree, pairs=None):
    return TruncatedMap.identity(n_vars, max_degree, pairs)


def zero(n_vars, max_degree, n_out=None, pairs=None):
    return TruncatedMap.zero(n_vars, max_degree, n_out, pairs)


def add(F, G):
    _check_compatible(F, G)
    degree = min(F.max_degree, G.max_degree)
    tables = [_poly_add(a, b) for a, b in zip(F.components, G.components)]
    return truncate(F._with_tables(tables, max_degree=max(F.max_degree, G.max_degree)), degree)


def sub(F, G):
    _check_compatible(F, G)
    degree = min(F.max_degree, G.max_degree)
    tables = [_poly_add(a, b, factor=-1) for a, b in zip(F.components, G.components)]
    return truncate(F._with_tables(tables, max_degree=max(F.max_degree, G.max_degree)), degree)


def scale(F, factor):
    tables = [{k: factor * v for k, v in table.items()} for table in F.components]
    return F._with_tables(tables)


def truncate(F, degree):
    """Drop monomials of total degree > degree"""
    degree = min(degree, F.max_degree)
    tables = [{k: v for k, v in table.items() if sum(k) <= degree} for table in F.components]
    return F._with_tables(tables, max_degree=degree)


def modulus(F):
    """Entrywise absolute value of every coefficient"""
    tables = [{k: abs(v) for k, v in table.items()} for table in F.components]
    return F._with_tables(tables)


def evaluate(F, point):
    """
    Evaluate every component at a point.

    Returns:
        list of length n_out
    """
    point = list(point)
    if len(point) != F.n_vars:
        raise MajorantError(f"point has {len(point)} coordinates, map expects {F.n_vars}")
    values = []
    for table in F.components:
        total = 0
        for exponent, coefficient in table.items():
            term = coefficient
            for x, e in zip(point, exponent):
                if e:
                    term = term * x**e
            total = total + term
        values.append(total)
    return values


def differentiate(F, variable):
    """Partial derivative of every component with respect to one variable"""
    if not 0 <= variable < F.n_vars:
        raise MajorantError(f"variable index {variable} outside 0..{F.n_vars - 1}")
    tables = []
    for table in F.components:
        derived = {}
        for exponent, coefficient in table.items():
            power = exponent[variable]
            if power == 0:
                continue
            lowered = list(exponent)
            lowered[variable] -= 1
            derived[tuple(lowered)] = power * coefficient
        tables.append(derived)
    return F._with_tables(tables)


def max_abs_difference(F, G):
    _check_compatible(F, G)
    worst = 0.0
    for a, b in zip(F.components, G.components):
        for key in set(a) | set(b):
            worst = max(worst, float(abs(a.get(key, 0) - b.get(key, 0))))
    return worst


def random_sparse_map(rng, n_vars, max_degree, n_terms=6, n_out=None, min_degree=2, exact=True, pairs=None):
    """
    Seeded sparse map with monomials of degree min_degree..max_degree.

    Args:
        rng: numpy Generator
        exact: Fraction coefficients when True, complex floats otherwise
    """
    tables = []
    for _ in range(n_out or n_vars):
        table = {}
        while len(table) < n_terms:
            degree = int(rng.integers(min_degree, max_degree + 1))
            slots = rng.integers(0, n_vars, size=degree)
            exponent = tuple(int(np.count_nonzero(slots == i)) for i in range(n_vars))
            if exact:
                numerator = int(rng.integers(1, 6)) * int(rng.choice([-1, 1]))
                table[exponent] = Fraction(numerator, int(rng.integers(1, 4)))
            else:
                table[exponent] = complex(rng.normal(), rng.normal())
        tables.append(table)
    return TruncatedMap(n_vars, max_degree, tuple(tables), pairs)


def _compose_tables(outer_tables, inner_tables, max_degree, graded=None):
    """Substitute inner component tables into the outer polynomials"""
    key_length = len(next((k for t in inner_tables for k in t), ())) if inner_tables else 0
    if key_length == 0:
        raise MajorantError("inner map is identically zero; cannot infer variable count")
    unit = {tuple([0] * key_length): 1}
    powers = [[unit] for _ in inner_tables]

    def power(i, k):
        while len(powers[i]) <= k:
            powers[i].append(_poly_mul(powers[i][-1], inner_tables[i], max_degree, graded))
        return powers[i][k]

    results = []
    for table in outer_tables:
        total = {}
        for exponent, coefficient in table.items():
            term = {key: coefficient * value for key, value in unit.items()}
            for i, e in enumerate(exponent):
                if e:
                    term = _poly_mul(term, power(i, e), max_degree, graded)
                    if not term:
                        break
            total = _poly_add(total, term)
        results.append(total)
    return results


def _unit_key_tables(G):
    """Inner tables with an explicit zero monomial so key length is always known"""
    zero_key = tuple([0] * G.n_vars)
    return [dict(table) if table else {zero_key: 0} for table in G.components]


def compose(F, G):
    """
    F o G, exact through min(F.max_degree, G.max_degree).

    G must vanish at the origin so that the truncation is exact.
    """
    if F.n_vars != G.n_out:
        raise MajorantError(f"arity mismatch: F takes {F.n_vars} inputs, G returns {G.n_out}")
    zero_key = tuple([0] * G.n_vars)
    if any(not _is_zero(table.get(zero_key, 0)) for table in G.components):
        raise MajorantError("inner map must vanish at the origin")
    degree = min(F.max_degree, G.max_degree)
    tables = _compose_tables(F.components, _unit_key_tables(G), degree)
    return TruncatedMap(G.n_vars, degree, tuple(tables), G.pairs)


def _require_near_identity_part(F, role):
    if F.n_vars != F.n_out:
        raise MajorantError(f"{role} must map {F.n_vars} variables to themselves, got {F.n_out} outputs")
    low = F.lowest_degree()
    if low is not None and low < 2:
        raise MajorantError(f"{role} must be O(v^2); found a term of degree {low}")


def invert_near_identity(F):
    """
    G with (1 + F)^{-1} = 1 - G.

    G is the fixed point of G = F o (1 - G); each pass fixes one more degree.
    """
    _require_near_identity_part(F, "F")
    ident = TruncatedMap.identity(F.n_vars, F.max_degree, F.pairs)
    G = TruncatedMap.zero(F.n_vars, F.max_degree, pairs=F.pairs)
    for _ in range(max(F.max_degree - 1, 0)):
        G = compose(F, sub(ident, G))
    logger.debug(f"Inverted near-identity map: {G.term_count()} terms through degree {F.max_degree}")
    return G


def _shift_time(table, power):
    return {key[:-1] + (key[-1] + power,): value for key, value in table.items()}


def flow_near_identity(V, t):
    """
    Time-t flow of du/ds = V(u, s) started at v, by Picard iteration.

    Args:
        V: TruncatedMap O(v^2), or a list [V_0, V_1, ...] meaning sum s^p V_p
        t: real time (exact maps stay exact for int/Fraction t)

    Returns:
        TruncatedMap u(t, v) through V's max_degree
    """
    fields = list(V) if isinstance(V, (list, tuple)) else [V]
    if not fields:
        raise MajorantError("flow needs at least one vector field")
    n = fields[0].n_vars
    degree = min(f.max_degree for f in fields)
    for f in fields:
        if f.n_vars != n:
            raise MajorantError("time-dependent field components must share n_vars")
        _require_near_identity_part(f, "V")

    # internal keys carry the time power in a trailing slot that is never truncated
    start = []
    for i in range(n):
        exponent = [0] * (n + 1)
        exponent[i] = 1
        start.append({tuple(exponent): 1})

    u = [dict(table) for table in start]
    for _ in range(max(degree - 1, 0)):
        inner = [table or {tuple([0] * (n + 1)): 0} for table in u]
        rhs = [{} for _ in range(n)]
        for p, f in enumerate(fields):
            extended = [{k + (0,): v for k, v in table.items()} for table in f.components]
            composed = _compose_tables(extended, inner, degree, graded=n)
            for i in range(n):
                rhs[i] = _poly_add(rhs[i], _shift_time(composed[i], p))
        integrated = [_integrate_time(table) for table in rhs]
        u = [_poly_add(s, w) for s, w in zip(start, integrated)]

    tables = []
    for table in u:
        evaluated = {}
        for key, value in table.items():
            monomial = key[:-1]
            evaluated[monomial] = evaluated.get(monomial, 0) + value * t ** key[-1]
        tables.append(evaluated)
    return TruncatedMap(n, degree, tuple(tables), fields[0].pairs)


def _integrate_time(table):
    """Antiderivative in the trailing time slot, vanishing at s = 0"""
    integrated = {}
    for key, value in table.items():
        power = key[-1] + 1
        shifted = key[:-1] + (power,)
        integrated[shifted] = value * Fraction(1, power) if isinstance(value, (int, Fraction)) else value / power
    return integrated


@dataclass(frozen=True)
class NormBound:
    upper: float
    lower: float


def majorant_norm_bound(F, rho, weights=None, out_weights=None):
    """
    Certified bounds on sup_{||v|| <= rho} ||F_(v)|| for the modulus F_.

    The input norm is ||v||^2 = sum_i w_i |v_i|^2, the output norm uses out_weights.

    Returns:
        NormBound(upper, lower): upper sums rho^r times a coefficient norm of each
        homogeneous part; lower is the best value at the single-coordinate points
        rho/sqrt(w_i) e_i.
    """
    if rho <= 0:
        raise MajorantError(f"rho must be positive, got {rho}")
    w = np.ones(F.n_vars) if weights is None else np.asarray(weights, dtype=float)
    w_out = np.ones(F.n_out) if out_weights is None else np.asarray(out_weights, dtype=float)
    if w.shape != (F.n_vars,) or w_out.shape != (F.n_out,) or np.any(w <= 0) or np.any(w_out <= 0):
        raise MajorantError("weights must be positive vectors matching the map's arity")

    upper = 0.0
    for r in range(F.max_degree + 1):
        sums = np.zeros(F.n_out)
        for i, table in enumerate(F.components):
            for exponent, coefficient in table.items():
                if sum(exponent) == r:
                    sums[i] += float(abs(coefficient)) * float(np.prod(w ** (-np.asarray(exponent) / 2.0)))
        upper += rho**r * float(np.sqrt(np.sum(w_out * sums**2)))

    absolute = modulus(F)
    lower = 0.0
    for i in range(F.n_vars):
        point = [0.0] * F.n_vars
        point[i] = rho / math.sqrt(w[i])
        values = np.array([float(value) for value in evaluate(absolute, point)])
        lower = max(lower, float(np.sqrt(np.sum(w_out * values**2))))
    return NormBound(upper, lower)


@dataclass(frozen=True)
class InversionBoundReport:
    c: float
    rho: float
    norm_f: float
    norm_g_closed: float
    norm_g_series: float
    bound: float
    passed: bool


def inversion_bound_check(c, rho, mu=MU, max_degree=8):
    """
    Inversion bound on the family F = c v^2 in one variable.

    The modulus of G is (1 - sqrt(1 - 4|c|x))/(2|c|) - x, increasing on the ball,
    so |G_|_{mu rho} is its value at mu rho; the check is |G_|_{mu rho} <= |F_|_rho/8
    under |F_|_rho <= rho/e.
    """
    size = abs(c)
    if rho <= 0:
        raise MajorantError(f"rho must be positive, got {rho}")
    norm_f = size * rho**2
    if norm_f > rho / math.e * (1.0 + 1e-12):
        raise MajorantError(f"|F|_rho = {norm_f:.3e} exceeds rho/e = {rho / math.e:.3e}")

    x = mu * rho
    norm_g_closed = 0.0 if size == 0 else (1.0 - math.sqrt(1.0 - 4.0 * size * x)) / (2.0 * size) - x
    F = TruncatedMap.scalar(1, max_degree, {(2,): c})
    G = invert_near_identity(F)
    norm_g_series = float(abs(evaluate(modulus(G), [x])[0]))
    bound = norm_f / 8.0
    return InversionBoundReport(
        c=float(size),
        rho=float(rho),
        norm_f=norm_f,
        norm_g_closed=norm_g_closed,
        norm_g_series=norm_g_series,
        bound=bound,
        passed=norm_g_closed <= bound,
    )


def _require_pairs(F):
    if F.pairs is None:
        raise MajorantError("operation needs a map with rotation pairs (xi, eta)")
    return F.pairs


def rotation_weights(F, exponent):
    pairs = _require_pairs(F)
    return tuple(exponent[j] - exponent[pairs + j] for j in range(pairs))


def _map_coefficients(F, transform):
    tables = []
    for table in F.components:
        changed = {}
        for exponent, coefficient in table.items():
            value = transform(rotation_weights(F, exponent), exponent, coefficient)
            if value is not None:
                changed[exponent] = value
        tables.append(changed)
    return F._with_tables(tables)


def _check_pair_index(F, j):
    pairs = _require_pairs(F)
    if not 0 <= j < pairs:
        raise MajorantError(f"pair index {j} outside 0..{pairs - 1}")


def average_Mj(F, j):
    """Average over the j-th rotation: keep monomials with K_j = L_j"""
    _check_pair_index(F, j)
    return _map_coefficients(F, lambda m, e, c: c if m[j] == 0 else None)


def average_M(F):
    """Average over the full torus: keep monomials with K = L"""
    _require_pairs(F)
    return _map_coefficients(F, lambda m, e, c: c if not any(m) else None)


def average_Lj(F, j):
    """(1/2pi) int_0^{2pi} t g(phi_j^t) dt: 1/(i m) for m != 0, pi for m = 0"""
    _check_pair_index(F, j)
    return _map_coefficients(F, lambda m, e, c: c * math.pi if m[j] == 0 else c / (1j * m[j]))


def theta_derivative(F, j):
    _check_pair_index(F, j)
    return _map_coefficients(F, lambda m, e, c: 1j * m[j] * c if m[j] else None)


def rotate(F, thetas):
    """Compose with the torus rotation phi^theta"""
    pairs = _require_pairs(F)
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (pairs,):
        raise MajorantError(f"need {pairs} rotation angles, got shape {thetas.shape}")
    return _map_coefficients(F, lambda m, e, c: c * complex(np.exp(1j * float(np.dot(m, thetas)))))


def _violates(value, tol):
    return abs(value) > tol


def moser_f(h, tol=1e-12):
    """
    Solve d f / d theta_j = h_j for every rotation pair j.

    f = sum_j M_0 ... M_{j-1} L_j h_j. The inputs must satisfy
    d h_j/d theta_l = d h_l/d theta_j and M_j h_j = 0.

    Args:
        h: list of scalar maps, one per pair
        tol: absolute tolerance of the compatibility check for float coefficients
    """
    if not h:
        raise MajorantError("moser_f needs one scalar map per rotation pair")
    pairs = _require_pairs(h[0])
    if len(h) != pairs:
        raise MajorantError(f"expected {pairs} maps, got {len(h)}")
    for hj in h:
        if hj.n_vars != h[0].n_vars or hj.n_out != 1 or hj.pairs != pairs:
            raise MajorantError("moser_f inputs must be scalar maps over the same variables")

    tables = [hj.components[0] for hj in h]
    for j, table in enumerate(tables):
        for exponent, coefficient in table.items():
            m = rotation_weights(h[j], exponent)
            if m[j] == 0 and _violates(coefficient, tol):
                raise MajorantError(f"h_{j} has a rotation-invariant term at {exponent}")
            for l in range(pairs):
                other = tables[l].get(exponent, 0)
                if _violates(m[l] * coefficient - m[j] * other, tol):
                    raise MajorantError(f"compatibility fails between h_{j} and h_{l} at {exponent}")

    degree = min(hj.max_degree for hj in h)
    f = TruncatedMap.zero(h[0].n_vars, degree, n_out=1, pairs=pairs)
    for j in range(pairs):
        term = average_Lj(h[j], j)
        for l in range(j):
            term = average_Mj(term, l)
        f = add(f, truncate(term, degree))
    return f


def homological_solve(F, frequencies, tol=1e-12):
    """
    Solve {H_0, chi} = F monomialwise: divide each coefficient by i omega.(K - L).

    Raises:
        MajorantError: on a resonant monomial with nonzero coefficient
    """
    pairs = _require_pairs(F)
    frequencies = np.asarray(frequencies, dtype=float)
    if frequencies.shape != (pairs,):
        raise MajorantError(f"need {pairs} frequencies, got shape {frequencies.shape}")
    threshold = tol * max(1.0, float(np.max(np.abs(frequencies))))

    def divide(m, exponent, coefficient):
        divisor = float(np.dot(frequencies, m))
        if abs(divisor) <= threshold:
            raise MajorantError(f"resonant monomial {exponent} (omega.(K-L) = {divisor:.3e})")
        return coefficient / (1j * divisor)

    return _map_coefficients(F, divide)


@dataclass(frozen=True)
class SeriesInequalityReport:
    n_max: int
    r_max: int
    max_ratio: float
    worst: tuple
    passed: bool
    ratios: dict = field(default_factory=dict, compare=False)


def series_inequality_check(n_max, r_max):
    """
    Exhaustive check of n^2 sum_{k_1+..+k_r=n} 1/(k_1^2..k_r^2) <= (4S)^{r-1}.

    The left side is computed exactly with Fractions by the convolution
    T_r(n) = sum_k T_{r-1}(n-k)/k^2.
    """
    if not 1 <= n_max <= MAX_SERIES_N or not 1 <= r_max <= MAX_SERIES_R:
        raise MajorantError(f"need 1 <= n_max <= {MAX_SERIES_N} and 1 <= r_max <= {MAX_SERIES_R}")

    inverse_squares = [Fraction(0)] + [Fraction(1, k * k) for k in range(1, n_max + 1)]
    current = list(inverse_squares)
    ratios = {}
    for r in range(1, r_max + 1):
        if r > 1:
            current = [
                sum((current[n - k] * inverse_squares[k] for k in range(1, n)), Fraction(0))
                for n in range(n_max + 1)
            ]
        rhs = (4.0 * SERIES_S) ** (r - 1)
        for n in range(r, n_max + 1):
            ratios[(n, r)] = float(n * n * current[n]) / rhs

    worst = max(ratios, key=ratios.get)
    max_ratio = ratios[worst]
    logger.debug(f"Series inequality: max ratio {max_ratio:.6f} at (n, r) = {worst}")
    return SeriesInequalityReport(n_max, r_max, max_ratio, worst, max_ratio <= 1.0 + 1e-12, ratios)
