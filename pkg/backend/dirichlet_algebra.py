"""
Dirichlet Algebra Module for the Dirichlet Composition Lab
Exact-coefficient arithmetic on truncated Dirichlet series and polytorus characters
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from backend.errors import InsufficientPrimes, MalformedSpec, PreconditionError

logger = logging.getLogger(__name__)

_CHUNK = 2048
_UNIMODULAR_TOL = 1e-12
_COEFF_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TruncatedDirichletSeries:
    """
    Finite coefficient vector a_1..a_N standing for sum a_n n^{-s}

    Index 0 of `coeffs` holds a_1. All operations are exact on the quotient
    by {n > N}.
    """
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex).ravel()
        if arr.size < 1:
            raise PreconditionError("a truncated Dirichlet series needs N >= 1")
        if not np.all(np.isfinite(arr)):
            raise PreconditionError("series coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, 'coeffs', arr)

    @property
    def N(self) -> int:
        return int(self.coeffs.size)

    @property
    def constant_term(self) -> complex:
        """f(+infinity), the first coefficient"""
        return complex(self.coeffs[0])

    def coefficient(self, n: int) -> complex:
        if n < 1:
            raise PreconditionError(f"coefficient index must be >= 1, got {n}")
        return complex(self.coeffs[n - 1]) if n <= self.N else 0j

    def support(self) -> np.ndarray:
        """Indices n with a_n != 0"""
        return np.flatnonzero(self.coeffs) + 1

    def resized(self, n_new: int) -> 'TruncatedDirichletSeries':
        """Pad with zeros or truncate to order n_new"""
        if n_new < 1:
            raise PreconditionError(f"truncation order must be >= 1, got {n_new}")
        out = np.zeros(n_new, dtype=complex)
        keep = min(n_new, self.N)
        out[:keep] = self.coeffs[:keep]
        return TruncatedDirichletSeries(out)

    def padded(self, n_new: int) -> 'TruncatedDirichletSeries':
        return self.resized(max(n_new, self.N))

    def truncated(self, n_new: int) -> 'TruncatedDirichletSeries':
        return self.resized(min(n_new, self.N))

    def h2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def allclose(self, other: 'TruncatedDirichletSeries', atol: float = 1e-12) -> bool:
        size = max(self.N, other.N)
        return bool(np.allclose(self.padded(size).coeffs, other.padded(size).coeffs, rtol=0.0, atol=atol))

    def _binary(self, other: 'TruncatedDirichletSeries', sign: float) -> 'TruncatedDirichletSeries':
        size = max(self.N, other.N)
        return TruncatedDirichletSeries(self.padded(size).coeffs + sign * other.padded(size).coeffs)

    def __add__(self, other):
        if isinstance(other, TruncatedDirichletSeries):
            return self._binary(other, 1.0)
        if np.isscalar(other):
            out = self.coeffs.copy()
            out[0] += other
            return TruncatedDirichletSeries(out)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TruncatedDirichletSeries):
            return self._binary(other, -1.0)
        if np.isscalar(other):
            return self + (-other)
        return NotImplemented

    def __neg__(self):
        return TruncatedDirichletSeries(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncatedDirichletSeries):
            return convolve(self, other)
        if np.isscalar(other):
            return TruncatedDirichletSeries(self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return TruncatedDirichletSeries(self.coeffs * other)
        return NotImplemented

    def to_dict(self) -> Dict[str, Any]:
        return {
            'N': self.N,
            're': [float(x) for x in self.coeffs.real],
            'im': [float(x) for x in self.coeffs.imag],
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> 'TruncatedDirichletSeries':
        try:
            size = int(payload['N'])
            re = np.asarray(payload['re'], dtype=float)
            im = np.asarray(payload.get('im', np.zeros(re.size)), dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedSpec(f"series payload needs N, re, im: {e}") from e
        if re.size != size or im.size != size:
            raise MalformedSpec(f"series payload declares N = {size} but carries {re.size}/{im.size} values")
        return cls(re + 1j * im)


TDS = TruncatedDirichletSeries


def monomial(n: int, size: int, c: complex = 1.0) -> TruncatedDirichletSeries:
    """c * n^{-s} truncated at order size"""
    if not 1 <= n <= size:
        raise PreconditionError(f"monomial index {n} outside 1..{size}")
    out = np.zeros(size, dtype=complex)
    out[n - 1] = c
    return TruncatedDirichletSeries(out)


def identity_series(size: int) -> TruncatedDirichletSeries:
    """The unit e_1"""
    return monomial(1, size)


def zeta_series(size: int) -> TruncatedDirichletSeries:
    """zeta_N: all coefficients one"""
    return TruncatedDirichletSeries(np.ones(size, dtype=complex))


def from_mapping(values: Mapping[int, complex], size: int) -> TruncatedDirichletSeries:
    out = np.zeros(size, dtype=complex)
    for n, c in values.items():
        if not 1 <= int(n) <= size:
            raise PreconditionError(f"coefficient index {n} outside 1..{size}")
        out[int(n) - 1] = c
    return TruncatedDirichletSeries(out)


@lru_cache(maxsize=16)
def _divisor_pairs(size: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """All (d, q, n = d q) with n <= size, sorted by n, plus slice starts per n"""
    d_parts, q_parts = [], []
    for d in range(1, size + 1):
        q = np.arange(1, size // d + 1)
        d_parts.append(np.full(q.size, d))
        q_parts.append(q)
    d_all = np.concatenate(d_parts)
    q_all = np.concatenate(q_parts)
    n_all = d_all * q_all
    order = np.lexsort((d_all, n_all))
    d_all, q_all, n_all = d_all[order], q_all[order], n_all[order]
    starts = np.searchsorted(n_all, np.arange(1, size + 2))
    for arr in (d_all, q_all, n_all, starts):
        arr.setflags(write=False)
    return d_all, q_all, n_all, starts


@lru_cache(maxsize=16)
def _logs(size: int) -> np.ndarray:
    out = np.log(np.arange(1, size + 1, dtype=float))
    out.setflags(write=False)
    return out


def _multiplicative_closure(support: np.ndarray, size: int) -> List[int]:
    """Sorted n <= size that are products of support elements (1 included)"""
    generators = sorted(int(d) for d in support if d > 1)
    reached = {1}
    frontier = [1]
    while frontier:
        fresh = []
        for r in frontier:
            for d in generators:
                m = r * d
                if m > size:
                    break
                if m not in reached:
                    reached.add(m)
                    fresh.append(m)
        frontier = fresh
    return sorted(reached)


def convolve(f: TruncatedDirichletSeries, g: TruncatedDirichletSeries) -> TruncatedDirichletSeries:
    """Dirichlet product (fg)_n = sum_{d | n} f_d g_{n/d}, padded to the larger order"""
    size = max(f.N, g.N)
    a = f.padded(size).coeffs
    b = g.padded(size).coeffs
    d, q, n, _ = _divisor_pairs(size)
    prod = a[d - 1] * b[q - 1]
    re = np.bincount(n - 1, weights=prod.real, minlength=size)
    im = np.bincount(n - 1, weights=prod.imag, minlength=size)
    return TruncatedDirichletSeries(re + 1j * im)


def exp_series(f: TruncatedDirichletSeries) -> TruncatedDirichletSeries:
    """
    exp(f) for f with f_1 = 0

    Coefficient recursion g_1 = 1, g_n log n = sum_{d | n, d > 1} f_d log d g_{n/d},
    restricted to the multiplicative closure of the support of f.
    """
    if abs(f.coeffs[0]) > _COEFF_TOL:
        raise PreconditionError(f"exp_series needs f_1 = 0, got {f.coeffs[0]}")
    size = f.N
    logs = _logs(size)
    weighted = f.coeffs * logs
    d_all, q_all, _, starts = _divisor_pairs(size)
    g = np.zeros(size, dtype=complex)
    g[0] = 1.0
    for n in _multiplicative_closure(f.support(), size)[1:]:
        sl = slice(starts[n - 1], starts[n])
        dd, qq = d_all[sl], q_all[sl]
        keep = dd > 1
        g[n - 1] = np.dot(weighted[dd[keep] - 1], g[qq[keep] - 1]) / logs[n - 1]
    return TruncatedDirichletSeries(g)


def log_series(f: TruncatedDirichletSeries) -> TruncatedDirichletSeries:
    """log(f) for f with f_1 = 1; inverse of exp_series"""
    if abs(f.coeffs[0] - 1.0) > _COEFF_TOL:
        raise PreconditionError(f"log_series needs f_1 = 1, got {f.coeffs[0]}")
    size = f.N
    logs = _logs(size)
    a = f.coeffs
    d_all, q_all, _, starts = _divisor_pairs(size)
    weighted = np.zeros(size, dtype=complex)  # L_n log n
    for n in _multiplicative_closure(f.support(), size)[1:]:
        sl = slice(starts[n - 1], starts[n])
        dd, qq = d_all[sl], q_all[sl]
        keep = (dd > 1) & (qq > 1)
        weighted[n - 1] = a[n - 1] * logs[n - 1] - np.dot(weighted[dd[keep] - 1], a[qq[keep] - 1])
    out = np.zeros(size, dtype=complex)
    out[1:] = weighted[1:] / logs[1:]
    return TruncatedDirichletSeries(out)


def divisor_alpha(alpha: float, size: int) -> TruncatedDirichletSeries:
    """Coefficients d_alpha(n) of zeta(s)^alpha up to size"""
    if alpha < 1:
        raise PreconditionError(f"divisor_alpha needs alpha >= 1, got {alpha}")
    series = exp_series(alpha * log_series(zeta_series(size)))
    return TruncatedDirichletSeries(series.coeffs.real.astype(complex))


def evaluate(f: TruncatedDirichletSeries, s: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
    """sum a_n n^{-s} at a scalar or an array of points"""
    arr = np.asarray(s, dtype=complex)
    flat = arr.ravel()
    idx = f.support()
    if idx.size == 0:
        out = np.zeros(flat.shape, dtype=complex)
    else:
        logn = np.log(idx.astype(float))
        coeffs = f.coeffs[idx - 1]
        out = np.empty(flat.shape, dtype=complex)
        for start in range(0, flat.size, _CHUNK):
            block = flat[start:start + _CHUNK]
            out[start:start + _CHUNK] = np.exp(-np.outer(block, logn)) @ coeffs
    out = out.reshape(arr.shape)
    return complex(out) if arr.ndim == 0 else out


def derivative(f: TruncatedDirichletSeries) -> TruncatedDirichletSeries:
    """f' with coefficients -a_n log n"""
    return TruncatedDirichletSeries(-f.coeffs * _logs(f.N))


def vertical_shift(f: TruncatedDirichletSeries, tau: float) -> TruncatedDirichletSeries:
    """f(. + i tau): coefficients a_n n^{-i tau}"""
    return TruncatedDirichletSeries(f.coeffs * np.exp(-1j * tau * _logs(f.N)))


def weighted_norm_sq(f: TruncatedDirichletSeries, weights: np.ndarray) -> float:
    """sum |a_n|^2 w_n over the shared range"""
    size = min(f.N, len(weights))
    return float(np.sum(np.abs(f.coeffs[:size]) ** 2 * np.asarray(weights, dtype=float)[:size]))


def dm_norm_sq(f: TruncatedDirichletSeries, a: float) -> float:
    """Norm of (D_-a)_0: sum_{n >= 2} |a_n|^2 (log n)^{-a}"""
    weights = np.zeros(f.N)
    weights[1:] = _logs(f.N)[1:] ** (-a)
    return weighted_norm_sq(f, weights)


def bergman_norm_sq(f: TruncatedDirichletSeries, alpha: float) -> float:
    """Norm of A_alpha: sum |a_n|^2 / d_alpha(n)"""
    d = divisor_alpha(alpha, f.N).coeffs.real
    return weighted_norm_sq(f, 1.0 / d)


@lru_cache(maxsize=32)
def first_primes(count: int) -> Tuple[int, ...]:
    """The first `count` primes"""
    if count < 1:
        raise PreconditionError(f"need at least one prime, got {count}")
    bound = 16
    while True:
        sieve = np.ones(bound + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, int(bound ** 0.5) + 1):
            if sieve[p]:
                sieve[p * p::p] = False
        primes = np.flatnonzero(sieve)
        if primes.size >= count:
            return tuple(int(p) for p in primes[:count])
        bound *= 2


def prime_count(size: int) -> int:
    """Number of primes <= size (at least one), enough to factor every n <= size"""
    if size < 2:
        return 1
    sieve = np.ones(size + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(size ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return max(int(sieve.sum()), 1)


@lru_cache(maxsize=32)
def _factor_table(size: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Exponent matrix E[n-1, j] of p_j in n, and the unfactored remainder of each n"""
    primes = first_primes(count)
    exponents = np.zeros((size, count), dtype=np.int64)
    rest = np.arange(1, size + 1)
    for j, p in enumerate(primes):
        mask = rest % p == 0
        while mask.any():
            exponents[mask, j] += 1
            rest[mask] //= p
            mask = rest % p == 0
    exponents.setflags(write=False)
    rest.setflags(write=False)
    return exponents, rest


def prime_exponent_matrix(size: int, count: int, support: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Exponent matrix over the first `count` primes for n = 1..size

    Raises InsufficientPrimes when some n (restricted to `support` if given)
    has a prime factor beyond p_count.
    """
    exponents, rest = _factor_table(size, count)
    rows = np.arange(1, size + 1) if support is None else np.asarray(support)
    bad = rows[rest[rows - 1] != 1]
    if bad.size:
        raise InsufficientPrimes(
            f"{count} primes (up to {first_primes(count)[-1]}) do not factor n = {int(bad[0])}"
        )
    return exponents


@dataclass(frozen=True, eq=False)
class Character:
    """Truncated point of the infinite polytorus: one unimodular value per prime"""
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=complex).ravel()
        if arr.size < 1:
            raise PreconditionError("a character needs at least one prime")
        if np.max(np.abs(np.abs(arr) - 1.0)) > _UNIMODULAR_TOL:
            raise PreconditionError("character values must be unimodular")
        arr.setflags(write=False)
        object.__setattr__(self, 'values', arr)

    @classmethod
    def from_angles(cls, angles) -> 'Character':
        return cls(np.exp(1j * np.asarray(angles, dtype=float)))

    @classmethod
    def trivial(cls, count: int = 1) -> 'Character':
        return cls(np.ones(count, dtype=complex))

    @property
    def J(self) -> int:
        return int(self.values.size)

    @property
    def primes(self) -> Tuple[int, ...]:
        return first_primes(self.J)

    @property
    def angles(self) -> np.ndarray:
        return np.angle(self.values)

    def table(self, size: int, support: Optional[np.ndarray] = None) -> np.ndarray:
        """chi(n) for n = 1..size, computed completely multiplicatively"""
        exponents = prime_exponent_matrix(size, self.J, support)
        return np.exp(1j * (exponents @ self.angles))

    def __call__(self, n: int) -> complex:
        return complex(self.table(n, np.array([n]))[n - 1])

    def power(self, k: int) -> 'Character':
        """chi^k"""
        return Character(self.values ** k)


def twist(f: TruncatedDirichletSeries, chi: Character) -> TruncatedDirichletSeries:
    """Vertical limit f_chi: coefficients a_n chi(n)"""
    return TruncatedDirichletSeries(f.coeffs * chi.table(f.N, f.support()))
