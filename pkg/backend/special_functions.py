"""
Special Functions Module for the Dirichlet Composition Lab
Riemann zeta, its derivatives and the Gamma function on Re s > 1
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import List, Optional, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import bernoulli
from scipy.special import gamma as _scipy_gamma

import config
from backend.errors import DomainError, PreconditionError

logger = logging.getLogger(__name__)

ComplexLike = Union[complex, float, np.ndarray]

# B_0 .. B_16
_BERNOULLI = bernoulli(16)

# Rows of the direct-sum matrix evaluated at once
_CHUNK = 4096


@dataclass(frozen=True)
class ZetaEvalConfig:
    """Direct-sum cutoff and Euler-Maclaurin order for zeta evaluation"""
    terms: int = config.ZETA_TERMS
    em_order: int = config.ZETA_EM_ORDER
    delta: float = config.ZETA_DOMAIN_DELTA

    def __post_init__(self):
        if self.terms < 2:
            raise PreconditionError(f"terms must be >= 2, got {self.terms}")
        if not 0 <= self.em_order <= 8:
            raise PreconditionError(f"em_order must lie in [0, 8], got {self.em_order}")
        if self.delta < 0:
            raise PreconditionError(f"delta must be non-negative, got {self.delta}")


DEFAULT_ZETA_CONFIG = ZetaEvalConfig()


@lru_cache(maxsize=None)
def _rising_factorials(order: int) -> List[Polynomial]:
    """P_m(s) = s (s+1) ... (s+2m-2) for m = 1..order"""
    return [Polynomial.fromroots([-j for j in range(2 * m - 1)]) for m in range(1, order + 1)]


def _check_domain(s: np.ndarray, cfg: ZetaEvalConfig, name: str) -> None:
    bound = 1.0 + cfg.delta
    if not np.all(np.isfinite(s)):
        raise DomainError(f"{name}: non-finite argument")
    if np.any(s.real <= bound):
        worst = s.ravel()[np.argmin(s.real.ravel())]
        raise DomainError(f"{name} requires Re s > {bound}, got s = {complex(worst)}")


def _direct_sum(flat: np.ndarray, n_max: int, k: int) -> np.ndarray:
    """sum_{n <= n_max} (-log n)^k n^{-s} for a flat array of s"""
    logn = np.log(np.arange(1, n_max + 1, dtype=float))
    weights = (-logn) ** k
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, _CHUNK):
        block = flat[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.exp(-np.outer(block, logn)) @ weights
    return out


def _euler_maclaurin(s: np.ndarray, k: int, cfg: ZetaEvalConfig) -> np.ndarray:
    """k-th derivative of zeta by term-wise differentiated Euler-Maclaurin summation"""
    flat = s.ravel()
    big_n = cfg.terms
    log_n = np.log(big_n)
    direct = _direct_sum(flat, big_n - 1, k)
    n_pow = np.exp(-flat * log_n)  # N^{-s}

    # d^k [N^{1-s} / (s-1)]
    pole = np.zeros_like(flat)
    for j in range(k + 1):
        pole += comb(k, j) * (-log_n) ** (k - j) * (-1) ** j * factorial(j) / (flat - 1.0) ** (j + 1)
    pole *= big_n * n_pow

    half = 0.5 * (-log_n) ** k * n_pow

    tail = np.zeros_like(flat)
    for m, rising in enumerate(_rising_factorials(cfg.em_order), start=1):
        coef = _BERNOULLI[2 * m] / factorial(2 * m) * float(big_n) ** (1 - 2 * m)
        acc = np.zeros_like(flat)
        for j in range(k + 1):
            acc += comb(k, j) * rising.deriv(j)(flat) * (-log_n) ** (k - j)
        tail += coef * acc
    tail *= n_pow

    return (direct + pole + half + tail).reshape(s.shape)


def _finish(value: np.ndarray, scalar: bool, real: bool = False):
    if real:
        value = value.real
        return float(value) if scalar else value
    return complex(value) if scalar else value


def zeta_derivative(s: ComplexLike, k: int, cfg: Optional[ZetaEvalConfig] = None) -> ComplexLike:
    """
    k-th derivative of the Riemann zeta function for Re s > 1

    Args:
        s: complex scalar or array
        k: derivative order, k >= 0
        cfg: evaluation settings (defaults from config)

    Returns:
        Complex scalar or array matching the shape of s
    """
    cfg = cfg or DEFAULT_ZETA_CONFIG
    if k < 0:
        raise PreconditionError(f"derivative order must be >= 0, got {k}")
    arr = np.asarray(s, dtype=complex)
    _check_domain(arr, cfg, 'zeta')
    return _finish(_euler_maclaurin(arr, k, cfg), arr.ndim == 0)


def zeta(s: ComplexLike, cfg: Optional[ZetaEvalConfig] = None) -> ComplexLike:
    """Riemann zeta on Re s > 1"""
    return zeta_derivative(s, 0, cfg)


def zeta_deriv2(sigma: Union[float, np.ndarray], cfg: Optional[ZetaEvalConfig] = None) -> Union[float, np.ndarray]:
    """zeta''(sigma) = sum_{n>=2} (log n)^2 n^{-sigma} for real sigma > 1"""
    cfg = cfg or DEFAULT_ZETA_CONFIG
    arr = np.asarray(sigma)
    if np.iscomplexobj(arr):
        raise DomainError("zeta_deriv2 takes a real argument; use zeta_deriv2_complex")
    arr = arr.astype(complex)
    _check_domain(arr, cfg, 'zeta_deriv2')
    return _finish(_euler_maclaurin(arr, 2, cfg), arr.ndim == 0, real=True)


def zeta_deriv2_complex(s: ComplexLike, cfg: Optional[ZetaEvalConfig] = None) -> ComplexLike:
    """zeta'' at complex s; the reproducing-kernel factor zeta''(s + conj(w)) of (D_-2)_0"""
    return zeta_derivative(s, 2, cfg)


def partial_zeta(s: ComplexLike, n_max: int, k: int = 0) -> ComplexLike:
    """
    Partial sum sum_{n <= n_max} (-log n)^k n^{-s}

    Finite-truncation identities are stated against these sums, so no domain
    restriction applies.
    """
    if n_max < 1:
        raise PreconditionError(f"n_max must be >= 1, got {n_max}")
    arr = np.asarray(s, dtype=complex)
    value = _direct_sum(arr.ravel(), n_max, k).reshape(arr.shape)
    return _finish(value, arr.ndim == 0)


def gamma_real(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Gamma function for real x > 0"""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"gamma_real requires finite x > 0, got {x}")
    value = _scipy_gamma(arr)
    return float(value) if arr.ndim == 0 else value
