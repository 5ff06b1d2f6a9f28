"""
Polytorus Module for the Dirichlet Composition Lab
Monte Carlo over characters: boundary values, boundary Schatten integrals and H^p norms
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from scipy import stats

import config
from backend.criteria import FINITE, INCONCLUSIVE
from backend.dirichlet_algebra import Character, TruncatedDirichletSeries, prime_exponent_matrix
from backend.errors import DomainError, PreconditionError
from backend.operator_lab import build_matrix, compactness_indicator
from backend.special_functions import partial_zeta, zeta
from backend.symbols import Affine, Symbol

logger = logging.getLogger(__name__)

_CHUNK = 4096


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings; J primes carry each sampled character"""
    J: int = config.MC_PRIMES
    n_samples: int = config.MC_SAMPLES
    sigma_bv: float = config.MC_SIGMA_BV
    seed: int = config.DEFAULT_SEED
    n_batches: int = config.MC_BATCHES

    def __post_init__(self):
        if self.J < 1:
            raise PreconditionError(f"J must be >= 1, got {self.J}")
        if not 0 < self.sigma_bv <= 0.1:
            raise PreconditionError(f"sigma_bv must lie in (0, 0.1], got {self.sigma_bv}")
        if self.n_batches < 2 or self.n_samples < self.n_batches:
            raise PreconditionError(f"need n_samples >= n_batches >= 2, got {self.n_samples}, {self.n_batches}")

    def to_dict(self) -> Dict[str, Any]:
        return {'J': self.J, 'n_samples': self.n_samples, 'sigma_bv': self.sigma_bv,
                'seed': self.seed, 'n_batches': self.n_batches}


@dataclass
class McEstimate:
    name: str
    estimate: float
    stderr: float
    n_samples: int
    seed: int
    verdict: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'estimate': self.estimate, 'stderr': self.stderr,
                'n_samples': self.n_samples, 'seed': self.seed, 'verdict': self.verdict, **self.details}


def sample_characters(cfg: McConfig, rng: np.random.Generator, n: int) -> np.ndarray:
    """n rows of J i.i.d. uniform angles, one row per Haar-random character"""
    return rng.uniform(0.0, 2.0 * np.pi, size=(n, cfg.J))


def sample_character(cfg: McConfig, rng: np.random.Generator) -> Character:
    return Character.from_angles(sample_characters(cfg, rng, 1)[0])


def _series_at_characters(series: TruncatedDirichletSeries, angles: np.ndarray, sigma: float) -> np.ndarray:
    """f_chi(sigma) = sum a_n chi(n) n^{-sigma} for every row of angles"""
    idx = series.support()
    if idx.size == 0:
        return np.zeros(angles.shape[0], dtype=complex)
    exponents = prime_exponent_matrix(series.N, angles.shape[1], idx)[idx - 1]
    weights = series.coeffs[idx - 1] * np.exp(-sigma * np.log(idx.astype(float)))
    out = np.empty(angles.shape[0], dtype=complex)
    for start in range(0, angles.shape[0], _CHUNK):
        block = angles[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.exp(1j * (block @ exponents.T)) @ weights
    return out


def _values_at(sym: Symbol, angles: np.ndarray, sigma: float) -> np.ndarray:
    if sym.is_disk_like:
        z = np.exp(1j * angles[:, 0]) * 2.0 ** -sigma
        return np.asarray(sym.disk_map(z), dtype=complex)
    return _series_at_characters(sym.phi, angles, sigma)


def boundary_values(sym: Symbol, angles: np.ndarray, cfg: McConfig) -> np.ndarray:
    """
    phi(chi) for each row of angles, extrapolated from sigma_bv and 2 sigma_bv

    A Richardson step 2 v(sigma) - v(2 sigma) removes the first-order term;
    a warning marks samples where the two raw values disagree by more than
    MC_TRUNCATION_WARNING.
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    near = _values_at(sym, angles, cfg.sigma_bv)
    far = _values_at(sym, angles, 2.0 * cfg.sigma_bv)
    gap = np.abs(near - far)
    if gap.size and gap.max() > config.MC_TRUNCATION_WARNING:
        logger.warning(f"{sym.label}: boundary values are truncation-dominated "
                       f"({int(np.sum(gap > config.MC_TRUNCATION_WARNING))} of {gap.size} samples differ by > "
                       f"{config.MC_TRUNCATION_WARNING:g})")
    return 2.0 * near - far


def boundary_value(sym: Symbol, chi: Character, cfg: Optional[McConfig] = None) -> complex:
    cfg = cfg or McConfig(J=chi.J)
    return complex(boundary_values(sym, chi.angles[None, :], cfg)[0])


def _batched(cfg: McConfig, draw: Callable[[np.random.Generator, int], np.ndarray]) -> np.ndarray:
    """Per-sample values from independent batches seeded by SeedSequence(seed).spawn"""
    per_batch = cfg.n_samples // cfg.n_batches
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_batches)
    return np.stack([draw(np.random.default_rng(child), per_batch) for child in children])


def _heavy_tail(samples: np.ndarray) -> bool:
    """Sample variance grows when the sample size doubles"""
    flat = samples.ravel()
    half = flat[:flat.size // 2]
    if half.size < 2:
        return False
    var_half, var_full = np.var(half, ddof=1), np.var(flat, ddof=1)
    return bool(var_half > 0 and var_full > config.MC_HEAVY_TAIL_GROWTH * var_half)


def _summarize(samples: np.ndarray) -> tuple:
    means = samples.mean(axis=1)
    return float(means.mean()), float(means.std(ddof=1) / np.sqrt(means.size))


def mc_schatten_boundary(sym: Symbol, m: int, cfg: Optional[McConfig] = None, n_cutoff: Optional[int] = None,
                         assume_compact: Optional[bool] = None) -> McEstimate:
    """
    Boundary form of ||C_phi||_{S_2m}^{2m}

    m = 1 averages zeta(2 Re phi(chi)); m = 2 averages
    |zeta(conj(phi(chi_1)) + phi(chi_2))|^2 over independent pairs. Non-compact
    symbols are reported without a verdict.
    """
    cfg = cfg or McConfig()
    if m not in (1, 2):
        raise PreconditionError(f"mc_schatten_boundary supports m in {{1, 2}}, got {m}")
    if assume_compact is None:
        if sym.is_disk_like:
            assume_compact = compactness_indicator(sym).verdict == 'compact-consistent'
        else:
            logger.warning(f"Compactness of {sym.label} was not checked; reporting without verdict")
            assume_compact = False
    if not assume_compact:
        logger.warning(f"{sym.label} is not compact-consistent; the boundary estimate carries no verdict")

    def kernel(s):
        if n_cutoff is not None:
            return partial_zeta(s, int(n_cutoff))
        return zeta(s)

    def values(rng, n):
        bv = boundary_values(sym, sample_characters(cfg, rng, n), cfg)
        if np.any(bv.real <= 0.5):
            raise DomainError(f"{int(np.sum(bv.real <= 0.5))} boundary values of {sym.label} reach Re <= 1/2")
        if m == 1:
            return np.real(kernel(2.0 * bv.real + 0j))
        other = boundary_values(sym, sample_characters(cfg, rng, n), cfg)
        if np.any(other.real <= 0.5):
            raise DomainError(f"boundary values of {sym.label} reach Re <= 1/2")
        return np.abs(kernel(np.conj(bv) + other)) ** 2

    samples = _batched(cfg, values)
    estimate, stderr = _summarize(samples)
    if _heavy_tail(samples):
        logger.warning(f"{sym.label}: sample variance grows under doubling; boundary values crowd Re = 1/2")
    verdict = None
    if assume_compact:
        verdict = FINITE if np.isfinite(estimate) and stderr <= 0.05 * abs(estimate) else INCONCLUSIVE
    logger.info(f"Boundary S_{2 * m} estimate for {sym.label}: {estimate:.6g} +- {stderr:.2g}")
    return McEstimate(f's{2 * m}_boundary', estimate, stderr, int(samples.size), cfg.seed, verdict,
                      {'m': m, 'n_cutoff': n_cutoff, 'compact': bool(assume_compact)})


def hp_norm_mc(poly: TruncatedDirichletSeries, p: float, cfg: Optional[McConfig] = None) -> McEstimate:
    """(E |P_chi(0)|^p)^{1/p} over Haar-random characters, delta-method stderr"""
    cfg = cfg or McConfig()
    if not p > 0:
        raise PreconditionError(f"p must be positive, got {p}")

    def values(rng, n):
        return np.abs(_series_at_characters(poly, sample_characters(cfg, rng, n), 0.0)) ** p

    samples = _batched(cfg, values)
    mean, se_mean = _summarize(samples)
    estimate = mean ** (1.0 / p)
    stderr = (estimate / (p * mean)) * se_mean if mean > 0 else 0.0
    return McEstimate('hp_norm', float(estimate), float(stderr), int(samples.size), cfg.seed, None, {'p': p})


def boundary_uniformity_test(sym: Symbol, cfg: Optional[McConfig] = None, level: float = 0.01) -> Dict[str, Any]:
    """Kolmogorov-Smirnov test that phi(chi) is uniform on the circle c + r T"""
    cfg = cfg or McConfig()
    d = sym.descriptor
    if not isinstance(d, Affine) or d.r == 0:
        raise PreconditionError(f"uniformity test needs a non-constant affine symbol, got {sym.label}")
    rng = np.random.default_rng(cfg.seed)
    bv = boundary_values(sym, sample_characters(cfg, rng, cfg.n_samples), cfg)
    angle = np.mod(np.angle((bv - d.c) / d.r), 2.0 * np.pi) / (2.0 * np.pi)
    result = stats.kstest(angle, 'uniform')
    return {'statistic': float(result.statistic), 'pvalue': float(result.pvalue),
            'n_samples': int(angle.size), 'passed': bool(result.pvalue > level)}


def hp_ratio_check(sym: Symbol, p: float, cfg: Optional[McConfig] = None, n_polys: int = 8,
                         length: int = 16, n_trunc: int = 256) -> Dict[str, Any]:
    """
    Experimental ratios ||C_phi P||_p / ||P||_p on random Dirichlet polynomials

    Finite sampling cannot decide boundedness; the largest ratio is reported
    as a spot check.
    """
    cfg = cfg or McConfig()
    matrix = build_matrix(sym, length, n_trunc)
    rng = np.random.default_rng(cfg.seed)
    ratios: List[float] = []
    for _ in range(n_polys):
        poly = TruncatedDirichletSeries(rng.standard_normal(length) + 1j * rng.standard_normal(length))
        image = matrix.apply(poly)
        ratios.append(hp_norm_mc(image, p, cfg).estimate / hp_norm_mc(poly, p, cfg).estimate)
    logger.info(f"H^{p:g} spot check for {sym.label}: max ratio {max(ratios):.4g} (experimental)")
    return {'p': p, 'ratios': ratios, 'max_ratio': float(max(ratios)), 'experimental': True}
