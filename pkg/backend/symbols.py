"""
Symbol Construction Module for the Dirichlet Composition Lab
Gordon-Hedenmalm symbols psi(s) = c0 s + phi(s), closed-form families and class validation
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import binom

import config
from backend.dirichlet_algebra import (
    Character,
    TruncatedDirichletSeries,
    derivative as series_derivative,
    evaluate as series_evaluate,
    prime_count,
    prime_exponent_matrix,
    twist,
    vertical_shift,
)
from backend.errors import ClassViolation, MalformedSpec, PreconditionError, RangeViolation

logger = logging.getLogger(__name__)

LOG2 = float(np.log(2.0))
PERIOD = 2.0 * np.pi / LOG2


@dataclass(frozen=True)
class Affine:
    """phi = c + r 2^{-s}"""
    c: complex
    r: complex
    kind: str = field(default='affine', init=False)


@dataclass(frozen=True)
class DiskLift:
    """phi = Phi(2^{-s}) for a polynomial Phi with ascending coefficients"""
    coeffs: Tuple[complex, ...]
    kind: str = field(default='disk_lift', init=False)


@dataclass(frozen=True)
class SectorLift:
    """
    phi = R(omega 2^{-s}), R(z) = 1/2 + ((1 - z)/(1 + z))^{1/alpha}

    poly_rho and poly_angle describe the degree-K truncation: the shrink
    factor that keeps it inside the sector and the opening it achieves.
    """
    alpha: float
    K: int
    rotation: complex = 1.0 + 0j
    poly_rho: float = 1.0
    poly_angle: float = float('nan')
    kind: str = field(default='sector_lift', init=False)


@dataclass(frozen=True)
class Generic:
    """Arbitrary truncated Dirichlet series"""
    kind: str = field(default='generic', init=False)


Descriptor = Union[Affine, DiskLift, SectorLift, Generic]


def sector_map(z, alpha: float):
    """Riemann map of the disk onto the sector of opening pi/alpha with vertex 1/2"""
    z = np.asarray(z, dtype=complex)
    return 0.5 + ((1.0 - z) / (1.0 + z)) ** (1.0 / alpha)


def sector_map_derivative(z, alpha: float):
    z = np.asarray(z, dtype=complex)
    u = (1.0 - z) / (1.0 + z)
    return (1.0 / alpha) * u ** (1.0 / alpha - 1.0) * (-2.0 / (1.0 + z) ** 2)


def sector_inverse(w, alpha: float):
    """Inverse of sector_map; w must lie in the sector"""
    zeta = (np.asarray(w, dtype=complex) - 0.5) ** alpha
    return (1.0 - zeta) / (1.0 + zeta)


def in_sector(w, alpha: float, vertex: complex = 0.5):
    return np.abs(np.angle(np.asarray(w, dtype=complex) - vertex)) < np.pi / (2.0 * alpha)


def sector_taylor(alpha: float, order: int) -> np.ndarray:
    """Taylor coefficients of sector_map up to z^order"""
    beta = 1.0 / alpha
    j = np.arange(order + 1)
    left = binom(beta, j) * (-1.0) ** j       # (1 - z)^beta
    right = binom(-beta, j)                   # (1 + z)^-beta
    coeffs = np.convolve(left, right)[:order + 1].astype(complex)
    coeffs[0] += 0.5
    return coeffs


def _powers_of_two_series(poly: np.ndarray, size: int) -> TruncatedDirichletSeries:
    out = np.zeros(size, dtype=complex)
    k = 0
    while k < len(poly) and 2 ** k <= size:
        out[2 ** k - 1] = poly[k]
        k += 1
    return TruncatedDirichletSeries(out)


def _fmt(z: complex) -> str:
    return f"{z.real:g}" if z.imag == 0 else f"{z.real:g}{z.imag:+g}i"


def _boundary_circle(samples: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(samples) / samples)


@dataclass(frozen=True, eq=False)
class Symbol:
    """Gordon-Hedenmalm symbol with an optional closed-form descriptor"""
    c0: int
    phi: TruncatedDirichletSeries
    descriptor: Descriptor
    validated: bool = False
    margin: float = float('nan')

    @property
    def a1(self) -> complex:
        """phi(+infinity)"""
        return self.phi.constant_term

    @property
    def is_disk_like(self) -> bool:
        return isinstance(self.descriptor, (Affine, DiskLift, SectorLift))

    @property
    def is_constant(self) -> bool:
        if isinstance(self.descriptor, Affine):
            return self.descriptor.r == 0
        if isinstance(self.descriptor, DiskLift):
            return len(self.descriptor.coeffs) == 1
        return bool(np.all(self.phi.coeffs[1:] == 0))

    @property
    def label(self) -> str:
        d = self.descriptor
        if isinstance(d, Affine):
            return f"affine(c={_fmt(d.c)}, r={_fmt(d.r)})"
        if isinstance(d, DiskLift):
            return f"disk_lift(deg={len(d.coeffs) - 1})"
        if isinstance(d, SectorLift):
            return f"sector_lift(alpha={d.alpha:g}, K={d.K})"
        return f"generic(c0={self.c0}, N={self.phi.N})"

    def disk_coeffs(self) -> Optional[np.ndarray]:
        """Ascending coefficients of Phi for polynomial lifts"""
        d = self.descriptor
        if isinstance(d, Affine):
            return np.array([d.c, d.r], dtype=complex)
        if isinstance(d, DiskLift):
            return np.array(d.coeffs, dtype=complex)
        return None

    def disk_map(self, z):
        d = self.descriptor
        if isinstance(d, SectorLift):
            return sector_map(d.rotation * np.asarray(z, dtype=complex), d.alpha)
        coeffs = self.disk_coeffs()
        if coeffs is None:
            raise PreconditionError(f"{self.label} is not a disk lift")
        return P.polyval(np.asarray(z, dtype=complex), coeffs)

    def disk_map_derivative(self, z):
        d = self.descriptor
        if isinstance(d, SectorLift):
            return d.rotation * sector_map_derivative(d.rotation * np.asarray(z, dtype=complex), d.alpha)
        coeffs = self.disk_coeffs()
        if coeffs is None:
            raise PreconditionError(f"{self.label} is not a disk lift")
        return P.polyval(np.asarray(z, dtype=complex), P.polyder(coeffs))

    def disk_inverse(self, w):
        """z with Phi(z) = w for univalent lifts (affine with r != 0, sector)"""
        d = self.descriptor
        w = np.asarray(w, dtype=complex)
        if isinstance(d, Affine) and d.r != 0:
            return (w - d.c) / d.r
        if isinstance(d, SectorLift):
            return sector_inverse(w, d.alpha) / d.rotation
        raise PreconditionError(f"{self.label} has no closed-form inverse")

    def _disk_variable(self, s, chi: Optional[Character]):
        z = np.exp(-LOG2 * np.asarray(s, dtype=complex))
        return z * chi.values[0] if chi is not None else z

    def evaluate(self, s, chi: Optional[Character] = None):
        """phi_chi(s) on scalars or arrays"""
        if self.is_disk_like:
            out = self.disk_map(self._disk_variable(s, chi))
        else:
            series = twist(self.phi, chi) if chi is not None else self.phi
            out = series_evaluate(series, s)
        return complex(out) if np.ndim(out) == 0 else out

    def derivative(self, s, chi: Optional[Character] = None):
        """phi_chi'(s)"""
        if self.is_disk_like:
            z = self._disk_variable(s, chi)
            out = self.disk_map_derivative(z) * (-LOG2 * z)
        else:
            series = twist(self.phi, chi) if chi is not None else self.phi
            out = series_evaluate(series_derivative(series), s)
        return complex(out) if np.ndim(out) == 0 else out

    def psi(self, s, chi: Optional[Character] = None):
        return self.c0 * np.asarray(s, dtype=complex) + self.evaluate(s, chi)

    def psi_derivative(self, s, chi: Optional[Character] = None):
        return self.c0 + self.derivative(s, chi)

    def series(self, size: int) -> TruncatedDirichletSeries:
        """Dirichlet coefficients of phi truncated at order size"""
        d = self.descriptor
        if isinstance(d, SectorLift):
            return _powers_of_two_series(self.sector_polynomial(), size)
        coeffs = self.disk_coeffs()
        if coeffs is not None:
            return _powers_of_two_series(coeffs, size)
        return self.phi.resized(size)

    def _with_descriptor(self, descriptor: Descriptor, phi: Optional[TruncatedDirichletSeries] = None) -> 'Symbol':
        sym = replace(self, descriptor=descriptor)
        return replace(sym, phi=phi if phi is not None else sym.series(self.phi.N))

    def rotated(self, omega: complex) -> 'Symbol':
        """Disk lifts with the disk variable multiplied by a unimodular omega"""
        d = self.descriptor
        if isinstance(d, Affine):
            return self._with_descriptor(Affine(d.c, d.r * omega))
        if isinstance(d, DiskLift):
            k = np.arange(len(d.coeffs))
            return self._with_descriptor(DiskLift(tuple(np.array(d.coeffs) * omega ** k)))
        if isinstance(d, SectorLift):
            return self._with_descriptor(replace(d, rotation=d.rotation * omega))
        raise PreconditionError(f"{self.label} is not a disk lift")

    def translate(self, tau: float) -> 'Symbol':
        """phi(. + i tau)"""
        if self.is_disk_like:
            return self.rotated(np.exp(-1j * tau * LOG2))
        return replace(self, phi=vertical_shift(self.phi, tau))

    def twisted(self, chi: Character) -> 'Symbol':
        """The vertical limit phi_chi as a symbol"""
        if self.is_disk_like:
            return self.rotated(complex(chi.values[0]))
        return replace(self, phi=twist(self.phi, chi))

    def boundary_image(self, samples: int = 1024, radius: float = 1.0) -> np.ndarray:
        """Phi on the circle |z| = radius, for disk lifts"""
        return self.disk_map(radius * _boundary_circle(samples))

    def support_bounds(self) -> Tuple[float, float, float, float]:
        """Box (re_lo, re_hi, im_lo, im_hi) containing the closure of phi(C_0)"""
        d = self.descriptor
        if isinstance(d, Affine):
            rad = abs(d.r)
            return (max(d.c.real - rad, 0.5), d.c.real + rad, d.c.imag - rad, d.c.imag + rad)
        if isinstance(d, SectorLift):
            cap = config.QUAD_SIGMA_CAP
            return (0.5, cap, -cap, cap)
        if isinstance(d, DiskLift):
            edge = self.boundary_image(4096)
            slack = 1e-9 + 2.0 * np.pi / 4096 * float(np.sum(np.arange(len(d.coeffs)) * np.abs(d.coeffs)))
            return (max(edge.real.min() - slack, 0.5), edge.real.max() + slack,
                    edge.imag.min() - slack, edge.imag.max() + slack)
        tail = float(np.sum(np.abs(self.phi.coeffs[1:])))
        a1 = self.a1
        return (max(a1.real - tail, 0.5), a1.real + tail, a1.imag - tail, a1.imag + tail)

    def cross_section(self, sigma) -> Tuple[np.ndarray, np.ndarray]:
        """
        Vertical extent [lo, hi] of phi(C_0) on the lines Re w = sigma

        Empty slices come back as lo = hi = nan.
        """
        sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
        d = self.descriptor
        lo = np.full(sigma.shape, np.nan)
        hi = np.full(sigma.shape, np.nan)
        if isinstance(d, Affine):
            rad = abs(d.r)
            sq = rad ** 2 - (sigma - d.c.real) ** 2
            ok = sq > 0
            half = np.sqrt(np.where(ok, sq, 0.0))
            lo[ok] = d.c.imag - half[ok]
            hi[ok] = d.c.imag + half[ok]
        elif isinstance(d, SectorLift):
            ok = sigma > 0.5
            half = (sigma - 0.5) * np.tan(np.pi / (2.0 * d.alpha))
            lo[ok] = -half[ok]
            hi[ok] = half[ok]
        elif isinstance(d, DiskLift):
            edge = self.boundary_image(2048)
            x0, y0 = edge.real, edge.imag
            x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
            s = sigma[:, None]
            crosses = (np.minimum(x0, x1) <= s) & (s <= np.maximum(x0, x1)) & (x0 != x1)
            frac = np.where(x0 != x1, (s - x0) / np.where(x0 != x1, x1 - x0, 1.0), 0.0)
            y = np.where(crosses, y0 + frac * (y1 - y0), np.nan)
            has = crosses.any(axis=1)
            lo[has] = np.nanmin(y[has], axis=1)
            hi[has] = np.nanmax(y[has], axis=1)
        else:
            re_lo, re_hi, im_lo, im_hi = self.support_bounds()
            ok = (sigma >= re_lo) & (sigma <= re_hi)
            lo[ok] = im_lo
            hi[ok] = im_hi
        return lo, hi

    def sector_polynomial(self) -> np.ndarray:
        """Ascending coefficients of the certified degree-K truncation, shrunk by poly_rho"""
        d = self.descriptor
        if not isinstance(d, SectorLift):
            raise PreconditionError(f"{self.label} is not a sector lift")
        k = np.arange(d.K + 1)
        return sector_taylor(d.alpha, d.K) * (d.poly_rho * d.rotation) ** k

    def truncated_lift(self) -> 'Symbol':
        """
        The certified polynomial of a sector lift as a DiskLift symbol

        Its series is the same one series() returns, so operator matrices and
        counting measures built from it describe one symbol. Coefficients past
        2^k > N stay in the descriptor and only drop out of phi.
        """
        poly = self.sector_polynomial()
        certified, z_bad, w_bad = _certified_min_re(poly, config.BOUNDARY_SAMPLES)
        if certified < 0.5 - config.CLASS_TOLERANCE:
            raise RangeViolation(f"sector truncation leaves Re w > 1/2 at Phi({z_bad:.6g}) = {w_bad:.6g}",
                                 witness=(z_bad, w_bad))
        sym = Symbol(0, TruncatedDirichletSeries(np.zeros(self.phi.N)), DiskLift(tuple(complex(x) for x in poly)),
                     validated=True, margin=max(certified - 0.5, 0.0))
        return replace(sym, phi=sym.series(self.phi.N))


def _certified_min_re(coeffs: np.ndarray, samples: int) -> Tuple[float, complex, complex]:
    """Lower bound for min Re Phi on |z| = 1, plus the worst sampled point and its image"""
    circle = _boundary_circle(samples)
    values = P.polyval(circle, coeffs)
    idx = int(np.argmin(values.real))
    k = np.arange(len(coeffs))
    step = 2.0 * np.pi / samples
    lipschitz = float(np.sum(k * np.abs(coeffs))) * step / 2.0
    curvature = float(np.sum(k ** 2 * np.abs(coeffs))) * step ** 2 / 8.0
    return float(values.real[idx]) - min(lipschitz, curvature), complex(circle[idx]), complex(values[idx])


def make_affine(c: complex, r: complex, size: Optional[int] = None) -> Symbol:
    """phi = c + r 2^{-s}; requires Re c >= 1/2 + |r|"""
    c, r = complex(c), complex(r)
    margin = c.real - 0.5 - abs(r)
    if margin < 0:
        witness = c - abs(r)
        raise ClassViolation(f"affine symbol needs Re c >= 1/2 + |r|; Re c = {c.real}, 1/2 + |r| = {0.5 + abs(r)}",
                             witness=witness)
    size = size or config.N_DEFAULT
    sym = Symbol(0, TruncatedDirichletSeries(np.zeros(size)), Affine(c, r), validated=True, margin=margin)
    return replace(sym, phi=sym.series(size))


def make_constant(c: complex, size: Optional[int] = None) -> Symbol:
    """phi identically c; the counting function vanishes"""
    return make_affine(c, 0.0, size)


def make_disk_lift(coeffs: Sequence[complex], size: Optional[int] = None,
                   tolerance: float = config.CLASS_TOLERANCE) -> Symbol:
    """
    phi = Phi(2^{-s}) for a polynomial Phi with Phi(D) inside Re w > 1/2

    Args:
        coeffs: ascending coefficients Phi_0, Phi_1, ...
        size: truncation order, at least 2^deg
        tolerance: how far the certified minimum may dip below 1/2

    Returns:
        Validated Symbol with a DiskLift descriptor
    """
    arr = np.array(coeffs, dtype=complex).ravel()
    if arr.size == 0:
        raise PreconditionError("disk lift needs at least one coefficient")
    nz = np.flatnonzero(arr)
    arr = arr[:nz[-1] + 1] if nz.size else arr[:1]
    degree = arr.size - 1
    size = size or max(config.N_DEFAULT, 2 ** degree)
    if size < 2 ** degree:
        raise PreconditionError(f"truncation {size} cannot hold degree {degree} (needs {2 ** degree})")
    certified, z_bad, w_bad = _certified_min_re(arr, config.BOUNDARY_SAMPLES)
    if certified < 0.5 - tolerance:
        raise RangeViolation(
            f"Phi leaves Re w > 1/2: Phi({z_bad:.6g}) = {w_bad:.6g}, certified min Re = {certified:.6g}",
            witness=(z_bad, w_bad),
        )
    sym = Symbol(0, TruncatedDirichletSeries(np.zeros(size)), DiskLift(tuple(complex(x) for x in arr)),
                 validated=True, margin=max(certified - 0.5, 0.0))
    return replace(sym, phi=sym.series(size))


def make_sector_lift(alpha: float, K: int = config.SECTOR_K_DEFAULT, size: Optional[int] = None) -> Symbol:
    """
    Lift of the Riemann map onto the sector |arg(w - 1/2)| < pi/(2 alpha)

    The symbol itself is the closed-form map; its degree-K Taylor truncation
    is checked on the boundary and shrunk by rho < 1 until it stays inside
    the sector.
    """
    if not alpha > 1:
        raise PreconditionError(f"sector lift needs alpha > 1, got {alpha}")
    if not 1 <= K <= config.SECTOR_K_MAX:
        raise PreconditionError(f"sector lift order must lie in 1..{config.SECTOR_K_MAX}, got {K}")
    size = size or config.N_DEFAULT
    taylor = sector_taylor(alpha, K)
    circle = _boundary_circle(config.BOUNDARY_SAMPLES)
    limit = np.pi / (2.0 * alpha) + config.SECTOR_ANGLE_SLACK
    k = np.arange(K + 1)
    worst = None
    for rho in config.SECTOR_SHRINK_LADDER:
        rel = P.polyval(circle, taylor * rho ** k) - 0.5
        angle = float(np.max(np.abs(np.angle(rel))))
        if np.all(rel.real > 0) and angle < limit:
            if rho < 1.0:
                logger.info(f"Sector lift alpha={alpha}, K={K}: truncation shrunk by rho={rho}, opening {angle:.6f}")
            descriptor = SectorLift(float(alpha), int(K), 1.0 + 0j, float(rho), angle)
            sym = Symbol(0, TruncatedDirichletSeries(np.zeros(size)), descriptor, validated=True, margin=0.0)
            return replace(sym, phi=sym.series(size))
        worst = complex(rel[np.argmax(np.abs(np.angle(rel)))] + 0.5)
    raise ClassViolation(f"degree-{K} truncation of the alpha={alpha} sector map escapes the sector", witness=worst)


@dataclass(frozen=True)
class BoundaryGrid:
    """Sampling plan for class validation"""
    sigmas: Tuple[float, ...] = tuple(config.VALIDATION_SIGMAS)
    n_t: int = config.VALIDATION_T_POINTS
    n_characters: int = config.VALIDATION_CHARACTERS
    seed: int = config.DEFAULT_SEED


@dataclass
class ClassReport:
    """Outcome of validate_class"""
    valid: bool
    class_label: str
    branch: str
    margin: float
    inf_re: float
    witness: Optional[complex]
    n_samples: int
    symbol: Symbol

    def summary(self) -> str:
        if not self.valid:
            return f"{self.class_label} violated at {self.witness}, inf Re = {self.inf_re:.6g}"
        if self.branch == 'phi = i tau':
            return f"{self.class_label}, {self.branch}"
        return f"{self.class_label}, margin {self.margin:.4g}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'valid': self.valid,
            'class': self.class_label,
            'branch': self.branch,
            'margin': self.margin,
            'inf_re': self.inf_re,
            'witness': None if self.witness is None else [self.witness.real, self.witness.imag],
            'n_samples': self.n_samples,
            'symbol': self.symbol.label,
        }


def _sample_real_parts(sym: Symbol, grid: BoundaryGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Re phi_chi(sigma) over the grid, with the matching sample points s"""
    sigmas = np.asarray(grid.sigmas, dtype=float)
    if sym.is_disk_like:
        theta = 2.0 * np.pi * np.arange(grid.n_t) / grid.n_t
        s = sigmas[:, None] + 1j * theta[None, :] / LOG2
        return np.real(sym.evaluate(s)).ravel(), s.ravel()
    support = sym.phi.support()
    if support.size == 0:
        s = sigmas.astype(complex)
        return np.full(s.size, sym.a1.real), s
    rng = np.random.default_rng(grid.seed)
    count = prime_count(int(support.max()))
    exponents = prime_exponent_matrix(sym.phi.N, count, support)[support - 1]
    angles = np.vstack([np.zeros(count), rng.uniform(0, 2 * np.pi, size=(grid.n_characters, count))])
    chars = np.exp(1j * angles @ exponents.T)                  # (n_chars, |support|)
    damp = np.exp(-np.outer(sigmas, np.log(support.astype(float))))  # (n_sigma, |support|)
    coeffs = sym.phi.coeffs[support - 1]
    values = np.einsum('cj,sj,j->sc', chars, damp, coeffs)
    s = np.repeat(sigmas.astype(complex), chars.shape[0])
    return values.real.ravel(), s


def validate_class(sym: Symbol, grid: Optional[BoundaryGrid] = None) -> ClassReport:
    """Estimate inf Re phi over boundary samples and tag the symbol"""
    grid = grid or BoundaryGrid()
    label = f"G{sym.c0}"
    if sym.c0 >= 1 and sym.is_constant and abs(sym.a1.real) <= config.CLASS_TOLERANCE:
        validated = replace(sym, validated=True, margin=0.0)
        return ClassReport(True, label, 'phi = i tau', 0.0, sym.a1.real, None, 1, validated)

    re_parts, points = _sample_real_parts(sym, grid)
    idx = int(np.argmin(re_parts))
    inf_re = float(re_parts[idx])
    floor = 0.5 if sym.c0 == 0 else 0.0
    branch = 'Re phi >= 1/2' if sym.c0 == 0 else 'Re phi >= 0'
    margin = inf_re - floor
    valid = margin >= -config.CLASS_TOLERANCE
    witness = None if valid else complex(points[idx])
    if not valid:
        logger.warning(f"Class violation for {sym.label}: inf Re phi = {inf_re:.6g} at s = {witness}")
    updated = replace(sym, validated=valid, margin=max(margin, 0.0) if valid else margin)
    return ClassReport(valid, label, branch, float(max(margin, 0.0)) if valid else float(margin),
                       inf_re, witness, int(re_parts.size), updated)


def make_generic(phi: TruncatedDirichletSeries, c0: int = 0, grid: Optional[BoundaryGrid] = None) -> Symbol:
    """Generic symbol from a truncated series, validated by sampling"""
    if c0 < 0:
        raise PreconditionError(f"characteristic must be non-negative, got {c0}")
    report = validate_class(Symbol(int(c0), phi, Generic()), grid)
    if not report.valid:
        raise ClassViolation(f"symbol outside class {report.class_label}: inf Re phi = {report.inf_re:.6g}",
                             witness=report.witness)
    return report.symbol


def _parse_complex(value: Any) -> complex:
    try:
        if isinstance(value, Mapping):
            return complex(float(value.get('re', 0.0)), float(value.get('im', 0.0)))
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ValueError(f"expected [re, im], got {value}")
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, str):
            return complex(value.replace(' ', '').replace('i', 'j'))
        return complex(value)
    except (TypeError, ValueError) as e:
        raise MalformedSpec(f"cannot read complex number from {value!r}: {e}") from e


def _parse_coefficients(value: Any) -> List[complex]:
    if isinstance(value, Mapping):
        re = list(value.get('re', []))
        im = list(value.get('im', [0.0] * len(re)))
        if len(re) != len(im):
            raise MalformedSpec("disk coefficients re/im lengths differ")
        return [complex(a, b) for a, b in zip(re, im)]
    if isinstance(value, (list, tuple)):
        return [_parse_complex(v) for v in value]
    raise MalformedSpec(f"cannot read polynomial coefficients from {value!r}")


def symbol_from_spec(spec: Mapping[str, Any]) -> Symbol:
    """Build a Symbol from its JSON description"""
    if not isinstance(spec, Mapping):
        raise MalformedSpec("symbol spec must be a JSON object")
    try:
        c0 = int(spec.get('c0', 0))
    except (TypeError, ValueError) as e:
        raise MalformedSpec(f"c0 must be an integer: {e}") from e
    descriptor = spec.get('descriptor', {'kind': 'generic'})
    if not isinstance(descriptor, Mapping) or 'kind' not in descriptor:
        raise MalformedSpec("descriptor must be an object with a 'kind'")
    kind = descriptor['kind']
    size = spec.get('N')
    size = int(size) if size is not None else None
    if kind != 'generic' and c0 != 0:
        raise MalformedSpec(f"descriptor kind '{kind}' describes a c0 = 0 symbol, got c0 = {c0}")
    if kind == 'affine':
        return make_affine(_parse_complex(descriptor.get('c')), _parse_complex(descriptor.get('r', 0.0)), size)
    if kind == 'constant':
        return make_constant(_parse_complex(descriptor.get('c')), size)
    if kind == 'disk_lift':
        return make_disk_lift(_parse_coefficients(descriptor.get('coeffs')), size)
    if kind == 'sector_lift':
        try:
            alpha = float(descriptor['alpha'])
            order = int(descriptor.get('K', config.SECTOR_K_DEFAULT))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedSpec(f"sector_lift needs numeric alpha and K: {e}") from e
        return make_sector_lift(alpha, order, size)
    if kind == 'generic':
        if 'coeffs' not in spec:
            raise MalformedSpec("generic symbol needs 'coeffs' in the {N, re, im} format")
        return make_generic(TruncatedDirichletSeries.from_dict(spec['coeffs']), c0)
    raise MalformedSpec(f"unknown descriptor kind '{kind}'")


def symbol_to_spec(sym: Symbol) -> Dict[str, Any]:
    """JSON description accepted by symbol_from_spec"""
    d = sym.descriptor
    spec: Dict[str, Any] = {'c0': sym.c0, 'N': sym.phi.N}
    if isinstance(d, Affine):
        spec['descriptor'] = {'kind': 'affine', 'c': [d.c.real, d.c.imag], 'r': [d.r.real, d.r.imag]}
    elif isinstance(d, DiskLift):
        spec['descriptor'] = {'kind': 'disk_lift', 'coeffs': {'re': [z.real for z in d.coeffs],
                                                             'im': [z.imag for z in d.coeffs]}}
    elif isinstance(d, SectorLift):
        spec['descriptor'] = {'kind': 'sector_lift', 'alpha': d.alpha, 'K': d.K}
    else:
        spec['descriptor'] = {'kind': 'generic'}
    spec['coeffs'] = sym.phi.to_dict()
    return spec
