"""
Counting Function Module for the Dirichlet Composition Lab
Mean counting function, preimage enumeration, Green's functions and the Lindelof/Littlewood suite
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as P

import config
from backend.dirichlet_algebra import Character
from backend.errors import (
    BoundaryRootHazard,
    DomainError,
    MalformedSpec,
    PreconditionError,
    RootFinderFailure,
)
from backend.quadrature import QuadratureSpec, polar_integral, polar_nodes, sliced_nodes
from backend.symbols import LOG2, PERIOD, Affine, DiskLift, SectorLift, Symbol, in_sector

logger = logging.getLogger(__name__)

_HAZARD_STEP = np.pi / 4.0


@dataclass
class CountingSample:
    """One evaluation of M_phi (or M_{phi,1+a}) with diagnostics"""
    w: complex
    value: float
    method: str
    T: float
    sigma_min: float
    n_roots: int
    err_est: float
    converged: bool = True
    weight_exponent: float = 1.0

    def to_row(self) -> Dict[str, Any]:
        return {
            're_w': self.w.real,
            'im_w': self.w.imag,
            'm_value': self.value,
            'err_est': self.err_est,
            'n_roots': self.n_roots,
            'method': self.method,
        }


@dataclass(frozen=True)
class GreenDomain:
    """Disk, half-plane Re z > theta, or sector |arg(z - vertex)| < pi/(2 alpha)"""
    kind: str
    theta: float = 0.0
    alpha: float = 2.0
    vertex: complex = 0.5 + 0j

    def __post_init__(self):
        if self.kind not in ('disk', 'half_plane', 'sector'):
            raise PreconditionError(f"unknown Green domain '{self.kind}'")
        if self.kind == 'half_plane' and not np.isfinite(self.theta):
            raise PreconditionError("half-plane abscissa must be finite")
        if self.kind == 'sector' and not self.alpha > 1:
            raise PreconditionError(f"sector domain needs alpha > 1, got {self.alpha}")

    @classmethod
    def disk(cls) -> 'GreenDomain':
        return cls('disk')

    @classmethod
    def half_plane(cls, theta: float = 0.0) -> 'GreenDomain':
        return cls('half_plane', theta=float(theta))

    @classmethod
    def sector(cls, alpha: float, vertex: complex = 0.5) -> 'GreenDomain':
        return cls('sector', alpha=float(alpha), vertex=complex(vertex))

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.kind == 'disk':
            return np.abs(z) < 1.0
        if self.kind == 'half_plane':
            return z.real > self.theta
        return in_sector(z, self.alpha, self.vertex)


def green(domain: GreenDomain, z, w):
    """Green's function g_D(z, w) for the explicit domains"""
    z_arr = np.asarray(z, dtype=complex)
    w_arr = np.asarray(w, dtype=complex)
    if not (np.all(domain.contains(z_arr)) and np.all(domain.contains(w_arr))):
        raise DomainError(f"Green's function arguments must lie in the {domain.kind} domain")
    if np.any(z_arr == w_arr):
        raise DomainError("Green's function is singular at z = w")
    if domain.kind == 'disk':
        out = np.log(np.abs((1.0 - z_arr * np.conj(w_arr)) / (z_arr - w_arr)))
    elif domain.kind == 'half_plane':
        out = np.log(np.abs((z_arr + np.conj(w_arr) - 2.0 * domain.theta) / (z_arr - w_arr)))
    else:
        zz = (z_arr - domain.vertex) ** domain.alpha
        ww = (w_arr - domain.vertex) ** domain.alpha
        out = np.log(np.abs((zz + np.conj(ww)) / (zz - ww)))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SearchBox:
    """Rectangle sigma_min < Re s < sigma_max, t_min < Im s < t_max"""
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        if not self.sigma_min > 0:
            raise PreconditionError(f"search box needs sigma_min > 0, got {self.sigma_min}")
        if self.sigma_max <= self.sigma_min or self.t_max <= self.t_min:
            raise PreconditionError(f"degenerate search box {self}")

    def contains(self, s: complex) -> bool:
        return self.sigma_min <= s.real <= self.sigma_max and self.t_min <= s.imag <= self.t_max

    def jittered(self, rng: np.random.Generator, scale: float = 1e-3) -> 'SearchBox':
        """Slightly larger box with every edge pushed out by a random amount of order scale"""
        eps = rng.uniform(0.1 * scale, scale, size=4)
        return SearchBox(self.sigma_min * (1.0 - eps[0]), self.sigma_max + eps[1],
                         self.t_min - eps[2], self.t_max + eps[3])


# Zero counting and isolation

def _edge_points(rect: Tuple[float, float, float, float], density: float) -> np.ndarray:
    a, b, c, d = rect
    nx = max(8, int(np.ceil((b - a) * density)))
    ny = max(8, int(np.ceil((d - c) * density)))
    xs = np.linspace(a, b, nx, endpoint=False)
    ys = np.linspace(c, d, ny, endpoint=False)
    return np.concatenate([
        xs + 1j * c,
        b + 1j * ys,
        (a + b - xs) + 1j * d,
        a + 1j * (c + d - ys),
    ])


def _winding(func: Callable[[np.ndarray], np.ndarray], rect: Tuple[float, float, float, float]) -> int:
    """Zeros of func inside rect by summed phase increments along its edges"""
    density = float(config.WINDING_POINTS_PER_UNIT)
    for _ in range(config.WINDING_MAX_DOUBLINGS + 1):
        values = func(_edge_points(rect, density))
        magnitude = np.abs(values)
        if not np.all(np.isfinite(values)) or magnitude.min() <= 1e-12 * (1.0 + magnitude.max()):
            raise BoundaryRootHazard(f"zero on or near the edge of {rect}")
        steps = np.angle(np.roll(values, -1) / values)
        if np.max(np.abs(steps)) < _HAZARD_STEP:
            total = steps.sum() / (2.0 * np.pi)
            count = int(np.rint(total))
            if abs(total - count) > config.WINDING_INTEGER_TOL:
                raise BoundaryRootHazard(f"winding {total:.3f} is not near an integer on {rect}")
            return count
        density *= 2.0
    raise BoundaryRootHazard(f"phase along {rect} did not resolve after refinement")


def _newton(func, dfunc, s0: complex) -> Tuple[complex, float]:
    s = complex(s0)
    for _ in range(config.NEWTON_MAX_ITER):
        value = complex(func(s))
        slope = complex(dfunc(s))
        if slope == 0:
            break
        step = value / slope
        s -= step
        if abs(step) <= 1e-15 * (1.0 + abs(s)):
            break
    return s, abs(complex(func(s)))


def _isolate(func, dfunc, rect, count: int, rng: np.random.Generator, depth: int = 0) -> List[Tuple[complex, int]]:
    if count == 0:
        return []
    a, b, c, d = rect
    width, height = b - a, d - c
    if count == 1 or max(width, height) < 1e-7:
        root, residual = _newton(func, dfunc, complex((a + b) / 2.0, (c + d) / 2.0))
        pad = 1e-9 * (1.0 + max(width, height))
        inside = a - pad <= root.real <= b + pad and c - pad <= root.imag <= d + pad
        if residual <= config.NEWTON_TOL and inside:
            return [(root, count)]
        if max(width, height) < 1e-12 or depth > 80:
            raise RootFinderFailure(f"Newton stalled near {root} (residual {residual:.3g})")
    for attempt in range(config.JITTER_RETRIES + 1):
        frac = 0.5 + (rng.uniform(-0.15, 0.15) if attempt else 0.0)
        if width >= height:
            cut = a + frac * width
            parts = [(a, cut, c, d), (cut, b, c, d)]
        else:
            cut = c + frac * height
            parts = [(a, b, c, cut), (a, b, cut, d)]
        try:
            counts = [_winding(func, part) for part in parts]
        except BoundaryRootHazard:
            continue
        if sum(counts) != count:
            continue
        found: List[Tuple[complex, int]] = []
        for part, n in zip(parts, counts):
            found.extend(_isolate(func, dfunc, part, n, rng, depth + 1))
        return found
    raise BoundaryRootHazard(f"could not split {rect} cleanly around {count} zeros")


def _merge(roots: List[Tuple[complex, int]]) -> List[Tuple[complex, int]]:
    merged: List[Tuple[complex, int]] = []
    for root, mult in sorted(roots, key=lambda item: (item[0].imag, item[0].real)):
        for i, (other, m) in enumerate(merged):
            if abs(root - other) <= config.ROOT_MERGE_TOL:
                merged[i] = (other, m + mult)
                break
        else:
            merged.append((root, mult))
    return merged


def _slabs(box: SearchBox) -> List[Tuple[float, float, float, float]]:
    count = max(1, int(np.ceil((box.t_max - box.t_min) / config.SLAB_HEIGHT)))
    edges = np.linspace(box.t_min, box.t_max, count + 1)
    return [(box.sigma_min, box.sigma_max, edges[i], edges[i + 1]) for i in range(count)]


def enumerate_preimages(sym: Symbol, w: complex, box: SearchBox, chi: Optional[Character] = None,
                        rng: Optional[np.random.Generator] = None) -> List[Tuple[complex, int]]:
    """
    Roots of psi_chi(s) = w inside a box, with multiplicities

    The box is cut into horizontal slabs; each slab's zero count comes from
    the argument principle and zeros are isolated by bisection plus Newton.
    A zero on an edge triggers a retry on a jittered box that still covers
    the original one.
    """
    w = complex(w)
    if sym.c0 == 0 and w == sym.a1:
        raise PreconditionError("preimages of phi(+infinity) are excluded")
    rng = rng or np.random.default_rng(config.DEFAULT_SEED)
    target = sym.twisted(chi) if chi is not None else sym

    def func(s):
        return target.psi(s) - w

    def dfunc(s):
        return target.psi_derivative(s)

    current = box
    for attempt in range(config.JITTER_RETRIES + 1):
        try:
            roots: List[Tuple[complex, int]] = []
            for slab in _slabs(current):
                count = _winding(func, slab)
                roots.extend(_isolate(func, dfunc, slab, count, rng))
            return [(r, m) for r, m in _merge(roots) if box.contains(r)]
        except BoundaryRootHazard as e:
            logger.warning(f"Boundary-root hazard for w={w:.6g} (attempt {attempt + 1}): {e}")
            current = box.jittered(rng)
    raise BoundaryRootHazard(f"preimage search for w={w} failed after {config.JITTER_RETRIES} jitters")


def count_preimages(sym: Symbol, w: complex, box: SearchBox, chi: Optional[Character] = None) -> int:
    """Winding number of psi_chi - w around the whole box"""
    w = complex(w)
    return _winding(lambda s: sym.psi(s, chi) - w, (box.sigma_min, box.sigma_max, box.t_min, box.t_max))


# Disk-lift preimages

def _polish(coeffs: np.ndarray, w: complex, roots: np.ndarray) -> np.ndarray:
    shifted = coeffs.copy()
    shifted[0] -= w
    deriv = P.polyder(shifted)
    for _ in range(3):
        slope = P.polyval(roots, deriv)
        ok = slope != 0
        roots = np.where(ok, roots - P.polyval(roots, shifted) / np.where(ok, slope, 1.0), roots)
    return roots


def disk_roots(sym: Symbol, w: complex) -> np.ndarray:
    """All z with Phi(z) = w (for the sector lift only the root inside the disk)"""
    w = complex(w)
    d = sym.descriptor
    if isinstance(d, Affine):
        return np.zeros(0, dtype=complex) if d.r == 0 else np.array([(w - d.c) / d.r])
    if isinstance(d, SectorLift):
        if not in_sector(w, d.alpha):
            return np.zeros(0, dtype=complex)
        return np.atleast_1d(sym.disk_inverse(w))
    if isinstance(d, DiskLift):
        coeffs = np.array(d.coeffs, dtype=complex)
        if coeffs.size == 1:
            return np.zeros(0, dtype=complex)
        shifted = coeffs.copy()
        shifted[0] -= w
        try:
            roots = np.roots(shifted[::-1])
        except np.linalg.LinAlgError as e:
            raise RootFinderFailure(f"companion eigenvalues failed for w={w}: {e}") from e
        return _polish(coeffs, w, roots)
    raise PreconditionError(f"{sym.label} is not a disk lift")


def preimages_from_disk(sym: Symbol, w: complex, box: SearchBox) -> List[Tuple[complex, int]]:
    """Exact preimages of a disk lift inside a box: s = -log z / log 2 + i k period"""
    roots = []
    for z in disk_roots(sym, w):
        if not 0 < abs(z) < 1:
            continue
        base = -np.log(z) / LOG2
        k_lo = int(np.ceil((box.t_min - base.imag) / PERIOD))
        k_hi = int(np.floor((box.t_max - base.imag) / PERIOD))
        for k in range(k_lo, k_hi + 1):
            s = complex(base.real, base.imag + k * PERIOD)
            if box.contains(s):
                roots.append((s, 1))
    return _merge(roots)


def mean_counting_exact_disk(sym: Symbol, w: complex, a: float = 0.0) -> CountingSample:
    """
    M_phi(w) for disk lifts from the disk preimages of Phi

    value = sum_{|z| < 1} log(1/|z|)^{1+a} / (log 2)^a, which for a = 0 is the
    Nevanlinna counting function of Phi.
    """
    if not sym.is_disk_like:
        raise PreconditionError(f"exact disk counting needs a disk lift, got {sym.label}")
    w = complex(w)
    if w == sym.a1:
        raise PreconditionError("M_phi is not evaluated at phi(+infinity)")
    if a < 0:
        raise PreconditionError(f"weight exponent must be >= 0, got {a}")
    roots = disk_roots(sym, w)
    inside = roots[(np.abs(roots) < 1.0) & (np.abs(roots) > 0)]
    logs = -np.log(np.abs(inside))
    value = float(np.sum(logs ** (1.0 + a)) / LOG2 ** a)
    err = 0.0
    if inside.size:
        residual = np.abs(sym.disk_map(inside) - w)
        slope = np.abs(sym.disk_map_derivative(inside))
        err = float(np.sum(residual / np.maximum(slope, 1e-300) / np.abs(inside)))
    if err > 1e-6:
        raise RootFinderFailure(f"disk roots for w={w} only reached residual {err:.3g}")
    return CountingSample(w, value, 'exact_disk', float('inf'), 0.0, int(inside.size),
                          max(err, np.finfo(float).eps), True, 1.0 + a)


# Strip enumeration

def preimage_sigma_bound(sym: Symbol, w: complex) -> Optional[float]:
    """
    Upper bound for Re s over preimages of w, or None when w has none

    Uses |phi(s) - a_1| <= sum_{n >= 2} |a_n| n^{-Re s}; the sector lift uses
    its closed-form inverse.
    """
    w = complex(w)
    d = sym.descriptor
    if isinstance(d, SectorLift):
        roots = disk_roots(sym, w)
        inside = roots[np.abs(roots) < 1.0]
        if inside.size == 0:
            return None
        return float(np.max(-np.log(np.abs(inside)) / LOG2))
    coeffs = np.abs(sym.phi.coeffs[1:])
    dist = abs(w - sym.a1)
    if not np.any(coeffs > 0) or coeffs.sum() < dist:
        return None
    logn = np.log(np.arange(2, sym.phi.N + 1, dtype=float))

    def tail(sigma):
        return float(np.sum(coeffs * np.exp(-sigma * logn)))

    if tail(config.SIGMA_CAP) >= dist:
        return float(config.SIGMA_CAP)
    lo, hi = 0.0, float(config.SIGMA_CAP)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if tail(mid) >= dist:
            lo = mid
        else:
            hi = mid
    return hi


def default_T(sym: Symbol) -> float:
    return config.COUNTING_T_PERIODS * PERIOD if sym.is_disk_like else config.COUNTING_T_GENERIC


def _strip_counting(sym: Symbol, w: complex, a: float, T: Optional[float], sigma_min: Optional[float],
                    rng: Optional[np.random.Generator]) -> CountingSample:
    if sym.c0 != 0:
        raise PreconditionError("mean counting is defined here for c0 = 0 symbols")
    w = complex(w)
    if not w.real > 0.5:
        raise PreconditionError(f"M_phi is evaluated on Re w > 1/2, got {w}")
    if w == sym.a1:
        raise PreconditionError("M_phi is not evaluated at phi(+infinity)")
    T = float(T or default_T(sym))
    sigma_min = float(sigma_min or config.SIGMA_MIN_DEFAULT)
    bound = preimage_sigma_bound(sym, w)
    if bound is None or bound <= 0.5 * sigma_min:
        return CountingSample(w, 0.0, 'strip_enum', T, sigma_min, 0, 0.0, True, 1.0 + a)
    box = SearchBox(0.5 * sigma_min, bound + 0.05, -2.0 * T - 1.0, 2.0 * T + 1.0)
    roots = enumerate_preimages(sym, w, box, rng=rng)
    re = np.array([r.real for r, _ in roots])
    im = np.array([r.imag for r, _ in roots])
    mult = np.array([m for _, m in roots], dtype=float)

    def average(height: float, floor: float) -> Tuple[float, int]:
        # roots on |Im s| = height count half
        edge = np.abs(np.abs(im) - height) <= 1e-9 * max(1.0, height)
        weight = np.where(edge, 0.5, (np.abs(im) < height).astype(float)) * (re > floor) * mult
        return float(np.pi / height * np.sum(weight * re ** (1.0 + a))), int(np.round(weight.sum()))

    v0, n0 = average(T, sigma_min)
    v1, _ = average(2.0 * T, sigma_min)
    v2, _ = average(2.0 * T, 0.5 * sigma_min)
    err = max(abs(v1 - v0), abs(v2 - v1))
    converged = abs(v1 - v0) <= config.NONCONVERGENCE_RATIO * max(abs(v0), abs(v1)) or max(v0, v1) == 0
    if not converged:
        logger.warning(f"Counting function at w={w:.6g} moved {abs(v1 - v0):.3g} when T doubled")
    return CountingSample(w, v0, 'strip_enum', T, sigma_min, n0, err, converged, 1.0 + a)


def mean_counting(sym: Symbol, w: complex, T: Optional[float] = None, sigma_min: Optional[float] = None,
                  rng: Optional[np.random.Generator] = None) -> CountingSample:
    """(pi/T) sum of Re s over preimages of w with sigma_min < Re s, |Im s| < T"""
    return _strip_counting(sym, w, 0.0, T, sigma_min, rng)


def weighted_mean_counting(sym: Symbol, w: complex, a: float, T: Optional[float] = None,
                           sigma_min: Optional[float] = None,
                           rng: Optional[np.random.Generator] = None) -> CountingSample:
    """Weighted counting function with (Re s)^{1+a} in place of Re s"""
    if a < 0:
        raise PreconditionError(f"weight exponent must be >= 0, got {a}")
    return _strip_counting(sym, w, float(a), T, sigma_min, rng)


def _companion_counting(coeffs: np.ndarray, w: np.ndarray, a: float) -> np.ndarray:
    """Batched Nevanlinna sums for polynomials of degree >= 2"""
    degree = coeffs.size - 1
    out = np.zeros(w.shape, dtype=float)
    lead = coeffs[-1]
    for start in range(0, w.size, 20000):
        block = w[start:start + 20000]
        comp = np.zeros((block.size, degree, degree), dtype=complex)
        comp[:, np.arange(1, degree), np.arange(degree - 1)] = 1.0
        lower = np.broadcast_to(coeffs[:-1], (block.size, degree)).copy()
        lower[:, 0] -= block
        comp[:, :, -1] = -lower / lead
        roots = np.linalg.eigvals(comp)
        mod = np.abs(roots)
        inside = (mod < 1.0) & (mod > 0)
        logs = np.where(inside, -np.log(np.where(inside, mod, 1.0)), 0.0)
        out[start:start + 20000] = np.sum(logs ** (1.0 + a), axis=1)
    return out / LOG2 ** a


def counting_function(sym: Symbol, a: float = 0.0, T: Optional[float] = None,
                      sigma_min: Optional[float] = None) -> Callable[[np.ndarray], np.ndarray]:
    """
    Vectorized evaluator w -> M_{phi,1+a}(w)

    Closed forms for affine and sector lifts, batched companion eigenvalues
    for polynomial lifts, strip enumeration point by point otherwise.
    """
    d = sym.descriptor
    scale = LOG2 ** a

    if sym.is_constant:
        return lambda w: np.zeros(np.shape(w))

    if isinstance(d, Affine):
        rad = abs(d.r)

        def affine(w):
            dist = np.abs(np.asarray(w, dtype=complex) - d.c)
            inside = dist < rad
            ratio = np.where(inside, rad / np.where(inside, dist, 1.0), 1.0)
            return np.log(ratio) ** (1.0 + a) / scale
        return affine

    if isinstance(d, SectorLift):
        def sector(w):
            w = np.asarray(w, dtype=complex)
            zeta = (w - 0.5) ** d.alpha
            inside = in_sector(w, d.alpha) & (zeta.real > 0)
            denom = np.abs(1.0 - zeta) ** 2
            with np.errstate(divide='ignore', invalid='ignore'):
                value = 0.5 * np.log1p(4.0 * zeta.real / denom)
            return np.where(inside, value, 0.0) ** (1.0 + a) / scale
        return sector

    if isinstance(d, DiskLift):
        coeffs = np.array(d.coeffs, dtype=complex)

        def polynomial(w):
            w = np.asarray(w, dtype=complex)
            return _companion_counting(coeffs, w.ravel(), a).reshape(w.shape)
        return polynomial

    def strip(w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros(w.shape)
        for idx, point in np.ndenumerate(w):
            if point.real > 0.5 and point != sym.a1:
                out[idx] = _strip_counting(sym, point, a, T, sigma_min, None).value
        return out
    return strip


# Counting measure M_phi dA

@dataclass
class CountingMeasure:
    """Discrete measure sum omega_q delta_{w_q} approximating M_{phi,1+a} dA"""
    nodes: np.ndarray
    weights: np.ndarray
    route: str
    spec: QuadratureSpec

    def integrate(self, func: Callable[[np.ndarray], np.ndarray]):
        if self.nodes.size == 0:
            return 0.0
        total = np.sum(func(self.nodes) * self.weights)
        return complex(total) if np.iscomplexobj(total) else float(total)

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))


def counting_measure(sym: Symbol, spec: Optional[QuadratureSpec] = None, a: float = 0.0) -> CountingMeasure:
    """
    Quadrature for integrals against M_{phi,1+a} dA

    Polynomial lifts are pulled back to the disk,
    int F M dA = int_D F(Phi(z)) log(1/|z|)^{1+a} (log 2)^{-a} |Phi'(z)|^2 dA(z);
    other symbols use sigma-sliced nodes weighted by the counting function.
    """
    spec = spec or QuadratureSpec()
    if sym.c0 != 0:
        raise PreconditionError("counting measures are built for c0 = 0 symbols")
    if sym.is_constant:
        return CountingMeasure(np.zeros(0, dtype=complex), np.zeros(0), 'empty', spec)
    if isinstance(sym.descriptor, (Affine, DiskLift)):
        z, weights = polar_nodes(0.0, 1.0, spec)
        kernel = (-np.log(np.abs(z))) ** (1.0 + a) / LOG2 ** a
        jac = np.abs(sym.disk_map_derivative(z)) ** 2
        return CountingMeasure(sym.disk_map(z), weights * kernel * jac, 'pullback', spec)
    re_lo, re_hi, _, _ = sym.support_bounds()
    if not isinstance(sym.descriptor, SectorLift):
        side = config.GENERIC_QUAD_SIDE * 2 ** spec.level
        spec = QuadratureSpec(order=4, panels=max(side // 4, 1), theta=spec.theta, t_nodes=side,
                              grading=spec.grading, level=0)
    nodes, weights = sliced_nodes(max(re_lo, 0.5), re_hi, sym.cross_section, spec,
                                  min_panel=1e-6, t_panels=2)
    values = counting_function(sym, a)(nodes)
    return CountingMeasure(nodes, weights * values, 'plane', spec)


# Inequality suite

def littlewood_bound(sym: Symbol, w):
    """pi log|(phi(+inf) + conj(w) - 1)/(phi(+inf) - w)|"""
    return np.pi * littlewood_bound_sharp(sym, w)


def littlewood_bound_sharp(sym: Symbol, w):
    """log|(phi(+inf) + conj(w) - 1)/(phi(+inf) - w)| = g_{C_1/2}(w, phi(+inf))"""
    w_arr = np.asarray(w, dtype=complex)
    a1 = sym.a1
    with np.errstate(divide='ignore'):
        out = np.log(np.abs(a1 + np.conj(w_arr) - 1.0)) - np.log(np.abs(a1 - w_arr))
    return float(out) if out.ndim == 0 else out


@dataclass
class InequalityReport:
    """Pass/fail record for one inequality over a set of points"""
    name: str
    n_checked: int
    n_violations: int
    max_excess: float
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.n_violations == 0

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'n_checked': self.n_checked, 'n_violations': self.n_violations,
                'max_excess': self.max_excess, 'passed': self.passed}


def _sample(sym: Symbol, w: complex, method: str) -> CountingSample:
    if method == 'exact_disk' or (method == 'auto' and sym.is_disk_like):
        return mean_counting_exact_disk(sym, w)
    return mean_counting(sym, w)


def littlewood_check(sym: Symbol, ws: Sequence[complex], method: str = 'auto') -> InequalityReport:
    """M_phi(w) <= pi log|...| (and the sharp form for disk lifts) within err_est"""
    rows, worst, bad = [], -np.inf, 0
    for w in ws:
        w = complex(w)
        if w == sym.a1:
            continue
        sample = _sample(sym, w, method)
        bound = littlewood_bound(sym, w)
        sharp = littlewood_bound_sharp(sym, w)
        excess = sample.value - bound - sample.err_est
        sharp_excess = sample.value - sharp - sample.err_est - 1e-9 * (1.0 + sharp)
        violated = excess > 0 or (sym.is_disk_like and sharp_excess > 0)
        bad += int(violated)
        worst = max(worst, excess)
        rows.append({'w': w, 'm_value': sample.value, 'bound': bound, 'sharp_bound': sharp,
                     'err_est': sample.err_est, 'violated': violated})
    return InequalityReport('littlewood', len(rows), bad, float(worst), rows)


def lindelof_check(sym: Symbol, z0: complex, ws: Sequence[complex], T: Optional[float] = None,
                   sigma_min: Optional[float] = None) -> InequalityReport:
    """sum over preimages s of w of g_{C_0}(s, z0) <= g_{C_1/2}(w, phi(z0))"""
    z0 = complex(z0)
    if not z0.real > 0:
        raise PreconditionError(f"z0 must lie in Re s > 0, got {z0}")
    target = complex(sym.evaluate(z0))
    T = float(T or default_T(sym))
    sigma_min = float(sigma_min or config.SIGMA_MIN_DEFAULT)
    rows, worst, bad = [], -np.inf, 0
    right_half = GreenDomain.half_plane(0.0)
    shifted_half = GreenDomain.half_plane(0.5)
    for w in ws:
        w = complex(w)
        if w == target or w == sym.a1 or not w.real > 0.5:
            continue
        bound = preimage_sigma_bound(sym, w)
        roots: List[Tuple[complex, int]] = []
        if bound is not None and bound > sigma_min:
            box = SearchBox(sigma_min, bound + 0.05, -T, T)
            roots = preimages_from_disk(sym, w, box) if sym.is_disk_like else enumerate_preimages(sym, w, box)
        lhs = float(sum(m * green(right_half, s, z0) for s, m in roots if s != z0))
        rhs = green(shifted_half, w, target)
        excess = lhs - rhs - 1e-9 * (1.0 + rhs)
        bad += int(excess > 0)
        worst = max(worst, lhs - rhs)
        rows.append({'w': w, 'lhs': lhs, 'rhs': rhs, 'n_roots': len(roots), 'violated': excess > 0})
    return InequalityReport('lindelof', len(rows), bad, float(worst), rows)


def submean_check(sym: Symbol, w: complex, r: float, spec: Optional[QuadratureSpec] = None) -> InequalityReport:
    """M_phi(w) <= average of M_phi over the disk D(w, r)"""
    w = complex(w)
    if not w.real - r > 0.5:
        raise PreconditionError(f"disk D({w}, {r}) must lie in Re w > 1/2")
    if abs(w - sym.a1) <= r:
        raise PreconditionError("disk must avoid phi(+infinity)")
    spec = spec or QuadratureSpec()
    func = counting_function(sym)
    area = np.pi * r ** 2
    coarse = float(polar_integral(func, w, r, spec)) / area
    average = float(polar_integral(func, w, r, spec.refined())) / area
    quad_err = abs(average - coarse)
    value = float(func(np.array([w]))[0])
    excess = value - average - quad_err - 1e-12
    row = {'w': w, 'r': r, 'm_value': value, 'average': average, 'quad_err': quad_err, 'violated': excess > 0}
    return InequalityReport('submean', 1, int(excess > 0), float(value - average), [row])


@dataclass
class BoundFit:
    """Empirical constant C in M_phi <= C * bound, with a refinement stability check"""
    name: str
    constant: float
    constant_refined: float
    n_points: int
    inconclusive: int = 0

    @property
    def stable(self) -> bool:
        if self.inconclusive:
            return False
        scale = max(abs(self.constant), abs(self.constant_refined), 1e-300)
        return abs(self.constant - self.constant_refined) / scale <= 0.05

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'constant': self.constant, 'constant_refined': self.constant_refined,
                'n_points': self.n_points, 'inconclusive': self.inconclusive, 'stable': self.stable}


def _refine_points(ws: np.ndarray) -> np.ndarray:
    """The original points plus midpoints of consecutive pairs"""
    mids = 0.5 * (ws[1:] + ws[:-1])
    return np.concatenate([ws, mids])


def subdomain_bound_fit(sym: Symbol, ws: Sequence[complex]) -> BoundFit:
    """C with M_phi(w) <= C g_Omega(w, phi(+inf)) on the sector Omega of a sector lift"""
    d = sym.descriptor
    if not isinstance(d, SectorLift):
        raise PreconditionError(f"subdomain bound is fitted for sector lifts, got {sym.label}")
    domain = GreenDomain.sector(d.alpha)
    func = counting_function(sym)

    def fit(points: np.ndarray) -> float:
        points = points[domain.contains(points) & (points != sym.a1)]
        ratios = func(points) / green(domain, points, sym.a1)
        return float(np.max(ratios)) if ratios.size else 0.0

    ws = np.asarray(ws, dtype=complex)
    return BoundFit('subdomain', fit(ws), fit(_refine_points(ws)), int(ws.size))


def decay_bound_fit(sym: Symbol, ws: Sequence[complex]) -> BoundFit:
    """C with M_phi(w) <= C (Re w - 1/2)/(1 + |Im w|^2) for Re w >= 2 Re phi(+inf)"""
    func = counting_function(sym)
    floor = 2.0 * sym.a1.real

    def fit(points: np.ndarray) -> float:
        points = points[points.real >= floor]
        if points.size == 0:
            return 0.0
        ratios = func(points) * (1.0 + points.imag ** 2) / (points.real - 0.5)
        return float(np.max(ratios))

    ws = np.asarray(ws, dtype=complex)
    return BoundFit('decay', fit(ws), fit(_refine_points(ws)), int(ws.size))


def restricted_nevanlinna(sym: Symbol, chi: Optional[Character], w: complex) -> float:
    """
    Sum of Re s over preimages of w under psi_chi with |Im s| <= 1

    The search box runs past |Im s| = 1 and its roots are checked against
    the winding number of the same box; a shortfall raises RootFinderFailure.
    """
    if sym.c0 < 1:
        raise PreconditionError("restricted Nevanlinna counting needs c0 >= 1")
    w = complex(w)
    if not 0 < w.real <= sym.c0:
        raise PreconditionError(f"need 0 < Re w <= c0 = {sym.c0}, got {w}")
    box = SearchBox(1e-9, w.real / sym.c0 + 0.25, -1.25, 1.25)
    roots = enumerate_preimages(sym, w, box, chi=chi)
    found = sum(m for _, m in roots)
    try:
        expected = count_preimages(sym, w, box, chi)
    except BoundaryRootHazard:
        # an edge root already forced a jittered search; nothing to compare against
        expected = found
    if found != expected:
        raise RootFinderFailure(f"found {found} preimages of w={w} where the box winds {expected}")
    return float(sum(m * s.real for s, m in roots if abs(s.imag) <= 1.0))


def nevanlinna_bound_fit(sym: Symbol, chis: Sequence[Optional[Character]], ws: Sequence[complex]) -> BoundFit:
    """
    C with N_{psi_chi}(w) <= C Re w / (1 + (Im w)^2) over characters and points

    Points whose preimage search fails are left out of C and counted as
    inconclusive; the fit is then never reported stable.
    """
    skipped = 0

    def fit(points: np.ndarray) -> float:
        nonlocal skipped
        best = 0.0
        for chi in chis:
            for w in points:
                try:
                    value = restricted_nevanlinna(sym, chi, w)
                except (BoundaryRootHazard, RootFinderFailure) as e:
                    logger.warning(f"Nevanlinna sample at w={w:.6g} is inconclusive: {e}")
                    skipped += 1
                    continue
                best = max(best, value * (1.0 + w.imag ** 2) / w.real)
        return best

    ws = np.asarray(ws, dtype=complex)
    coarse = fit(ws)
    refined = fit(_refine_points(ws))
    return BoundFit('nevanlinna', coarse, refined, int(ws.size) * len(chis), skipped)


# Heatmap

@dataclass(frozen=True)
class HeatmapGrid:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int

    @classmethod
    def parse(cls, text: str) -> 'HeatmapGrid':
        parts = [p.strip() for p in str(text).split(',')]
        if len(parts) != 6:
            raise MalformedSpec(f"grid needs reMin,reMax,imMin,imMax,nx,ny; got '{text}'")
        try:
            grid = cls(float(parts[0]), float(parts[1]), float(parts[2]), float(parts[3]),
                       int(parts[4]), int(parts[5]))
        except ValueError as e:
            raise MalformedSpec(f"grid values must be numeric: {e}") from e
        if grid.nx < 1 or grid.ny < 1 or grid.re_max < grid.re_min or grid.im_max < grid.im_min:
            raise MalformedSpec(f"degenerate grid '{text}'")
        return grid

    def points(self) -> np.ndarray:
        re = np.linspace(self.re_min, self.re_max, self.nx)
        im = np.linspace(self.im_min, self.im_max, self.ny)
        return (re[None, :] + 1j * im[:, None]).ravel()

    def to_dict(self) -> Dict[str, Any]:
        return {'re_min': self.re_min, 're_max': self.re_max, 'im_min': self.im_min,
                'im_max': self.im_max, 'nx': self.nx, 'ny': self.ny}


HEATMAP_COLUMNS = ['re_w', 'im_w', 'm_value', 'err_est', 'n_roots', 'method']


def heatmap(sym: Symbol, grid: HeatmapGrid, method: str = 'auto') -> pd.DataFrame:
    """M_phi on a rectangular grid, one row per point"""
    rows = []
    for w in grid.points():
        if not w.real > 0.5:
            rows.append(CountingSample(w, 0.0, 'outside', 0.0, 0.0, 0, 0.0).to_row())
            continue
        if w == sym.a1:
            rows.append(CountingSample(w, float('inf'), 'excluded', 0.0, 0.0, 0, 0.0).to_row())
            continue
        try:
            rows.append(_sample(sym, w, method).to_row())
        except (BoundaryRootHazard, RootFinderFailure) as e:
            logger.error(f"Counting failed at w={w:.6g}: {e}")
            rows.append(CountingSample(w, float('nan'), 'failed', 0.0, 0.0, 0, float('nan')).to_row())
    return pd.DataFrame(rows, columns=HEATMAP_COLUMNS)


class CountingLab:
    """Counting-function workflows for one symbol, with a history of the inequality checks run"""

    METHODS = ('auto', 'exact_disk', 'strip')
    CHECKS = ('littlewood', 'lindelof', 'submean')

    def __init__(self, sym: Symbol, method: str = 'auto'):
        if method not in self.METHODS:
            raise PreconditionError(f"unknown counting method '{method}'")
        self.sym = sym
        self.method = method
        self.check_history: List[InequalityReport] = []

    def ring_points(self, count: int = 8) -> List[complex]:
        """Ring of points around phi(+infinity) inside Re w > 1/2"""
        a1 = self.sym.a1
        radius = 0.5 * max(a1.real - 0.5, 0.1)
        ring = [a1 + radius * np.exp(2j * np.pi * k / count) for k in range(count)]
        return [complex(w) for w in ring if w.real > 0.5]

    def sample(self, w: complex) -> CountingSample:
        return _sample(self.sym, complex(w), self.method)

    def heatmap(self, grid: HeatmapGrid) -> pd.DataFrame:
        return heatmap(self.sym, grid, self.method)

    def run_check(self, name: str, ws: Optional[Sequence[complex]] = None, z0: complex = 1.0) -> InequalityReport:
        """
        Run one inequality of the suite and record it

        Args:
            name: 'littlewood', 'lindelof' or 'submean'
            ws: points to test; defaults to ring_points()
            z0: base point of the Lindelof inequality

        Returns:
            The InequalityReport, also appended to check_history
        """
        if name not in self.CHECKS:
            raise PreconditionError(f"unknown inequality check '{name}'")
        points = list(ws) if ws is not None else self.ring_points()
        if name == 'littlewood':
            report = littlewood_check(self.sym, points, self.method)
        elif name == 'lindelof':
            report = lindelof_check(self.sym, z0, points)
        else:
            d = max(self.sym.a1.real - 0.5, 0.1)
            report = submean_check(self.sym, self.sym.a1 + 0.5 * d, 0.25 * d)
        if not report.passed:
            logger.warning(f"{name} failed for {self.sym.label} at {report.n_violations} of {report.n_checked} points")
        self.check_history.append(report)
        return report

    def summary(self) -> Dict[str, Any]:
        return {
            'symbol': self.sym.label,
            'method': self.method,
            'checks': [r.to_dict() for r in self.check_history],
            'all_passed': all(r.passed for r in self.check_history),
        }
