"""
Criteria Module for the Dirichlet Composition Lab
Schatten-class integral criteria, Carleson measures, embeddings and decay fits
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import config
from backend.counting import counting_function, counting_measure, mean_counting_exact_disk
from backend.dirichlet_algebra import (TruncatedDirichletSeries, bergman_norm_sq, derivative, dm_norm_sq,
                                       evaluate)
from backend.errors import PreconditionError
from backend.quadrature import QuadratureSpec, composite_nodes, relative_change, sliced_integral
from backend.special_functions import partial_zeta, zeta, zeta_deriv2, zeta_deriv2_complex
from backend.symbols import SectorLift, Symbol

logger = logging.getLogger(__name__)

FINITE = 'finite-consistent'
DIVERGENT = 'divergent-consistent'
INCONCLUSIVE = 'inconclusive'


@dataclass
class CriterionReport:
    """Value of a criterion integral with its refinement trace and verdict"""
    name: str
    value: float
    refinement_trace: List[float]
    verdict: str
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.refinement_trace:
            raise PreconditionError(f"criterion '{self.name}' needs a non-empty refinement trace")

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'value': self.value, 'refinement_trace': list(self.refinement_trace),
                'verdict': self.verdict, 'details': self.details}


def verdict_from_trace(trace: Sequence[float]) -> str:
    """
    Three-valued verdict for a refinement trace

    finite-consistent: the last successive relative changes fall below
    FINITE_STEPS; divergent-consistent: the trace never decreases and ends at
    least DIVERGENT_GROWTH times its first entry.
    """
    values = np.asarray(trace, dtype=float)
    if values.size == 0:
        raise PreconditionError("empty refinement trace")
    if np.any(np.isnan(values)):
        return INCONCLUSIVE
    if np.any(np.isinf(values)):
        return DIVERGENT
    if np.all(values == 0):
        return FINITE
    changes = [relative_change(a, b) for a, b in zip(values[:-1], values[1:])]
    steps = list(config.FINITE_STEPS)
    if len(changes) >= len(steps) and all(c <= s for c, s in zip(changes[-len(steps):], steps)):
        return FINITE
    increasing = bool(np.all(np.diff(values) >= 0))
    if increasing and values[0] > 0 and values[-1] >= config.DIVERGENT_GROWTH * values[0]:
        return DIVERGENT
    return INCONCLUSIVE


def _require_g0(sym: Symbol, what: str) -> None:
    if sym.c0 != 0:
        raise PreconditionError(f"{what} needs a c0 = 0 symbol")
    if not sym.validated:
        raise PreconditionError(f"{sym.label} has not been validated")


def _strip_trace(sym: Symbol, integrand: Callable[[np.ndarray], np.ndarray], deltas: Sequence[float],
                 spec: QuadratureSpec) -> List[float]:
    """
    Integral over Re w > 1/2 + delta for each delta of a decreasing ladder

    Each step adds only the new strip 1/2 + delta_k < Re w < 1/2 + delta_{k-1},
    so earlier pieces keep their nodes.
    """
    re_lo, re_hi, _, _ = sym.support_bounds()
    trace: List[float] = []
    total = 0.0
    upper = re_hi
    for delta in deltas:
        lo = max(0.5 + delta, re_lo)
        if upper > lo:
            total += float(np.real(sliced_integral(integrand, lo, upper, sym.cross_section, spec)))
        upper = min(upper, lo)
        trace.append(total)
    return trace


def _deltas(deltas: Optional[Sequence[float]]) -> List[float]:
    values = [float(d) for d in (deltas or config.DELTA_LADDER)]
    if any(d <= 0 for d in values) or any(b >= a for a, b in zip(values, values[1:])):
        raise PreconditionError(f"delta ladder must be positive and decreasing, got {values}")
    return values


def _report(name: str, trace: List[float], **details) -> CriterionReport:
    verdict = verdict_from_trace(trace)
    logger.info(f"{name}: value {trace[-1]:.6g}, verdict {verdict}")
    return CriterionReport(name, float(trace[-1]), trace, verdict, details)


def luecking_zhu(sym: Symbol, p: float, deltas: Optional[Sequence[float]] = None,
                 spec: Optional[QuadratureSpec] = None) -> CriterionReport:
    """int M_phi^p / (Re w - 1/2)^{p+2} dA, refined toward the boundary line"""
    _require_g0(sym, 'luecking_zhu')
    if not p > 0:
        raise PreconditionError(f"luecking_zhu needs p > 0, got {p}")
    func = counting_function(sym)

    def integrand(w):
        return func(w) ** p / (np.real(w) - 0.5) ** (p + 2.0)

    trace = _strip_trace(sym, integrand, _deltas(deltas), spec or QuadratureSpec())
    return _report('luecking_zhu', trace, p=p, symbol=sym.label)


def weighted_carleson_criterion(sym: Symbol, p: float, a: float, deltas: Optional[Sequence[float]] = None,
                                spec: Optional[QuadratureSpec] = None) -> Tuple[CriterionReport, CriterionReport]:
    """
    Necessary and sufficient integrals with weights in |Im w|

    necessary: int M^p / ((Re w - 1/2)^{p+2} (1 + |Im w|)^a) dA
    sufficient: int M^p (1 + |Im w|)^{a(p-1)} / (Re w - 1/2)^{p+2} dA
    """
    _require_g0(sym, 'weighted_carleson_criterion')
    if not (p > 1 and a > 1):
        raise PreconditionError(f"weighted Carleson criterion needs p > 1 and a > 1, got p={p}, a={a}")
    func = counting_function(sym)
    spec = spec or QuadratureSpec()
    ladder = _deltas(deltas)

    def necessary(w):
        return func(w) ** p / ((np.real(w) - 0.5) ** (p + 2.0) * (1.0 + np.abs(np.imag(w))) ** a)

    def sufficient(w):
        return func(w) ** p * (1.0 + np.abs(np.imag(w))) ** (a * (p - 1.0)) / (np.real(w) - 0.5) ** (p + 2.0)

    return (_report('weighted_carleson_necessary', _strip_trace(sym, necessary, ladder, spec), p=p, a=a),
            _report('weighted_carleson_sufficient', _strip_trace(sym, sufficient, ladder, spec), p=p, a=a))


def bergman_criterion(sym: Symbol, p: float, a: float, deltas: Optional[Sequence[float]] = None,
                      spec: Optional[QuadratureSpec] = None) -> CriterionReport:
    """int M_{phi,1+a}^{p/2} / (Re w - 1/2)^{(a+1)p/2 + 2} dA"""
    _require_g0(sym, 'bergman_criterion')
    if p < 4 or a < 0:
        raise PreconditionError(f"bergman_criterion needs p >= 4 and a >= 0, got p={p}, a={a}")
    func = counting_function(sym, a)

    def integrand(w):
        return func(w) ** (p / 2.0) / (np.real(w) - 0.5) ** ((a + 1.0) * p / 2.0 + 2.0)

    trace = _strip_trace(sym, integrand, _deltas(deltas), spec or QuadratureSpec())
    return _report('bergman', trace, p=p, a=a, symbol=sym.label)


def schatten_carleson_probe(sym: Symbol, p: float, a: float, deltas: Optional[Sequence[float]] = None,
                            spec: Optional[QuadratureSpec] = None) -> CriterionReport:
    """int M^p zeta''(2 Re w) (Re w - 1/2)^{-p} dmu with dmu = (Re w - 1/2)(1 + |Im w|)^{-a} dA"""
    _require_g0(sym, 'schatten_carleson_probe')
    if not (p > 1 and a > 1):
        raise PreconditionError(f"probe needs p > 1 and a > 1, got p={p}, a={a}")
    func = counting_function(sym)

    def integrand(w):
        u = np.real(w) - 0.5
        return (func(w) ** p * zeta_deriv2(2.0 * np.real(w)) * u ** (1.0 - p)
                / (1.0 + np.abs(np.imag(w))) ** a)

    trace = _strip_trace(sym, integrand, _deltas(deltas), spec or QuadratureSpec())
    return _report('schatten_carleson', trace, p=p, a=a, symbol=sym.label)


def sector_scaling_probe(alpha: float, p: float, deltas: Sequence[float],
                         sigma_infinity: float = 3.0) -> CriterionReport:
    """
    Closed-form majorant for a sector symbol near its vertex

    int_{1/2+delta}^{sigma_inf} int_{-T}^{T} (1 + |t|)^{2(p-1)} (sigma - 1/2)^{alpha p - p - 2} dt dsigma
    with T the sector height at sigma_inf; finite as delta -> 0 exactly when
    p > 1/(alpha - 1).
    """
    if not alpha > 1 or not p > 0:
        raise PreconditionError(f"need alpha > 1 and p > 0, got alpha={alpha}, p={p}")
    ladder = [float(d) for d in deltas]
    top = sigma_infinity - 0.5
    height = top * np.tan(np.pi / (2.0 * alpha))
    q = 2.0 * p - 1.0
    t_part = 2.0 * np.log1p(height) if q == 0 else 2.0 * ((1.0 + height) ** q - 1.0) / q
    e = alpha * p - p - 1.0

    def radial(delta: float) -> float:
        if e == 0:
            return np.log(top / delta)
        return (top ** e - delta ** e) / e

    trace = [float(t_part * radial(d)) for d in ladder]
    return _report('sector_scaling', trace, alpha=alpha, p=p, threshold=1.0 / (alpha - 1.0))


# Multiple zeta'' integrals

def _masked_trace(nodes: np.ndarray, contributions: np.ndarray, deltas: Sequence[float]) -> List[float]:
    u = np.real(nodes) - 0.5
    return [float(np.sum(contributions[u > d])) for d in deltas]


def multi_integral_s2m(sym: Symbol, m: int, spec: Optional[QuadratureSpec] = None,
                       n_samples: int = config.MC_SAMPLES, n_batches: int = config.MC_BATCHES,
                       seed: int = config.DEFAULT_SEED, n_cutoff: Optional[int] = None,
                       deltas: Optional[Sequence[float]] = None) -> CriterionReport:
    """
    (2/pi)^m times the m-fold zeta''-kernel integral against M_phi

    m = 1 is deterministic quadrature of int zeta''(2 Re w) M dA; m = 2
    importance-samples node pairs of the counting measure with density
    proportional to omega (Re w - 1/2)^{-3/2}. With n_cutoff the kernel is
    the partial sum over n <= n_cutoff, matching finite matrices.
    """
    _require_g0(sym, 'multi_integral_s2m')
    if m not in (1, 2):
        raise PreconditionError(f"multi_integral_s2m supports m in {{1, 2}}, got {m}")
    spec = spec or QuadratureSpec()
    ladder = _deltas(deltas)
    factor = (2.0 / np.pi) ** m

    def kernel(z):
        if n_cutoff is not None:
            return partial_zeta(z, int(n_cutoff), k=2)
        return zeta_deriv2_complex(z)

    measure = counting_measure(sym, spec)
    if measure.nodes.size == 0:
        return CriterionReport('s2m', 0.0, [0.0], FINITE, {'m': m, 'stderr': 0.0})

    if m == 1:
        contributions = factor * np.real(kernel(2.0 * np.real(measure.nodes))) * measure.weights
        coarse = float(np.sum(contributions))
        fine_measure = counting_measure(sym, spec.refined())
        fine_contrib = factor * np.real(kernel(2.0 * np.real(fine_measure.nodes))) * fine_measure.weights
        value = float(np.sum(fine_contrib))
        trace = _masked_trace(fine_measure.nodes, fine_contrib, ladder)
        return CriterionReport('s2m', value, trace, verdict_from_trace(trace),
                               {'m': 1, 'quad_err': abs(value - coarse), 'n_cutoff': n_cutoff})

    nodes, weights = measure.nodes, measure.weights
    density = weights * (np.real(nodes) - 0.5) ** -1.5
    prob = density / density.sum()
    per_batch = max(n_samples // n_batches, 1)
    batch_means = []
    for child in np.random.SeedSequence(seed).spawn(n_batches):
        rng = np.random.default_rng(child)
        i = rng.choice(nodes.size, size=per_batch, p=prob)
        j = rng.choice(nodes.size, size=per_batch, p=prob)
        k = np.abs(kernel(np.conj(nodes[i]) + nodes[j])) ** 2
        batch_means.append(float(np.mean(weights[i] * weights[j] * k / (prob[i] * prob[j]))))
    batch_means = np.asarray(batch_means) * factor
    value = float(batch_means.mean())
    stderr = float(batch_means.std(ddof=1) / np.sqrt(n_batches)) if n_batches > 1 else float('inf')
    trace = [float(batch_means[:max(n_batches * k // 4, 1)].mean()) for k in (1, 2, 4)]
    verdict = FINITE if np.isfinite(value) and stderr <= 0.05 * abs(value) else INCONCLUSIVE
    return CriterionReport('s2m', value, trace, verdict,
                           {'m': 2, 'stderr': stderr, 'n_samples': per_batch * n_batches, 'seed': seed,
                            'n_cutoff': n_cutoff})


# Decay exponents

@dataclass
class DecayFit:
    exponent: float
    r_squared: float
    slopes: List[float]
    rays: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {'exponent': self.exponent, 'r_squared': self.r_squared, 'slopes': self.slopes, 'rays': self.rays}


def sector_decay_fit(sym: Symbol, rays: Optional[Sequence[float]] = None, vertex: complex = 0.5,
                     rho_range: Tuple[float, float] = (1e-4, 10 ** -1.5), n_points: int = 16) -> DecayFit:
    """Least-squares slope of log M_phi against log(Re w - 1/2) along rays into a boundary point"""
    if not sym.is_disk_like:
        raise PreconditionError(f"decay fit uses exact disk counting, got {sym.label}")
    if rays is None:
        half = np.pi / (4.0 * sym.descriptor.alpha) if isinstance(sym.descriptor, SectorLift) else np.pi / 8.0
        rays = (0.0, half, -half)
    rho = np.logspace(np.log10(rho_range[0]), np.log10(rho_range[1]), n_points)
    slopes, r2 = [], []
    for theta in rays:
        w = vertex + rho * np.exp(1j * theta)
        values = np.array([mean_counting_exact_disk(sym, x).value for x in w])
        keep = (values > 0) & (w.real > 0.5)
        if keep.sum() < 3:
            logger.warning(f"Ray at angle {theta:.4f} meets the support in fewer than three points")
            continue
        x = np.log(w.real[keep] - 0.5)
        y = np.log(values[keep])
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        total = np.sum((y - y.mean()) ** 2)
        slopes.append(float(slope))
        r2.append(float(1.0 - np.sum(resid ** 2) / total) if total > 0 else 1.0)
    if not slopes:
        raise PreconditionError(f"no ray from {vertex} enters the support of M_phi")
    return DecayFit(float(np.mean(slopes)), float(min(r2)), slopes, [float(t) for t in rays])


# Carleson measures

@dataclass
class SchurDemo:
    """Schur-test data for the normalized kernel matrix on s_n = 1/2 + 2^{-n} + i(n + 1/2)"""
    points: np.ndarray
    matrix: np.ndarray
    row_sums: np.ndarray
    sup: float
    i0: int
    b: float
    decay_constant: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'n': np.arange(1, self.points.size + 1), 'row_sum': self.row_sums})

    def to_dict(self) -> Dict[str, Any]:
        return {'n_max': int(self.points.size), 'sup_row_sum': self.sup, 'i0': self.i0, 'b': self.b,
                'decay_constant': self.decay_constant, 'row_sums': self.row_sums.tolist()}


def schur_points(n_max: int) -> np.ndarray:
    n = np.arange(1, n_max + 1, dtype=float)
    return 0.5 + 2.0 ** -n + 1j * (n + 0.5)


def carleson_schur_demo(n_max: int) -> SchurDemo:
    """Row sums of A_ij = zeta(s_i + conj(s_j)) / sqrt(zeta(2 Re s_i) zeta(2 Re s_j))"""
    if not 1 <= n_max <= 40:
        raise PreconditionError(f"n_max must lie in 1..40 to stay within double range, got {n_max}")
    s = schur_points(n_max)
    z = np.asarray(zeta(s[:, None] + np.conj(s)[None, :]))
    diag = z.diagonal().real
    denom = np.sqrt(np.outer(diag, diag))
    a = z.real / denom + 1j * (z.imag / denom)
    row_sums = np.abs(a).sum(axis=1)

    ratios = diag[:-1] / diag[1:]
    i0, b = n_max, float('nan')
    below = ratios <= config.SCHUR_RATIO_BOUND
    for i in range(ratios.size):
        if np.all(below[i:]):
            i0, b = i + 1, float(ratios[i:].max())
            break
    decay = float('nan')
    if np.isfinite(b) and n_max > 1:
        gaps = np.abs(np.subtract.outer(np.arange(n_max), np.arange(n_max)))
        off = gaps > 0
        decay = float(np.max(np.abs(a[off]) / b ** (gaps[off] / 2.0)))
    return SchurDemo(s, a, row_sums, float(row_sums.max()), i0, b, decay)


@dataclass
class CarlesonMeasure:
    """Finite measure sum weights_k delta_{points_k} on C_{1/2}"""
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex).ravel()
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.points.shape != self.weights.shape:
            raise PreconditionError("measure points and weights differ in length")
        if np.any(self.points.real <= 0.5):
            raise PreconditionError("measure points must lie in Re w > 1/2")

    @classmethod
    def empty(cls) -> 'CarlesonMeasure':
        return cls(np.zeros(0, dtype=complex), np.zeros(0))

    def mass(self, re_hi: float, t_lo: float, t_hi: float) -> float:
        inside = (self.points.real <= re_hi) & (self.points.imag >= t_lo) & (self.points.imag < t_hi)
        return float(self.weights[inside].sum())


def schur_measure(n_max: int) -> CarlesonMeasure:
    """sum (Re s_n - 1/2) delta_{s_n}"""
    s = schur_points(n_max)
    return CarlesonMeasure(s, s.real - 0.5)


def aligned_boxes(points: np.ndarray) -> List[Tuple[float, float]]:
    """Boxes with side 2(Re s - 1/2) centred on Im s, as (t_lo, side)"""
    points = np.asarray(points, dtype=complex)
    sides = 2.0 * (points.real - 0.5)
    return [(float(p.imag - side / 2.0), float(side)) for p, side in zip(points, sides)]


def density_measure(density: Callable[[np.ndarray], np.ndarray], sigma_width: float, t_lo: float, t_hi: float,
                    cell: float = 1.0 / 16.0, order: int = 4) -> CarlesonMeasure:
    """Gauss point masses for density(w) dA on (1/2, 1/2 + sigma_width) x (t_lo, t_hi), cells of side `cell`"""
    n_sigma = max(int(round(sigma_width / cell)), 1)
    n_t = max(int(round((t_hi - t_lo) / cell)), 1)
    sigma, w_sigma = composite_nodes(0.5, 0.5 + sigma_width, n_sigma, order)
    t, w_t = composite_nodes(t_lo, t_hi, n_t, order)
    nodes = (sigma[:, None] + 1j * t[None, :]).ravel()
    weights = (w_sigma[:, None] * w_t[None, :]).ravel() * np.real(density(nodes))
    return CarlesonMeasure(nodes, weights)


@dataclass
class BoxReport:
    constant: float
    table: pd.DataFrame

    def to_dict(self) -> Dict[str, Any]:
        return {'constant': self.constant, 'n_boxes': int(len(self.table))}


BOX_COLUMNS = ['kind', 're_hi', 'im_lo', 'im_hi', 'side', 'mass', 'ratio']


def carleson_box_constant(measure: CarlesonMeasure, levels: int = config.CARLESON_LEVELS,
                          boxes: Optional[Sequence[Tuple[float, float]]] = None,
                          top_side: Optional[float] = None) -> BoxReport:
    """
    sup mu(Q)/|I| over boxes Q = (1/2, 1/2 + |I|] x I

    The dyadic family has sides top_side / 2^k for k < levels; `boxes`
    adds explicit (t_lo, side) boxes.
    """
    rows = []
    if measure.points.size:
        u = measure.points.real - 0.5
        top = top_side or 2.0 ** np.ceil(np.log2(u.max()))
        t_min, t_max = measure.points.imag.min(), measure.points.imag.max()
        for k in range(levels):
            side = top / 2.0 ** k
            for j in range(int(np.floor(t_min / side)), int(np.ceil(t_max / side)) + 1):
                lo = j * side
                mass = measure.mass(0.5 + side, lo, lo + side)
                if mass > 0:
                    rows.append(('dyadic', 0.5 + side, lo, lo + side, side, mass, mass / side))
        for lo, side in boxes or []:
            mass = measure.mass(0.5 + side, lo, lo + side)
            rows.append(('aligned', 0.5 + side, lo, lo + side, side, mass, mass / side))
    table = pd.DataFrame(rows, columns=BOX_COLUMNS)
    constant = float(table['ratio'].max()) if len(table) else 0.0
    return BoxReport(constant, table)


# Embeddings

def embedding_check(f: TruncatedDirichletSeries, T: float = 100.0,
                    constant: float = config.EMBEDDING_CONSTANT) -> pd.DataFrame:
    """
    Three embedding inequalities for f, each as lhs <= constant * norm^2

    local: mean of |f(1/2 + it)|^2 over |t| < T against ||f||_{H^2}^2
    bergman: mean over |t| < T of int |f_0(sigma + it)|^2 (sigma - 1/2) dsigma against ||f_0||_{-2}^2
    derivative: mean over |t| < T of int_{1/2}^{1} |f'|^2 (sigma - 1/2)^2 dsigma against ||f||_{A_2}^2
    """
    if not T > 0:
        raise PreconditionError(f"T must be positive, got {T}")
    size = f.N
    logn = np.log(np.arange(1, size + 1, dtype=float))
    n_t_panels = max(64, int(np.ceil(2.0 * T * max(logn[-1], 1.0))))
    t, w_t = composite_nodes(-T, T, n_t_panels, 8)
    mean_t = w_t / (2.0 * T)

    line = np.abs(evaluate(f, 0.5 + 1j * t)) ** 2
    local = float(np.sum(line * mean_t))
    h2 = f.h2_norm() ** 2

    f0_coeffs = np.array(f.coeffs)
    f0_coeffs[0] = 0.0
    f0 = TruncatedDirichletSeries(f0_coeffs)
    sigma, w_sigma = composite_nodes(0.5, 40.5, 24, 8, grading=0.5)
    grid = sigma[:, None] + 1j * t[None, :]
    area = np.abs(evaluate(f0, grid)) ** 2 * (sigma[:, None] - 0.5)
    bergman = float(np.sum(area * w_sigma[:, None] * mean_t[None, :]))
    dm2 = dm_norm_sq(f, 2.0)

    deriv = derivative(f)
    sigma_d, w_d = composite_nodes(0.5, 1.0, 8, 8)
    grid_d = sigma_d[:, None] + 1j * t[None, :]
    weighted = np.abs(evaluate(deriv, grid_d)) ** 2 * (sigma_d[:, None] - 0.5) ** 2
    deriv_lhs = float(np.sum(weighted * w_d[:, None] * mean_t[None, :]))
    a2 = bergman_norm_sq(f, 2.0)

    rows = []
    for name, lhs, norm_sq in (('local', local, h2), ('bergman_dm2', bergman, dm2), ('derivative_a2', deriv_lhs, a2)):
        rows.append({'embedding': name, 'lhs': lhs, 'norm_sq': norm_sq,
                     'ratio': lhs / norm_sq if norm_sq > 0 else 0.0,
                     'bound': constant * norm_sq, 'passed': lhs <= constant * norm_sq * (1.0 + 1e-12)})
    return pd.DataFrame(rows)
