"""
Operator Lab Module for the Dirichlet Composition Lab
Truncated composition-operator matrices, singular values, Schatten norms and the Stanton identities
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

import config
from backend.counting import InequalityReport, counting_function, counting_measure
from backend.dirichlet_algebra import TruncatedDirichletSeries, evaluate, exp_series
from backend.errors import PreconditionError
from backend.quadrature import QuadratureSpec, relative_change
from backend.special_functions import partial_zeta
from backend.symbols import SectorLift, Symbol

logger = logging.getLogger(__name__)


@dataclass
class OperatorMatrix:
    """
    Truncated operator in the n^{-s} basis

    `entries` holds rows 1..entries.shape[0]; rows up to n_trunc beyond
    that are identically zero.
    """
    entries: np.ndarray
    basis_space: str
    basis_indices: np.ndarray
    n_trunc: int
    tail_hint: float = 0.0
    label: str = ''

    def __post_init__(self):
        if self.basis_space not in ('H2', 'Dm2'):
            raise PreconditionError(f"unknown basis space '{self.basis_space}'")
        if not np.all(np.isfinite(self.entries)):
            raise PreconditionError("operator matrix has non-finite entries")

    @property
    def n_basis(self) -> int:
        return int(self.entries.shape[1])

    def dense(self) -> np.ndarray:
        """Entries padded with zero rows up to n_trunc"""
        rows = self.n_trunc if self.basis_space == 'H2' else self.entries.shape[0]
        out = np.zeros((rows, self.n_basis), dtype=complex)
        out[:self.entries.shape[0]] = self.entries
        return out

    def apply(self, f: TruncatedDirichletSeries) -> TruncatedDirichletSeries:
        """Image of f; f must be supported within the basis"""
        support = f.support()
        if support.size and support.max() > self.n_basis:
            raise PreconditionError(f"f has coefficients beyond the basis size {self.n_basis}")
        x = f.resized(self.n_basis).coeffs
        return TruncatedDirichletSeries(self.dense() @ x)


def _column(phi0: TruncatedDirichletSeries, a1: complex, m: int, c0: int, n_trunc: int):
    """Coefficients of m^{-c0 s} m^{-phi(s)} and the squared mass pushed past n_trunc"""
    if m == 1:
        col = np.zeros(n_trunc, dtype=complex)
        col[0] = 1.0
        return col, 0.0
    scale = np.exp(-a1 * np.log(m))
    if np.any(phi0.coeffs):
        base = scale * exp_series(-np.log(m) * phi0).coeffs
    else:
        base = np.zeros(n_trunc, dtype=complex)
        base[0] = scale
    if c0 == 0:
        return base, 0.0
    step = m ** c0
    keep = n_trunc // step
    col = np.zeros(n_trunc, dtype=complex)
    if keep:
        col[step - 1::step][:keep] = base[:keep]
    dropped = float(np.sum(np.abs(base[keep:]) ** 2))
    return col, dropped


def build_matrix(sym: Symbol, n_basis: Optional[int] = None, n_trunc: Optional[int] = None) -> OperatorMatrix:
    """
    Matrix of C_psi with columns psi-images of m^{-s}, m = 1..n_basis

    Column m is m^{-c0 s} m^{-a_1} exp(-log m (phi - a_1)), with output
    rows truncated at n_trunc.
    """
    n_basis = int(n_basis or config.N_BASIS_DEFAULT)
    n_trunc = int(n_trunc or config.N_TRUNC_DEFAULT)
    if n_basis < 1 or n_trunc < n_basis:
        raise PreconditionError(f"need 1 <= n_basis <= n_trunc, got {n_basis}, {n_trunc}")
    if not sym.validated:
        raise PreconditionError(f"{sym.label} has not been validated")
    phi = sym.series(n_trunc)
    a1 = phi.constant_term
    coeffs = np.array(phi.coeffs)
    coeffs[0] = 0.0
    phi0 = TruncatedDirichletSeries(coeffs)

    kept: List[np.ndarray] = []
    last = 1
    total = dropped = upper = 0.0
    half = n_trunc // 2
    for m in range(1, n_basis + 1):
        col, lost = _column(phi0, a1, m, sym.c0, n_trunc)
        nz = np.flatnonzero(col)
        col = col[:int(nz[-1]) + 1].copy() if nz.size else col[:1].copy()
        kept.append(col)
        last = max(last, col.size)
        mass = np.abs(col) ** 2
        total += float(np.sum(mass))
        upper += float(np.sum(mass[half:]))
        dropped += lost
    total += dropped
    tail_hint = (dropped + upper) / total if total > 0 else 0.0
    if dropped > 0:
        logger.warning(f"{sym.label}: {dropped:.3g} of column mass fell beyond N_trunc={n_trunc}")

    entries = np.zeros((last, n_basis), dtype=complex)
    for j, col in enumerate(kept):
        entries[:col.size, j] = col
    return OperatorMatrix(entries, 'H2', np.arange(1, n_basis + 1), n_trunc, tail_hint, sym.label)


# Singular values

def _jacobi_eigenvalues(gram: np.ndarray, tol: float, max_sweeps: int) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic two-sided Jacobi rotations"""
    a = np.array(gram, dtype=complex)
    size = a.shape[0]
    scale = np.linalg.norm(a)
    if size == 1 or scale == 0:
        return np.real(np.diag(a)).copy()
    for sweep in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                c = a[p, q]
                mag = abs(c)
                if mag <= 1e-300:
                    continue
                phase = c / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                cs = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * cs
                u = np.array([[cs, sn], [-sn * np.conj(phase), cs * np.conj(phase)]])
                a[:, [p, q]] = a[:, [p, q]] @ u
                a[[p, q], :] = u.conj().T @ a[[p, q], :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        logger.warning(f"Jacobi stopped after {max_sweeps} sweeps on a {size}x{size} Gram matrix")
    return np.real(np.diag(a)).copy()


@dataclass
class SchattenReport:
    """Singular values and Schatten norms of a truncated operator"""
    svals: np.ndarray
    p_norms: Dict[float, float]
    n_basis: int
    n_trunc: int
    tail_hint: float = 0.0
    params: Dict[str, Any] = field(default_factory=dict)

    def s_p_norm(self, p: float) -> float:
        return float(np.sum(self.svals ** p) ** (1.0 / p))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'svals': [float(s) for s in self.svals],
            'p_norms': {f"{p:g}": float(v) for p, v in self.p_norms.items()},
            'params': {'n_basis': self.n_basis, 'n_trunc': self.n_trunc, 'tail_hint': self.tail_hint,
                       **self.params},
        }


def singular_values(matrix: OperatorMatrix, p_set: Optional[Sequence[float]] = None,
                    method: str = 'jacobi') -> SchattenReport:
    """
    Singular values through the smaller Gram matrix of the nonzero block

    method='jacobi' runs cyclic Jacobi rotations; method='eigh' defers to
    LAPACK and serves as a cross-check.
    """
    p_set = list(p_set or config.SCHATTEN_P_DEFAULT)
    if any(p <= 0 for p in p_set):
        raise PreconditionError(f"Schatten exponents must be positive, got {p_set}")
    entries = matrix.entries
    rows = np.any(entries != 0, axis=1)
    cols = np.any(entries != 0, axis=0)
    block = entries[rows][:, cols]
    n_rows = matrix.n_trunc if matrix.basis_space == 'H2' else entries.shape[0]
    n_values = min(n_rows, matrix.n_basis)
    if block.size == 0:
        eig = np.zeros(0)
    else:
        gram = block.conj().T @ block if block.shape[1] <= block.shape[0] else block @ block.conj().T
        gram = 0.5 * (gram + gram.conj().T)
        if method == 'jacobi':
            eig = _jacobi_eigenvalues(gram, config.JACOBI_TOL, config.JACOBI_MAX_SWEEPS)
        elif method == 'eigh':
            eig = np.linalg.eigvalsh(gram)
        else:
            raise PreconditionError(f"unknown singular value method '{method}'")
    svals = np.sort(np.sqrt(np.clip(eig, 0.0, None)))[::-1]
    svals = np.concatenate([svals, np.zeros(max(n_values - svals.size, 0))])
    p_norms = {float(p): float(np.sum(svals ** p) ** (1.0 / p)) for p in sorted(p_set)}
    return SchattenReport(svals, p_norms, matrix.n_basis, matrix.n_trunc, matrix.tail_hint,
                          {'method': method, 'basis_space': matrix.basis_space, 'label': matrix.label})


# Stanton-type identities

@dataclass
class IdentityCheck:
    """Both sides of a norm identity, with quadrature diagnostics"""
    name: str
    lhs: complex
    rhs: complex
    quad_err: float
    converged: bool = True
    gap_trace: List[float] = field(default_factory=list)

    @property
    def gap(self) -> float:
        scale = max(abs(self.lhs), 1e-300)
        return float(abs(self.lhs - self.rhs) / scale)

    def passed(self, tol: float) -> bool:
        return self.converged and self.gap <= tol

    def to_dict(self) -> Dict[str, Any]:
        def num(z):
            z = complex(z)
            return z.real if z.imag == 0 else [z.real, z.imag]
        return {'name': self.name, 'lhs': num(self.lhs), 'rhs': num(self.rhs), 'gap': self.gap,
                'quad_err': self.quad_err, 'converged': self.converged, 'gap_trace': self.gap_trace}


def _require_g0(sym: Symbol, what: str) -> None:
    if sym.c0 != 0:
        raise PreconditionError(f"{what} needs a c0 = 0 symbol")


def _measure_symbol(sym: Symbol) -> Symbol:
    """The symbol whose counting measure matches build_matrix(sym)"""
    return sym.truncated_lift() if isinstance(sym.descriptor, SectorLift) else sym


def _refined_pair(sym: Symbol, spec: QuadratureSpec, integrand, scale: float = 2.0 / np.pi):
    """Counting-measure integral at spec and one refinement, with the change as error"""
    sym = _measure_symbol(sym)
    coarse = scale * counting_measure(sym, spec).integrate(integrand)
    fine = scale * counting_measure(sym, spec.refined()).integrate(integrand)
    return fine, abs(fine - coarse)


def stanton_check(sym: Symbol, f: TruncatedDirichletSeries, spec: Optional[QuadratureSpec] = None,
                  n_trunc: Optional[int] = None) -> IdentityCheck:
    """||C_phi f||^2 against |f(phi(+inf))|^2 + (2/pi) int |f'|^2 M_phi dA"""
    _require_g0(sym, 'stanton_check')
    spec = spec or QuadratureSpec()
    support = f.support()
    n_basis = int(support.max()) if support.size else 1
    matrix = build_matrix(sym, n_basis, max(n_trunc or config.N_TRUNC_DEFAULT, n_basis))
    lhs = float(np.sum(np.abs(matrix.apply(f).coeffs) ** 2))
    fp = f.resized(n_basis)
    logn = np.log(np.arange(1, n_basis + 1, dtype=float))
    coeffs = -fp.coeffs * logn

    def integrand(w):
        return np.abs(np.exp(-np.outer(w, logn)) @ coeffs) ** 2

    area, err = _refined_pair(sym, spec, integrand)
    rhs = abs(complex(evaluate(f, sym.a1))) ** 2 + area
    converged = err <= config.QUAD_REL_TOL * max(abs(rhs), 1e-300)
    if not converged:
        logger.warning(f"Stanton quadrature for {sym.label} moved {err:.3g} under refinement")
    return IdentityCheck('stanton', lhs, rhs, float(err), converged)


def polarization_check(sym: Symbol, f: TruncatedDirichletSeries, g: TruncatedDirichletSeries,
                       spec: Optional[QuadratureSpec] = None,
                       n_trunc: Optional[int] = None) -> IdentityCheck:
    """<C_phi f, C_phi g> against f(a_1) conj(g(a_1)) + (2/pi) int f' conj(g') M_phi dA"""
    _require_g0(sym, 'polarization_check')
    spec = spec or QuadratureSpec()
    n_basis = max(int(f.support().max()) if f.support().size else 1,
                  int(g.support().max()) if g.support().size else 1)
    matrix = build_matrix(sym, n_basis, max(n_trunc or config.N_TRUNC_DEFAULT, n_basis))
    cf = matrix.apply(f).coeffs
    cg = matrix.apply(g).coeffs
    lhs = complex(np.sum(cf * np.conj(cg)))
    logn = np.log(np.arange(1, n_basis + 1, dtype=float))
    df = -f.resized(n_basis).coeffs * logn
    dg = -g.resized(n_basis).coeffs * logn

    def integrand(w):
        basis = np.exp(-np.outer(w, logn))
        return (basis @ df) * np.conj(basis @ dg)

    area, err = _refined_pair(sym, spec, integrand)
    rhs = complex(evaluate(f, sym.a1)) * np.conj(complex(evaluate(g, sym.a1))) + area
    converged = err <= config.QUAD_REL_TOL * max(abs(rhs), 1e-300)
    return IdentityCheck('polarization', lhs, complex(rhs), float(err), converged)


def hs_integral(sym: Symbol, n_cutoff: int, spec: Optional[QuadratureSpec] = None) -> float:
    """(2/pi) int zeta''_{<= n_cutoff}(2 Re w) M_phi(w) dA(w)"""
    spec = spec or QuadratureSpec()

    def integrand(w):
        return np.real(partial_zeta(2.0 * np.real(w), n_cutoff, k=2))

    return float(2.0 / np.pi * counting_measure(_measure_symbol(sym), spec).integrate(integrand))


def hs_identity_check(sym: Symbol, n_basis: Optional[int] = None, n_trunc: Optional[int] = None,
                      spec: Optional[QuadratureSpec] = None, levels: int = 3) -> IdentityCheck:
    """
    Hilbert-Schmidt identity at finite truncation

    lhs is the squared Frobenius norm of the first n_basis columns; rhs uses
    partial sums of zeta and zeta'' matched to n_basis. The gap is traced over
    `levels` quadrature refinements.
    """
    _require_g0(sym, 'hs_identity_check')
    n_basis = int(n_basis or config.N_BASIS_DEFAULT)
    spec = spec or QuadratureSpec()
    matrix = build_matrix(sym, n_basis, n_trunc)
    lhs = float(np.sum(np.abs(matrix.entries) ** 2))
    point = float(np.real(partial_zeta(2.0 * sym.a1.real, n_basis)))
    values = [point + hs_integral(sym, n_basis, spec.refined(level)) for level in range(levels)]
    gaps = [abs(lhs - v) / max(lhs, 1e-300) for v in values]
    err = abs(values[-1] - values[-2]) if len(values) > 1 else 0.0
    converged = err <= config.QUAD_REL_TOL * max(abs(values[-1]), 1e-300)
    return IdentityCheck('hilbert_schmidt', lhs, values[-1], float(err), converged, gaps)


# Toeplitz operator on (D_-2)_0

def _dm2_basis(n_basis: int, nodes: np.ndarray) -> np.ndarray:
    """Rows f_n(w) = log n n^{-w} for n = 2..n_basis"""
    logn = np.log(np.arange(2, n_basis + 1, dtype=float))
    return logn[:, None] * np.exp(-np.outer(logn, nodes))


def toeplitz_matrix(sym: Symbol, n_basis: Optional[int] = None,
                    spec: Optional[QuadratureSpec] = None) -> OperatorMatrix:
    """Entries <T_phi f_m, f_n> = int f_m conj(f_n) M_phi dA in the orthonormal basis of (D_-2)_0"""
    _require_g0(sym, 'toeplitz_matrix')
    n_basis = int(n_basis or config.N_BASIS_DEFAULT)
    if n_basis < 2:
        raise PreconditionError("the (D_-2)_0 basis starts at n = 2")
    measure = counting_measure(_measure_symbol(sym), spec or QuadratureSpec())
    if measure.nodes.size == 0:
        entries = np.zeros((n_basis - 1, n_basis - 1), dtype=complex)
    else:
        a = _dm2_basis(n_basis, measure.nodes)
        entries = (np.conj(a) * measure.weights[None, :]) @ a.T
        entries = 0.5 * (entries + entries.conj().T)
    return OperatorMatrix(entries, 'Dm2', np.arange(2, n_basis + 1), n_basis, 0.0, sym.label)


@dataclass
class ToeplitzCrosscheck:
    """Eigenvalues of T_phi against the compressed Gram matrix of C_phi"""
    toeplitz_eigs: np.ndarray
    gram_eigs: np.ndarray
    max_rel_gap: float
    trace_gap: float

    def to_dict(self) -> Dict[str, Any]:
        return {'toeplitz_eigs': self.toeplitz_eigs.tolist(), 'gram_eigs': self.gram_eigs.tolist(),
                'max_rel_gap': self.max_rel_gap, 'trace_gap': self.trace_gap}


def toeplitz_crosscheck(sym: Symbol, n_basis: int = 48, n_trunc: Optional[int] = None,
                        spec: Optional[QuadratureSpec] = None, rel_floor: float = 1e-6) -> ToeplitzCrosscheck:
    """
    Compare T_phi with (pi/2)(G - conj(v) v^T)

    G is the Gram matrix of columns 2..n_basis of C_phi and v_m = m^{-a_1};
    differentiation is an isometry from H^2_0 onto (D_-2)_0, so both sides
    should agree up to quadrature error.
    """
    toeplitz = toeplitz_matrix(sym, n_basis, spec).entries
    cols = build_matrix(sym, n_basis, n_trunc).entries[:, 1:]
    gram = cols.conj().T @ cols
    m = np.arange(2, n_basis + 1, dtype=float)
    v = np.exp(-sym.a1 * np.log(m))
    reduced = np.pi / 2.0 * (gram - np.outer(np.conj(v), v))
    reduced = 0.5 * (reduced + reduced.conj().T)
    t_eigs = np.sort(np.linalg.eigvalsh(toeplitz))[::-1]
    g_eigs = np.sort(np.linalg.eigvalsh(reduced))[::-1]
    top = max(abs(t_eigs[0]), abs(g_eigs[0]), 1e-300)
    keep = np.maximum(np.abs(t_eigs), np.abs(g_eigs)) > rel_floor * top
    rel = np.abs(t_eigs[keep] - g_eigs[keep]) / np.maximum(np.abs(g_eigs[keep]), 1e-300)
    trace_gap = relative_change(float(np.trace(reduced).real), float(np.trace(toeplitz).real))
    return ToeplitzCrosscheck(t_eigs, g_eigs, float(rel.max()) if rel.size else 0.0, trace_gap)


def frobenius_norm_sq(matrix: OperatorMatrix) -> float:
    """Sum of squared moduli of the entries, the truncated Hilbert-Schmidt norm squared"""
    return float(np.sum(np.abs(matrix.entries) ** 2))


def holder_check(matrix: OperatorMatrix, p_values: Sequence[float] = (2, 3), n_vectors: int = 100,
                 seed: int = config.DEFAULT_SEED) -> InequalityReport:
    """<T^p x, x> >= <T x, x>^p for random unit x and a positive matrix T"""
    t = 0.5 * (matrix.entries + matrix.entries.conj().T)
    eig, vec = np.linalg.eigh(t)
    eig = np.clip(eig, 0.0, None)
    rng = np.random.default_rng(seed)
    rows, worst, bad = [], -np.inf, 0
    for p in p_values:
        tp = (vec * eig ** p) @ vec.conj().T
        for _ in range(n_vectors):
            x = rng.standard_normal(t.shape[0]) + 1j * rng.standard_normal(t.shape[0])
            x /= np.linalg.norm(x)
            lhs = float(np.real(np.vdot(x, tp @ x)))
            rhs = float(np.real(np.vdot(x, t @ x))) ** p
            excess = rhs - lhs - 1e-12 * max(abs(lhs), 1e-300)
            bad += int(excess > 0)
            worst = max(worst, rhs - lhs)
            rows.append({'p': p, 'lhs': lhs, 'rhs': rhs, 'violated': excess > 0})
    return InequalityReport('holder', len(rows), bad, float(worst), rows)


# Compactness

@dataclass
class CompactnessReport:
    deltas: List[float]
    ratios: List[float]
    slope: float
    verdict: str

    def to_dict(self) -> Dict[str, Any]:
        return {'deltas': self.deltas, 'ratios': self.ratios, 'slope': self.slope, 'verdict': self.verdict}


def _boundary_ratio(sym: Symbol, func, delta: float, n_u: int, n_t: int, a: float = 0.0) -> float:
    """Grid sup of M_{phi,1+a}(w)/(Re w - 1/2)^{1+a} over 1/2 < Re w < 1/2 + delta"""
    u = np.logspace(np.log10(delta) - 4.0, np.log10(delta), n_u)
    lo, hi = sym.cross_section(0.5 + u)
    ok = np.isfinite(lo) & np.isfinite(hi)
    if not np.any(ok):
        return 0.0
    frac = np.linspace(0.0, 1.0, n_t)
    t = lo[ok, None] + (hi[ok] - lo[ok])[:, None] * frac[None, :]
    w = (0.5 + u[ok])[:, None] + 1j * t
    values = func(w)
    return float(np.max(values / u[ok][:, None] ** (1.0 + a)))


def compactness_indicator(sym: Symbol, deltas: Optional[Sequence[float]] = None, a: float = 0.0,
                          n_u: int = 64, n_t: int = 201) -> CompactnessReport:
    """
    Ladder of sup M_phi(w)/(Re w - 1/2) over shrinking boundary strips

    With a > 0 the weighted ratio M_{phi,1+a}/(Re w - 1/2)^{1+a} is used,
    the compactness test on the weighted Bergman scale.

    compact-consistent when the ladder is non-increasing and ends below
    COMPACT_THRESHOLD; non-compact-consistent when it levels off above
    NONCOMPACT_STABILITY.
    """
    _require_g0(sym, 'compactness_indicator')
    deltas = [float(d) for d in (deltas or config.COMPACT_DELTAS)]
    func = counting_function(sym, a)
    ratios = [_boundary_ratio(sym, func, d, n_u, n_t, a) for d in deltas]
    positive = [(d, r) for d, r in zip(deltas, ratios) if r > 0]
    slope = float('nan')
    if len(positive) >= 2:
        slope = float(np.polyfit(np.log([d for d, _ in positive]), np.log([r for _, r in positive]), 1)[0])
    last = ratios[-1]
    non_increasing = all(b <= a_ * (1.0 + 1e-9) + 1e-300 for a_, b in zip(ratios, ratios[1:]))
    if non_increasing and last < config.COMPACT_THRESHOLD:
        verdict = 'compact-consistent'
    elif last > config.NONCOMPACT_STABILITY and len(ratios) > 1 and relative_change(ratios[-2], last) <= 0.1:
        verdict = 'non-compact-consistent'
    else:
        verdict = 'inconclusive'
    logger.info(f"Compactness ladder for {sym.label}: {verdict} (last ratio {last:.4g})")
    return CompactnessReport(deltas, ratios, slope, verdict)
