"""
Quadrature Module for the Dirichlet Composition Lab
Composite Gauss-Legendre rules on panels, polar disks and sigma-sliced strips
"""

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

import config

logger = logging.getLogger(__name__)

SupportFn = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class QuadratureSpec:
    """Base resolution plus a refinement level that doubles every direction"""
    order: int = config.QUAD_ORDER
    panels: int = config.QUAD_PANELS
    theta: int = config.QUAD_THETA
    t_nodes: int = config.QUAD_T_NODES
    grading: float = config.QUAD_GRADING
    level: int = 0

    @property
    def n_panels(self) -> int:
        return self.panels * 2 ** self.level

    @property
    def n_theta(self) -> int:
        return self.theta * 2 ** self.level

    @property
    def n_t(self) -> int:
        return self.t_nodes * 2 ** self.level

    def refined(self, steps: int = 1) -> 'QuadratureSpec':
        return replace(self, level=self.level + steps)

    def to_dict(self):
        return {'order': self.order, 'panels': self.n_panels, 'theta': self.n_theta,
                't_nodes': self.n_t, 'grading': self.grading, 'level': self.level}


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]"""
    x, w = leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_breaks(a: float, b: float, n_panels: int, grading: Optional[float] = None,
                 min_panel: Optional[float] = None) -> np.ndarray:
    """
    Panel endpoints on [a, b]

    With grading q, panels shrink geometrically by q toward a; min_panel
    adds panels until the first one is no wider than min_panel.
    """
    if grading is None:
        return np.linspace(a, b, n_panels + 1)
    count = n_panels
    if min_panel is not None and min_panel > 0 and b - a > min_panel:
        needed = int(np.ceil(np.log((b - a) / min_panel) / np.log(1.0 / grading))) + 1
        count = max(count, needed)
    return a + (b - a) * np.concatenate([[0.0], grading ** np.arange(count - 1, -1, -1)])


def composite_nodes(a: float, b: float, n_panels: int, order: int, grading: Optional[float] = None,
                    min_panel: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b]"""
    breaks = panel_breaks(a, b, n_panels, grading, min_panel)
    x, w = gauss_legendre(order)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = (hi - lo) / 2.0
    nodes = (lo + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def polar_nodes(center: complex, radius: float, spec: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes on the disk |w - center| < radius

    Radial Gauss panels graded toward the center, so the area factor rho
    absorbs logarithmic singularities there; periodic trapezoid in angle.
    """
    rho, w_rho = composite_nodes(0.0, radius, spec.n_panels, spec.order, spec.grading)
    n_theta = spec.n_theta
    theta = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    nodes = center + rho[:, None] * np.exp(1j * theta[None, :])
    weights = (w_rho * rho)[:, None] * np.full(n_theta, 2.0 * np.pi / n_theta)[None, :]
    return nodes.ravel(), weights.ravel()


def sliced_nodes(sigma_lo: float, sigma_hi: float, support: SupportFn, spec: QuadratureSpec,
                 min_panel: Optional[float] = None, t_panels: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes for an integral over {sigma_lo < Re w < sigma_hi, lo(Re w) < Im w < hi(Re w)}

    Sigma panels are graded toward sigma_lo (the boundary line Re w = 1/2
    sits there); each sigma slice carries its own Gauss rule in Im w.
    """
    if sigma_hi <= sigma_lo:
        return np.zeros(0, dtype=complex), np.zeros(0)
    sigma, w_sigma = composite_nodes(sigma_lo, sigma_hi, spec.n_panels, spec.order, spec.grading, min_panel)
    lo, hi = support(sigma)
    keep = np.isfinite(lo) & np.isfinite(hi) & (hi > lo)
    sigma, w_sigma, lo, hi = sigma[keep], w_sigma[keep], lo[keep], hi[keep]
    if sigma.size == 0:
        return np.zeros(0, dtype=complex), np.zeros(0)
    per_panel = max(spec.n_t // t_panels, 2)
    x, w = gauss_legendre(per_panel)
    u = ((np.arange(t_panels)[:, None] + (x[None, :] + 1.0) / 2.0) / t_panels).ravel()
    wu = np.tile(w / (2.0 * t_panels), t_panels)
    width = hi - lo
    t = lo[:, None] + width[:, None] * u[None, :]
    weights = (w_sigma * width)[:, None] * wu[None, :]
    nodes = sigma[:, None] + 1j * t
    return nodes.ravel(), weights.ravel()


def integrate(func: Callable[[np.ndarray], np.ndarray], nodes: np.ndarray, weights: np.ndarray):
    """Apply a node/weight rule to a vectorized integrand"""
    if nodes.size == 0:
        return 0.0
    values = func(nodes)
    total = np.sum(values * weights)
    return complex(total) if np.iscomplexobj(total) else float(total)


def polar_integral(func: Callable[[np.ndarray], np.ndarray], center: complex, radius: float,
                   spec: Optional[QuadratureSpec] = None):
    spec = spec or QuadratureSpec()
    return integrate(func, *polar_nodes(center, radius, spec))


def sliced_integral(func: Callable[[np.ndarray], np.ndarray], sigma_lo: float, sigma_hi: float,
                    support: SupportFn, spec: Optional[QuadratureSpec] = None,
                    min_panel: Optional[float] = None):
    spec = spec or QuadratureSpec()
    return integrate(func, *sliced_nodes(sigma_lo, sigma_hi, support, spec, min_panel))


def relative_change(previous: float, current: float) -> float:
    scale = max(abs(previous), abs(current))
    return 0.0 if scale == 0 else abs(current - previous) / scale
