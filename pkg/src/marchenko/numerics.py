"""Shared numeric kernels: panel Gauss-Legendre quadrature, dense solves,
a C1 quadratic interpolating spline and finite differences."""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.interpolate import BSpline, make_interp_spline


class SingularSystemError(np.linalg.LinAlgError):
    pass


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule.

    ``breaks`` are the panel edges (strictly increasing); every panel gets
    ``nodes_per_panel`` nodes.  No node ever sits on a panel edge.
    """

    breaks: np.ndarray
    nodes_per_panel: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def panel_count(self) -> int:
        return len(self.breaks) - 1

    @property
    def a(self) -> float:
        return float(self.breaks[0])

    @property
    def b(self) -> float:
        return float(self.breaks[-1])

    def mirrored(self) -> "QuadratureRule":
        """Rule on ``[-b, b]`` for a rule on ``[0, b]``; nodes symmetric."""
        if self.a != 0.0:
            raise ValueError("mirroring needs a rule starting at 0")
        breaks = np.concatenate([-self.breaks[:0:-1], self.breaks])
        nodes = np.concatenate([-self.nodes[::-1], self.nodes])
        weights = np.concatenate([self.weights[::-1], self.weights])
        return QuadratureRule(breaks, self.nodes_per_panel, nodes, weights)


def make_rule(breaks, nodes_per_panel: int = 8) -> QuadratureRule:
    breaks = np.asarray(breaks, dtype=float)
    if breaks.ndim != 1 or len(breaks) < 2 or np.any(np.diff(breaks) <= 0):
        raise ValueError("panel edges must be strictly increasing")
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    half = 0.5 * np.diff(breaks)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(breaks, nodes_per_panel, nodes, weights)


def panel_rule(a: float, b: float, panel_count: int, nodes_per_panel: int = 8) -> QuadratureRule:
    """Equal-width panels on ``[a, b]``."""
    if panel_count < 1:
        raise ValueError("panel_count must be positive")
    return make_rule(np.linspace(a, b, panel_count + 1), nodes_per_panel)


def refined_rule(a: float, b: float, max_width: float, anchors=(), nodes_per_panel: int = 8) -> QuadratureRule:
    """Panels no wider than ``max_width`` with edges at every anchor in (a, b).

    Anchors are where the integrand has kinks (data knots, tail joins).
    """
    pts = [a, b] + [float(t) for t in anchors if a < t < b]
    pts = np.unique(np.asarray(pts))
    edges = [pts[:1]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = max(1, int(np.ceil((hi - lo) / max_width - 1e-9)))
        edges.append(np.linspace(lo, hi, n + 1)[1:])
    return make_rule(np.concatenate(edges), nodes_per_panel)


def integrate(f, rule: QuadratureRule):
    """Apply ``rule`` to a vectorized integrand ``f``.

    ``f(nodes)`` may return shape ``(n_nodes,)`` or ``(..., n_nodes)``; the
    last axis is contracted.  Non-finite values raise, naming the node.
    """
    vals = np.asarray(f(rule.nodes))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = np.argwhere(bad)[0][-1]
        raise FloatingPointError(f"non-finite integrand at q={rule.nodes[idx]!r}")
    return weighted_sum(vals, rule.weights)


def weighted_sum(vals, weights):
    # fixed panel-major/node-minor order, independent of how callers batch rows
    s = vals * weights
    return np.sum(s, axis=-1)


# ---------------------------------------------------------------------------
# dense linear algebra
# ---------------------------------------------------------------------------

def solve_dense(A, b, pivot_tol: float = 1e-14):
    """Solve ``A x = b`` by LU with partial pivoting.

    Raises :class:`SingularSystemError` when a pivot is smaller than
    ``pivot_tol * max|A|``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"b has length {b.shape[0]}, expected {A.shape[0]}")
    if not np.all(np.isfinite(A)):
        raise ValueError("A has non-finite entries")
    scale = np.max(np.abs(A)) if A.size else 0.0
    with warnings.catch_warnings():
        # singularity is judged from the pivots below and raised as an error
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if scale == 0.0 or pivots.min() < pivot_tol * scale:
        cond = np.inf if pivots.min() == 0 else scale / pivots.min()
        raise SingularSystemError(f"singular matrix (pivot ratio estimate {cond:.3e})")
    return sla.lu_solve((lu, piv), b, check_finite=False)


def solve_batch(As, bs, workers: int = 1, pivot_tol: float = 1e-14):
    """Solve a stack of independent systems ``As[i] x_i = bs[i]``.

    Each system is factorized on its own, so the output does not depend on
    ``workers``.  A singular system is reported with its index.
    """
    As = np.asarray(As, dtype=float)
    bs = np.asarray(bs, dtype=float)

    def one(i):
        try:
            return solve_dense(As[i], bs[i], pivot_tol)
        except SingularSystemError as exc:
            raise SingularSystemError(f"system {i}: {exc}") from exc

    idx = range(len(As))
    if workers <= 1:
        out = [one(i) for i in idx]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(one, idx))
    return np.array(out)


# ---------------------------------------------------------------------------
# quadratic spline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticSpline:
    """C1 piecewise-quadratic interpolant of ``(x, y)``.

    Breakpoints sit midway between samples (plus the two end samples), the
    well-conditioned placement for even degree: a local perturbation decays
    geometrically instead of propagating along the whole table.
    """

    x: np.ndarray
    y: np.ndarray
    bspline: BSpline

    @property
    def breaks(self) -> np.ndarray:
        return np.unique(self.bspline.t)

    def __call__(self, q):
        return spline_eval(self, q)

    def derivative(self, q):
        return self.bspline.derivative()(self._check(q))

    def _check(self, q):
        q = np.asarray(q, dtype=float)
        if np.any(q < self.x[0]) or np.any(q > self.x[-1]):
            raise ValueError(
                f"spline evaluated outside [{self.x[0]}, {self.x[-1]}]")
        return q


def spline_fit(x, y) -> QuadraticSpline:
    """Quadratic interpolating spline through at least 3 samples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3 or len(x) != len(y):
        raise ValueError("need at least 3 samples with matching lengths")
    if np.any(np.diff(x) <= 0):
        raise ValueError("knots must be strictly increasing")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite samples")
    return QuadraticSpline(x, y, make_interp_spline(x, y, k=2))


def spline_eval(s: QuadraticSpline, q):
    val = s.bspline(s._check(q))
    return val[()] if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def central_diff(y, step: float) -> np.ndarray:
    """Second-order derivative on an equispaced grid (one-sided at the ends)."""
    y = np.asarray(y, dtype=float)
    if len(y) < 3:
        raise ValueError("central_diff needs at least 3 samples")
    out = np.empty_like(y)
    out[1:-1] = (y[2:] - y[:-2]) / (2.0 * step)
    out[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * step)
    out[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * step)
    return out
