"""Collocated Marchenko systems and potential reconstruction.

With ``L(x, y) ~ sum_j P_j(x) Delta_j(y)`` and the separable kernel, the
Marchenko equation at each collocation point ``x_p`` becomes a dense
``(N+1) x (N+1)`` system for ``P_{p,m} = P_m(x_p)``.  The potential is
``V = -2 dL(r, r)/dr`` with ``L(x_p, x_p) = P_{p,p}``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .forward import MEV_FM2
from .kernel import InversionGrid, FmTable, combine_fm_to_F, compute_fm_table, default_rule
from .numerics import QuadratureRule, central_diff, solve_batch
from .scattering import ScatteringInput, SpectralFunction, TailModel

log = logging.getLogger(__name__)

POTENTIAL_HEADER = "r_fm,V_fm2,V_MeV"


def zeta(n: int, m: int, p: int, h: float) -> float:
    """Overlap ``int_{x_p}^inf Delta_m(t) Delta_n(t) dt`` in closed form."""
    d = lambda a, b: 1.0 if a == b else 0.0  # noqa: E731
    return h / 6.0 * (2.0 * d(n, m) * (d(n, p) + 2.0 * (n >= p + 1))
                      + d(n, m - 1) * (n >= p) + d(n, m + 1) * (m >= p))


def zeta_bands(N: int, p: int, h: float) -> np.ndarray:
    """Nonzero overlaps for fixed ``p`` as ``Z[s, m] = zeta(m+s-1, m, p)``, s = 0, 1, 2."""
    m = np.arange(N + 1)
    diag = np.where(m > p, 2 * h / 3, np.where(m == p, h / 3, 0.0))
    # n = m - 1 needs n >= p; n = m + 1 needs m >= p
    lower = np.where((m - 1 >= p) & (m >= 1), h / 6, 0.0)
    upper = np.where((m >= p) & (m + 1 <= N), h / 6, 0.0)
    return np.array([lower, diag, upper])


@dataclass(frozen=True)
class TranslationSolution:
    """``P[p, k] = P_k(x_p)``; the diagonal approximates ``L(x_p, x_p)``."""

    P: np.ndarray

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.P).copy()


@dataclass(frozen=True)
class PotentialCurve:
    r: np.ndarray
    V: np.ndarray
    header: tuple = field(default=(), compare=False)

    @property
    def V_MeV(self) -> np.ndarray:
        return self.V * MEV_FM2

    def save(self, path) -> None:
        lines = [f"# {h}" for h in self.header] + [POTENTIAL_HEADER]
        lines += [f"{r!r},{v!r},{e!r}" for r, v, e in
                  zip(self.r.tolist(), self.V.tolist(), self.V_MeV.tolist())]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "PotentialCurve":
        rows = [ln for ln in Path(path).read_text().splitlines()
                if ln.strip() and not ln.startswith("#") and ln.strip() != POTENTIAL_HEADER]
        data = np.array([[float(t) for t in ln.split(",")[:2]] for ln in rows])
        return cls(data[:, 0], data[:, 1])


def system_matrices(F: np.ndarray, grid: InversionGrid):
    """Matrices ``A[p]`` and right-hand sides ``b[p]`` of the collocated systems.

    ``A[p][j, m] = delta_jm + sum_n zeta(n, m, p) F[n, j]``, ``b[p][j] = -F[p, j]``.
    """
    N, h = grid.N, grid.h
    n1 = N + 1
    F = np.asarray(F, dtype=float)
    # shifted copies Fs[s][m, j] = F[m + s - 1, j] (zero outside range)
    Fm1 = np.zeros_like(F)
    Fm1[1:] = F[:-1]
    Fp1 = np.zeros_like(F)
    Fp1[:-1] = F[1:]
    A = np.empty((n1, n1, n1))
    eye = np.eye(n1)
    for p in range(n1):
        Z = zeta_bands(N, p, h)
        # column m of A: sum over n in {m-1, m, m+1} of zeta * F[n, :]
        cols = Z[0][:, None] * Fm1 + Z[1][:, None] * F + Z[2][:, None] * Fp1
        A[p] = eye + cols.T
    b = -F.copy()
    return A, b


def solve_translation(F: np.ndarray, grid: InversionGrid, workers: int = 1) -> TranslationSolution:
    """Solve the ``N+1`` independent collocated systems."""
    F = np.asarray(F, dtype=float)
    if F.shape != (grid.N + 1, grid.N + 1) or not np.all(np.isfinite(F)):
        raise ValueError("kernel matrix must be finite with shape (N+1, N+1)")
    A, b = system_matrices(F, grid)
    P = solve_batch(A, b, workers=workers)
    return TranslationSolution(P)


def reconstruct_potential(sol: TranslationSolution, grid: InversionGrid, header=()) -> PotentialCurve:
    """``V(x_p) = -2 dD/dx`` by second-order finite differences."""
    V = -2.0 * central_diff(sol.D, grid.h)
    return PotentialCurve(grid.x, V, tuple(header))


@dataclass(frozen=True)
class InversionResult:
    curve: PotentialCurve
    fm: FmTable
    F: np.ndarray
    solution: TranslationSolution


def invert(data: ScatteringInput, tail: TailModel | None = None,
           grid: InversionGrid | None = None, rule: QuadratureRule | None = None,
           workers: int = 1, full: bool = False, seed_index: int | None = None):
    """Reconstruct V(r) from phase shifts (and bound states) of one partial wave.

    Returns a :class:`PotentialCurve`, or an :class:`InversionResult` with the
    intermediate tables when ``full`` is set.
    """
    grid = InversionGrid(0.04, 100) if grid is None else grid
    Y = SpectralFunction(data, tail)
    if rule is None:
        rule = default_rule(grid, Y.anchors)
    log.debug("inverting l=%d with h=%g N=%d on %d nodes", data.l, grid.h, grid.N, len(rule.nodes))
    fm = compute_fm_table(Y, grid, data.l, rule, workers=workers, seed_index=seed_index)
    F = combine_fm_to_F(fm, grid, data.l)
    sol = solve_translation(F, grid, workers=workers)
    curve = reconstruct_potential(sol, grid)
    if full:
        return InversionResult(curve, fm, F, sol)
    return curve
