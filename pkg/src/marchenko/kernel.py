"""Separable expansion of the Marchenko kernel.

The auxiliary transforms

    F_m(z) = (1/2pi) int exp(iqz) Y(q) q^-m dq,   m = 0..2l,

are expanded in unit steps ``H_k`` of width ``h``.  Matching Fourier
coefficients on ``|q| <= pi/h`` and summing the resulting first-difference
system down from ``f_{m,2N+1} = 0`` gives

    f_{m,k} = -(ih/2pi) int_{-pi/h}^{pi/h} G_k(q) Y(q) q^(1-m) dq,
    G_k(q)  = sum_{n=k+1}^{2N+1} exp(iqhn).

The kernel on the shifted triangle basis, ``F(x,y) ~ sum Delta_k(x)
F_kj Delta_j(y)``, then follows from applying the transformation that
turns ``exp(iqz)`` into ``q^l h_l^+(qz)`` in both variables.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .numerics import QuadratureRule, refined_rule, weighted_sum
from .specfun import k_weights, riccati_hankel_plus

SHIFT = 0.25
_I_POW = np.array([1, 1j, -1, -1j])


@dataclass(frozen=True)
class InversionGrid:
    """Step ``h`` and size ``N`` of the expansion; range ``R = N h``."""

    h: float
    N: int

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.N < 1:
            raise ValueError("N must be positive")

    @classmethod
    def from_range(cls, h: float, R: float) -> "InversionGrid":
        return cls(h, int(round(R / h)))

    @property
    def R(self) -> float:
        return self.N * self.h

    @property
    def q_cut(self) -> float:
        """Highest momentum the expansion resolves, ``pi/h``."""
        return np.pi / self.h

    @property
    def x(self) -> np.ndarray:
        """Collocation points ``(p + 1/4) h``, where ``Delta_k(x_p) = delta_kp``."""
        return (np.arange(self.N + 1) + SHIFT) * self.h

    def step_basis(self, n: int, x):
        """``H_n``: indicator of ``[n h, (n+1) h]``."""
        x = np.asarray(x, dtype=float)
        return ((x >= n * self.h) & (x <= (n + 1) * self.h)).astype(float)

    def hat_basis(self, n: int, x):
        """``Delta_n``: unit hat of half-width ``h`` centred at ``(n + 1/4) h``."""
        x = np.asarray(x, dtype=float)
        return np.clip(1.0 - np.abs(x - (n + SHIFT) * self.h) / self.h, 0.0, None)


def default_rule(grid: InversionGrid, anchors=(), nodes_per_panel: int = 8,
                 max_width: float | None = None) -> QuadratureRule:
    """Panel rule on ``[0, pi/h]`` with edges at the data knots.

    Panel width defaults to ``min(pi h / 8, 0.25)``.
    """
    if max_width is None:
        max_width = min(np.pi * grid.h / 8.0, 0.25)
    return refined_rule(0.0, grid.q_cut, max_width, anchors, nodes_per_panel)


def geometric_factor(M: int, q, h: float):
    """``sum_{n=1}^{M} exp(iqhn)``; exact limit ``M`` at ``qh -> 0``."""
    th = np.asarray(q, dtype=float) * h
    half = 0.5 * th
    small = np.abs(1.0 - np.exp(1j * th)) <= 1e-6
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        closed = np.exp(1j * half * (M + 1)) * np.sin(M * half) / np.sin(half)
    if np.any(small):
        n = np.arange(1, M + 1)
        explicit = np.sum(np.exp(1j * np.multiply.outer(th, n)), axis=-1)
        closed = np.where(small, explicit, closed)
    return closed[()] if np.ndim(closed) == 0 else closed


def _fold(I, sign):
    # int_{-a}^{a} g = I + sign * conj(I) when g(-q) = sign * conj(g(q))
    return I + sign * np.conj(I)


def _row_integrals(rows, weights):
    return np.array([weighted_sum(r, weights) for r in rows])


def _map_chunks(fn, n: int, workers: int, chunk: int = 8):
    chunks = [range(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    if workers <= 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)


@dataclass(frozen=True)
class FmTable:
    """``f[m, k]`` for ``m = 0..2l``, ``k = 0..2N+1``.

    With the default seed the last column is the zero seed itself.

    Entries are complex: ``f_m`` is real for even m and imaginary for odd m,
    so ``i^m f_m`` is real; :attr:`imag_residue` measures the deviation.
    """

    f: np.ndarray
    l: int
    grid: InversionGrid
    seed_index: int | None = None

    @property
    def imag_residue(self) -> float:
        phase = _I_POW[np.arange(self.f.shape[0]) % 4]
        g = phase[:, None] * self.f
        scale = np.max(np.abs(g)) if g.size else 0.0
        return float(np.max(np.abs(g.imag)) / scale) if scale > 0 else 0.0


def compute_fm_table(Y, grid: InversionGrid, l: int, rule: QuadratureRule | None = None,
                     fold: bool = True, m_values=None, workers: int = 1,
                     seed_index: int | None = None) -> FmTable:
    """Coefficients ``f_{m,k}`` by quadrature of the summed recursion.

    ``Y`` is a vectorized callable.  With ``fold=True`` only ``q >= 0`` is
    sampled and ``Y(-q) = conj(Y(q))`` is assumed; ``fold=False`` integrates
    the full range ``[-pi/h, pi/h]`` literally.

    The downward recursion starts from ``f_{m,K} = 0`` with ``K = seed_index``
    (default ``2N+1``).  A larger ``K`` only changes where the expansion of
    ``F_m`` is assumed to have died out; the table still covers k = 0..2N+1.
    """
    if rule is None:
        rule = default_rule(grid, getattr(Y, "anchors", ()))
    if not fold:
        rule = rule.mirrored() if rule.a == 0.0 else rule
    q, w = rule.nodes, rule.weights
    if np.any(q == 0):
        raise ValueError("quadrature nodes must avoid q = 0")
    N2 = 2 * grid.N + 1
    K = N2 if seed_index is None else int(seed_index)
    if K < N2:
        raise ValueError(f"seed_index must be at least 2N+1 = {N2}")
    Yq = np.asarray(Y(q), dtype=complex)
    if not np.all(np.isfinite(Yq)):
        raise FloatingPointError("non-finite Y(q) on the quadrature nodes")
    ms = range(2 * l + 1) if m_values is None else m_values
    f = np.zeros((2 * l + 1, N2 + 1), dtype=complex)
    pref = -1j * grid.h / (2.0 * np.pi)
    for m in ms:
        base = Yq * q ** (1 - m)

        def rows(ks, base=base):
            out = np.empty((len(ks), len(q)), dtype=complex)
            for i, k in enumerate(ks):
                out[i] = np.exp(1j * q * (grid.h * k)) * geometric_factor(K - k, q, grid.h) * base
            return _row_integrals(out, w)

        I = _map_chunks(rows, N2 + (K > N2), workers)
        if fold:
            I = _fold(I, (-1) ** (m + 1))
        f[m, : len(I)] = pref * I
    return FmTable(f, l, grid, K)


def combine_fm_to_F(fm: FmTable, grid: InversionGrid | None = None, l: int | None = None,
                    tol: float = 1e-8) -> np.ndarray:
    """Kernel matrix ``F_kj`` (k, j = 0..N) from the f-table.

    Raises when the combined matrix keeps an imaginary part above ``tol``
    relative to its largest entry.
    """
    grid = fm.grid if grid is None else grid
    l = fm.l if l is None else l
    w = k_weights(l)
    x = grid.x
    n = grid.N + 1
    kj = np.add.outer(np.arange(n), np.arange(n))
    # A[n1, k] = w[n1] (-2 x_k)^(n1 - l)
    A = np.array([w[i] * (-2.0 * x) ** float(i - l) for i in range(l + 1)])
    F = np.zeros((n, n), dtype=complex)
    for n1 in range(l + 1):
        for n2 in range(l + 1):
            m = 2 * l - n1 - n2
            F += _I_POW[(n1 + n2) % 4] * np.outer(A[n1], A[n2]) * fm.f[m][kj]
    scale = np.max(np.abs(F.real)) if F.size else 0.0
    resid = np.max(np.abs(F.imag))
    if scale > 0 and resid > tol * scale:
        raise ValueError(f"kernel matrix has imaginary residue {resid / scale:.2e}")
    F = F.real
    return 0.5 * (F + F.T)


def compute_F_direct(Y, grid: InversionGrid, l: int, rule: QuadratureRule | None = None,
                     fold: bool = True, indices=None, return_complex: bool = False):
    """Kernel matrix by direct quadrature with Riccati-Hankel factors.

    Cross-check path.  The Hankel arguments are ``q k h``, so for ``l >= 1``
    rows/columns with index 0 are singular and must be excluded through
    ``indices``.
    """
    if rule is None:
        rule = default_rule(grid, getattr(Y, "anchors", ()))
    if not fold:
        rule = rule.mirrored() if rule.a == 0.0 else rule
    idx = np.arange(grid.N + 1) if indices is None else np.asarray(indices)
    if l >= 1 and np.any(idx == 0):
        raise ValueError("index 0 is singular for l >= 1 on the direct path")
    q, w = rule.nodes, rule.weights
    Yq = np.asarray(Y(q), dtype=complex)
    hk = np.array([riccati_hankel_plus(l, q * k * grid.h) if (k or l == 0)
                   else np.ones_like(q, dtype=complex) for k in idx])
    N2 = 2 * grid.N
    F = np.zeros((len(idx), len(idx)), dtype=complex)
    for a, k in enumerate(idx):
        rows = np.array([hk[a] * geometric_factor(N2 - k - j + 1, q, grid.h) * Yq * hk[b] * q
                         for b, j in enumerate(idx)])
        F[a] = _row_integrals(rows, w)
    if fold:
        F = _fold(F, -1)
    F = -1j * grid.h / (2.0 * np.pi) * F
    return F if return_complex else F.real
