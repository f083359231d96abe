"""Scattering data: validation, CSV I/O, interpolation/extension of the
phase shift, and the spectral function

    Y(q) = 1 - S(q) - i sum_j M_j^2 / (q - i kappa_j),   S = exp(2 i delta).

The phase shift (not S) is interpolated, so |S| = 1 holds exactly.
Below the first sample ``delta - n_b pi`` follows the threshold law
``q^(2l+1)``; above the last sample ``delta = -alpha/q`` with ``alpha``
fixed by continuity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .forward import BoundState
from .numerics import QuadraticSpline, spline_fit

CSV_HEADER = "q,delta_rad"


@dataclass(frozen=True, eq=False)
class ScatteringInput:
    """Phase shifts of one partial wave plus the bound-state list.

    Equality is exact (bitwise on the arrays); ``comments`` are ignored.
    """

    l: int
    q: np.ndarray
    delta: np.ndarray
    bound_states: tuple = ()
    comments: tuple = field(default=(), compare=False)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        d = np.asarray(self.delta, dtype=float)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "bound_states", tuple(self.bound_states))
        if self.l < 0:
            raise ValueError("l must be non-negative")
        if q.ndim != 1 or q.shape != d.shape:
            raise ValueError("q and delta must be 1-D arrays of equal length")
        if len(q) == 0:
            raise ValueError("no samples")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(d))):
            raise ValueError("NaN or infinite entries in scattering table")
        if q[0] <= 0:
            raise ValueError("momenta must be positive")
        if np.any(np.diff(q) <= 0):
            raise ValueError("momenta must be strictly increasing")
        for b in self.bound_states:
            if b.kappa <= 1e-12:
                raise ValueError("bound-state kappa too close to the real axis")

    def __eq__(self, other):
        if not isinstance(other, ScatteringInput):
            return NotImplemented
        return (self.l == other.l and self.bound_states == other.bound_states
                and np.array_equal(self.q, other.q) and np.array_equal(self.delta, other.delta))

    __hash__ = None

    @property
    def q_max(self) -> float:
        return float(self.q[-1])

    @property
    def S(self) -> np.ndarray:
        return np.exp(2j * self.delta)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def save_table(data: ScatteringInput, path, header_lines=()) -> None:
    """Write ``q,delta_rad`` rows; bound states go to ``# bound kappa M`` lines."""
    lines = [f"# {h}" for h in header_lines]
    lines.append(f"# l {data.l}")
    for b in data.bound_states:
        lines.append(f"# bound {b.kappa!r} {b.M!r}")
    lines.append(CSV_HEADER)
    lines += [f"{q!r},{d!r}" for q, d in zip(data.q.tolist(), data.delta.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def load_table(path, l: int | None = None) -> ScatteringInput:
    """Read a table written by :func:`save_table` (or any compatible CSV).

    ``l`` overrides the ``# l`` comment; without either, l = 0.
    """
    q, d, bound, comments = [], [], [], []
    file_l = None
    header_seen = False
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tok = line[1:].split()
            if tok[:1] == ["bound"] and len(tok) == 3:
                bound.append(BoundState(float(tok[1]), float(tok[2])))
            elif tok[:1] == ["l"] and len(tok) == 2:
                file_l = int(tok[1])
            else:
                comments.append(line[1:].strip())
            continue
        if not header_seen and line.replace(" ", "") == CSV_HEADER:
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected two columns, got {line!r}")
        q.append(float(parts[0]))
        d.append(float(parts[1]))
    if not header_seen:
        raise ValueError(f"{path}: missing header {CSV_HEADER!r}")
    if not q:
        raise ValueError(f"{path}: no samples")
    l = l if l is not None else (file_l if file_l is not None else 0)
    return ScatteringInput(l, np.array(q), np.array(d), tuple(bound), tuple(comments))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailModel:
    """``delta(q) = -alpha / q`` beyond the last sample."""

    alpha: float

    @classmethod
    def matched(cls, data: ScatteringInput) -> "TailModel":
        return cls(-data.q_max * float(data.delta[-1]))

    def __call__(self, q):
        return -self.alpha / np.asarray(q, dtype=float)


class PhaseShiftModel:
    """Callable ``delta(q)`` on ``q > 0``: threshold law, spline, tail.

    The spline runs through the reduced phase ``(delta - n_b pi) / q^(2l+1)``,
    which is smooth and finite at threshold; kernel integrands divide by up
    to ``q^(2l)``, so relative (not absolute) accuracy at small q matters.
    """

    def __init__(self, data: ScatteringInput, tail: TailModel | None = None):
        self.data = data
        self.tail = tail if tail is not None else TailModel.matched(data)
        self.power = 2 * data.l + 1
        self.n_pi = len(data.bound_states) * np.pi
        self.q0 = float(data.q[0])
        self.reduced = (data.delta - self.n_pi) / data.q**self.power
        self.spline: QuadraticSpline | None = (
            spline_fit(data.q, self.reduced) if len(data.q) >= 3 else None)

    def __call__(self, q):
        q0d = np.ndim(q) == 0
        q = np.atleast_1d(np.asarray(q, dtype=float))
        if np.any(q <= 0):
            raise ValueError("delta(q) needs q > 0")
        d = self.data
        out = np.empty_like(q)
        lo = q < self.q0
        hi = q > d.q_max
        mid = ~(lo | hi)
        out[lo] = self.n_pi + self.reduced[0] * q[lo] ** self.power
        out[hi] = self.tail(q[hi])
        if np.any(mid):
            qm = q[mid]
            if self.spline is not None:
                g = self.spline(qm)
            else:
                g = np.interp(qm, d.q, self.reduced)
            out[mid] = self.n_pi + g * qm**self.power
            # knots reproduce the samples bit for bit
            hit = np.searchsorted(d.q, qm)
            hit = np.clip(hit, 0, len(d.q) - 1)
            exact = d.q[hit] == qm
            out[np.flatnonzero(mid)[exact]] = d.delta[hit[exact]]
        return out[0] if q0d else out

    @property
    def anchors(self) -> np.ndarray:
        """Points where delta(q) is not smooth (breakpoints and joins)."""
        pts = [self.data.q]
        if self.spline is not None:
            pts.append(self.spline.breaks)
        return np.unique(np.concatenate(pts))


def eval_delta(data: ScatteringInput, tail: TailModel | None, q):
    return PhaseShiftModel(data, tail)(q)


class SpectralFunction:
    """Vectorized ``Y(q)`` for real ``q`` (negative q by conjugation)."""

    def __init__(self, data: ScatteringInput, tail: TailModel | None = None):
        self.data = data
        self.delta = PhaseShiftModel(data, tail)
        self.kappa = np.array([b.kappa for b in data.bound_states])
        self.M2 = np.array([b.M**2 for b in data.bound_states])

    @property
    def l(self) -> int:
        return self.data.l

    @property
    def anchors(self) -> np.ndarray:
        return self.delta.anchors

    def bound_term(self, q):
        q = np.asarray(q, dtype=float)
        if len(self.kappa) == 0:
            return np.zeros(q.shape, dtype=complex)
        t = self.M2 / (q[..., None] - 1j * self.kappa)
        return -1j * np.sum(t, axis=-1)

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        a = np.abs(q)
        out = np.empty(q.shape, dtype=complex)
        pos = a > 0
        out[pos] = 1.0 - np.exp(2j * self.delta(a[pos]))
        out[~pos] = 1.0 - np.exp(2j * self.delta.n_pi)
        out = out + self.bound_term(a)
        # Y(-q) = conj(Y(q))
        out = np.where(q < 0, np.conj(out), out)
        return out[()] if out.ndim == 0 else out


def eval_Y(data: ScatteringInput, tail: TailModel | None, q):
    return SpectralFunction(data, tail)(q)
