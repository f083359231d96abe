"""Forward radial Schroedinger solver.

Units: hbar^2/(2 mu) = 1, so energies and potentials are in fm^-2 and
momenta in fm^-1.  The radial equation solved is

    u'' = [l(l+1)/r^2 + V(r) - q^2] u,    u(r) ~ r^(l+1) at the origin.

Phase shifts come from matching to the Riccati-Bessel pair at a radius
where V vanishes; bound states from node counting plus bisection on the
log-derivative mismatch against the decaying free solution.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import quad, simpson

from .specfun import decaying_solution, riccati_pair

log = logging.getLogger(__name__)

MEV_FM2 = 41.5  # -3 fm^-2 <-> -124.5 MeV for the NN system


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialModel:
    """Short-range central potential, zero beyond ``cutoff``.

    ``kind`` is ``"exp"`` (``V0 exp(-a r)``), ``"well"`` (``V0`` for
    ``r < a``) or ``"table"`` (linear interpolation of ``(r, V)`` samples).
    """

    kind: str
    V0: float = 0.0
    a: float = 1.0
    cutoff: float = 0.0
    table: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in ("exp", "well", "table"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.cutoff <= 0:
            raise ValueError("cutoff radius must be positive")

    @property
    def vanishes(self) -> bool:
        """True when V is identically zero (free motion, delta = 0 exactly)."""
        if self.kind == "table":
            return not np.any(np.asarray(self.table[1]))
        return self.V0 == 0.0

    @property
    def jumps(self) -> tuple:
        """Radii where V is discontinuous."""
        if self.kind == "well":
            return (self.a,)
        return (self.cutoff,)

    def __call__(self, r, side: int = 0):
        """V(r); at a jump ``side=-1``/``+1`` picks the left/right limit
        and ``side=0`` the mean."""
        r = np.asarray(r, dtype=float)
        if side == 0:
            return 0.5 * (self(r, -1) + self(r, 1))
        eps = 1e-9 * max(self.cutoff, 1.0)
        edge = self.a if self.kind == "well" else self.cutoff
        inside = r < edge + eps if side < 0 else r < edge - eps
        if self.kind == "well":
            v = np.full_like(r, self.V0)
        elif self.kind == "exp":
            v = self.V0 * np.exp(-self.a * r)
        else:
            rt, vt = np.asarray(self.table[0]), np.asarray(self.table[1])
            v = np.interp(r, rt, vt)
        return np.where(inside, v, 0.0)


def exponential(V0: float, a: float, cutoff: float | None = None) -> PotentialModel:
    """``V0 exp(-a r)``; the default cutoff is where |V| drops below 1e-9 fm^-2."""
    if cutoff is None:
        cutoff = max(np.log(max(abs(V0), 1e-300) / 1e-9) / a, 1.0)
    return PotentialModel("exp", V0, a, float(cutoff))


def square_well(V0: float, r0: float) -> PotentialModel:
    return PotentialModel("well", V0, r0, float(r0))


def tabulated(r, V) -> PotentialModel:
    r = np.asarray(r, dtype=float)
    V = np.asarray(V, dtype=float)
    if np.any(np.diff(r) <= 0):
        raise ValueError("tabulated radii must increase")
    return PotentialModel("table", cutoff=float(r[-1]), table=(tuple(r), tuple(V)))


def truncated(V: PotentialModel, radius: float) -> PotentialModel:
    """``V`` set to zero beyond ``radius`` (no-op when already shorter)."""
    if radius >= V.cutoff:
        return V
    if V.kind == "well":
        return PotentialModel("well", V.V0, min(V.a, radius), float(radius))
    return dataclasses.replace(V, cutoff=float(radius))


def parse_potential(spec: str) -> PotentialModel:
    """Parse ``exp:V0:a[:cutoff]``, ``well:V0:r0`` or ``table:<path>``.

    Table files hold two columns ``r V`` (fm, fm^-2); ``#`` starts a comment.
    """
    kind, _, rest = spec.partition(":")
    try:
        if kind == "exp":
            vals = [float(t) for t in rest.split(":")]
            if len(vals) not in (2, 3):
                raise ValueError("expected V0:a or V0:a:cutoff")
            return exponential(*vals)
        if kind == "well":
            V0, r0 = (float(t) for t in rest.split(":"))
            return square_well(V0, r0)
        if kind == "table":
            data = np.loadtxt(Path(rest), comments="#", delimiter=None, ndmin=2)
            return tabulated(data[:, 0], data[:, 1])
    except (ValueError, OSError) as exc:
        raise ValueError(f"bad potential spec {spec!r}: {exc}") from exc
    raise ValueError(f"bad potential spec {spec!r}")


# ---------------------------------------------------------------------------
# integrators
# ---------------------------------------------------------------------------

def _radial_grid(V: PotentialModel, ode_step: float, r_end: float) -> np.ndarray:
    n = int(np.ceil(r_end / ode_step - 1e-9))
    return ode_step * np.arange(1, n + 1)


def _taylor_at_origin(V):
    d = 1e-4
    v = V(np.array([0.0, d, 2 * d]), side=1)
    return v[0], (-3 * v[0] + 4 * v[1] - v[2]) / (2 * d), (v[0] - 2 * v[1] + v[2]) / d**2


def _start_values(V, l, E, r):
    # regular series u = r^(l+1) (1 + a r^2 + b r^3 + c r^4) for V(r) ~ v0 + v1 r + v2 r^2 / 2
    v0, v1, v2 = _taylor_at_origin(V)
    a = (v0 - E) / (4 * l + 6)
    b = v1 / (6 * l + 12)
    c = ((v0 - E) * a + 0.5 * v2) / (8 * l + 20)
    u = r ** (l + 1) * (1.0 + a * r**2 + b * r**3 + c * r**4)
    du = r**l * ((l + 1) + a * (l + 3) * r**2 + b * (l + 4) * r**3 + c * (l + 5) * r**4)
    return u, du


def integrate_rk4(V: PotentialModel, l: int, energies, ode_step: float, r_end: float,
                  count_nodes: bool = False):
    """Outward RK4 from ``r = ode_step`` to the first grid point ``>= r_end``.

    Vectorized over ``energies``.  Returns ``(r, u, u', nodes)`` at the end
    point; ``u`` is rescaled on the fly, so only ratios are meaningful.
    """
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    r = _radial_grid(V, ode_step, r_end)
    h = ode_step
    cent = l * (l + 1)
    u, du = _start_values(V, l, E, r[0])
    # one-sided limits so a jump sitting on a node is integrated exactly
    v_lo = V(r[:-1], side=1)
    v_mid = V(r[:-1] + 0.5 * h, side=0)
    v_hi = V(r[1:], side=-1)
    g_lo = cent / r[:-1] ** 2 + v_lo
    g_mid = cent / (r[:-1] + 0.5 * h) ** 2 + v_mid
    g_hi = cent / r[1:] ** 2 + v_hi
    nodes = np.zeros(E.shape, dtype=int)
    for i in range(len(r) - 1):
        a = g_lo[i] - E
        b = g_mid[i] - E
        c = g_hi[i] - E
        k1u, k1d = du, a * u
        u2 = u + 0.5 * h * k1u
        d2 = du + 0.5 * h * k1d
        k2u, k2d = d2, b * u2
        u3 = u + 0.5 * h * k2u
        d3 = du + 0.5 * h * k2d
        k3u, k3d = d3, b * u3
        u4 = u + h * k3u
        d4 = du + h * k3d
        k4u, k4d = d4, c * u4
        un = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        du = du + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
        if count_nodes:
            nodes += (un * u < 0) | ((un == 0) & (u != 0))
        u = un
        big = np.abs(u) > 1e150
        if np.any(big):
            s = np.where(big, 1e-150, 1.0)
            u, du = u * s, du * s
    return r[-1], u, du, nodes


def _jump_nodes(V, r):
    eps = 1e-9 * max(V.cutoff, 1.0)
    idx = [int(np.argmin(np.abs(r - j))) for j in V.jumps]
    return {i for i, j in zip(idx, V.jumps) if abs(r[i] - j) < eps and 2 <= i < len(r) - 1}


def integrate_numerov(V: PotentialModel, l: int, energies, ode_step: float, r_end: float):
    """Outward Numerov, vectorized over energies.

    Returns ``(r, u)`` with ``u`` on the full radial grid (rows = energies).
    Jumps of V that sit on a grid node are crossed by restarting from a
    one-sided derivative and a Taylor step, which keeps fourth order.
    """
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    r = _radial_grid(V, ode_step, r_end)
    h = ode_step
    h2 = h**2 / 12.0
    cent = l * (l + 1)
    g = cent / r**2 + V(r, side=1)
    u = np.empty((len(E), len(r)))
    u[:, 0] = _start_values(V, l, E, r[0])[0]
    u[:, 1] = _start_values(V, l, E, r[1])[0]
    w = 1.0 - h2 * (g[None, :] - E[:, None])
    jumps = _jump_nodes(V, r)
    for n in range(1, len(r) - 1):
        if n in jumps:
            u[:, n + 1] = _taylor_across(V, cent, E, r, g, u, n, h)
            continue
        w_next = w[:, n + 1]
        if n + 1 in jumps:
            # the step landing on a jump sees the left-hand limit
            g_left = cent / r[n + 1] ** 2 + float(V(r[n + 1], side=-1))
            w_next = 1.0 - h2 * (g_left - E)
        u[:, n + 1] = ((12.0 - 10.0 * w[:, n]) * u[:, n] - w[:, n - 1] * u[:, n - 1]) / w_next
        big = np.abs(u[:, n + 1]) > 1e150
        if np.any(big):
            u[big, : n + 2] *= 1e-150
    return r, u


def _taylor_across(V, cent, E, r, g, u, n, h):
    # u' from the left (fourth order), then a Taylor step with right-hand limits
    g_left = cent / r[n] ** 2 + float(V(r[n], side=-1))
    f = lambda k, gk: (gk - E) * u[:, k]  # noqa: E731
    du = (u[:, n] - u[:, n - 1]) / h + h * (7 * f(n, g_left) + 6 * f(n - 1, g[n - 1])
                                            - f(n - 2, g[n - 2])) / 24.0
    d = 1e-5
    vr = V(r[n] + np.array([0.0, d, 2 * d]), side=1)
    G = g[n] - E
    G1 = -2 * cent / r[n] ** 3 + (-3 * vr[0] + 4 * vr[1] - vr[2]) / (2 * d)
    G2 = 6 * cent / r[n] ** 4 + (vr[0] - 2 * vr[1] + vr[2]) / d**2
    u0 = u[:, n]
    d2 = G * u0
    d3 = G1 * u0 + G * du
    d4 = G2 * u0 + 2 * G1 * du + G * d2
    return u0 + h * du + h**2 / 2 * d2 + h**3 / 6 * d3 + h**4 / 24 * d4


# ---------------------------------------------------------------------------
# phase shifts
# ---------------------------------------------------------------------------

def _match_radius(V: PotentialModel, r_match: float | None) -> float:
    if r_match is None:
        return V.cutoff
    if r_match < V.cutoff - 1e-12:
        raise ValueError(f"r_match={r_match} lies inside the potential range {V.cutoff}")
    return r_match


def _tan_delta_from_derivative(l, q, r, u, du):
    j, jp, n, np_ = riccati_pair(l, q * r)
    # u = A (j cos d + n sin d);  solve for tan d from (u, u')
    num = u * q * jp - du * j
    den = du * n - u * q * np_
    return num, den


def phase_shifts_raw(V: PotentialModel, l: int, q, ode_step: float = 0.002,
                     r_match: float | None = None, method: str = "rk4") -> np.ndarray:
    """Phase shifts reduced to ``(-pi/2, pi/2]`` (no unwrapping)."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any(q <= 0):
        raise ValueError("momenta must be positive")
    if method not in ("rk4", "numerov"):
        raise ValueError(f"unknown method {method!r}")
    R = _match_radius(V, r_match)
    if V.vanishes:
        # integrating the free equation would only return truncation error
        return np.zeros_like(q)
    E = q**2
    if method == "rk4":
        rm, u, du, _ = integrate_rk4(V, l, E, ode_step, R)
        num, den = _tan_delta_from_derivative(l, q, rm, u, du)
    elif method == "numerov":
        r, u = integrate_numerov(V, l, E, ode_step, R + 4 * ode_step)
        i2 = len(r) - 1
        i1 = i2 - 4
        j1, _, n1, _ = riccati_pair(l, q * r[i1])
        j2, _, n2, _ = riccati_pair(l, q * r[i2])
        u1, u2 = u[:, i1], u[:, i2]
        num = u1 * j2 - u2 * j1
        den = u2 * n1 - u1 * n2
    else:
        raise ValueError(f"unknown method {method!r}")
    d = np.arctan2(num, den)
    # fold into (-pi/2, pi/2]
    d = np.where(d > np.pi / 2, d - np.pi, d)
    d = np.where(d <= -np.pi / 2, d + np.pi, d)
    return d


def unwrap_phase(delta) -> np.ndarray:
    """Continuity unwrap along an ascending q sweep.

    The highest-q value keeps its principal branch (phase shifts vanish
    at large q); lower points follow by continuity, so Levinson's theorem
    shows up as ``delta(0+) = n_b pi``.
    """
    d = np.array(delta, dtype=float)
    for i in range(len(d) - 2, -1, -1):
        k = np.round((d[i + 1] - d[i]) / np.pi)
        d[i] += k * np.pi
        if abs(d[i] - d[i + 1]) >= np.pi / 2:
            raise ValueError(
                f"phase jump of {d[i] - d[i + 1]:.3f} rad between grid points {i} and "
                f"{i + 1}; refine the momentum grid")
    return d


def phase_shift(V: PotentialModel, l: int, q: float, ode_step: float = 0.002,
                r_match: float | None = None, method: str = "rk4") -> float:
    """Single phase shift in ``(-pi/2, pi/2]``."""
    if q <= 0:
        raise ValueError("q must be positive")
    return float(phase_shifts_raw(V, l, [q], ode_step, r_match, method)[0])


# ---------------------------------------------------------------------------
# bound states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundState:
    """Bound state at ``q = i kappa`` with asymptotic constant ``M``:
    ``u(r) -> M i^l h_l^+(i kappa r)`` (``M exp(-kappa r)`` for l=0)."""

    kappa: float
    M: float

    def __post_init__(self):
        if not self.kappa > 0 or not self.M > 0:
            raise ValueError("bound state needs kappa > 0 and M > 0")

    @property
    def energy(self) -> float:
        return -self.kappa**2


def _count_below(V, l, E, ode_step, R):
    """Number of eigenvalues below each energy in ``E`` (all negative)."""
    kappa = np.sqrt(-E)
    _, u, du, nodes = integrate_rk4(V, l, E, ode_step, R, count_nodes=True)
    rR = _radial_grid(V, ode_step, R)[-1]
    w, dw = decaying_solution(l, kappa, rR)
    # mismatch u'/u - w'/w, sign-safe: (u' w - u w') * u
    mism = (du * w - u * dw) * u
    return nodes + (mism < 0)


def find_bound_states(V: PotentialModel, l: int, ode_step: float = 0.002,
                      e_tol: float = 1e-10) -> list[BoundState]:
    """All bound states of ``V`` in partial wave ``l``, deepest first."""
    R = V.cutoff
    vmin = float(np.min(V(np.linspace(1e-6, R, 4001))))
    if vmin >= 0:
        return []
    e_lo = 1.05 * vmin - 1e-3
    e_hi = -1e-12
    n_b = int(_count_below(V, l, np.array([e_hi]), ode_step, R)[0])
    if n_b == 0:
        return []
    lo = np.full(n_b, e_lo)
    hi = np.full(n_b, e_hi)
    target = np.arange(n_b)
    # vectorized bisection: state n is the smallest E with count(E) > n
    while np.max(hi - lo) > e_tol:
        mid = 0.5 * (lo + hi)
        cnt = _count_below(V, l, mid, ode_step, R)
        above = cnt > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    energies = 0.5 * (lo + hi)
    return [_norming(V, l, E, ode_step) for E in energies]


def _norming(V, l, E, ode_step):
    kappa = np.sqrt(-E)
    R = V.cutoff
    r, u = integrate_numerov(V, l, [E], ode_step, R)
    u = u[0]
    rr = np.concatenate([[0.0], r])
    uu = np.concatenate([[0.0], u])
    inner = simpson(uu**2, x=rr)
    w_R, _ = decaying_solution(l, kappa, r[-1])
    c = u[-1] / w_R
    outer, _ = quad(lambda x: decaying_solution(l, kappa, x)[0] ** 2, r[-1], np.inf, limit=200)
    norm = inner + c**2 * outer
    M = abs(c) / np.sqrt(norm)
    return BoundState(float(kappa), float(M))


def s_matrix_curve(V: PotentialModel, l: int, q_grid, ode_step: float = 0.002,
                   with_bound_states: bool = True):
    """Phase-shift table of ``V`` on ``q_grid`` (unwrapped) plus bound states."""
    from .scattering import ScatteringInput

    q = np.asarray(q_grid, dtype=float)
    if np.any(np.diff(q) <= 0) or q[0] <= 0:
        raise ValueError("q_grid must be positive and strictly increasing")
    delta = unwrap_phase(phase_shifts_raw(V, l, q, ode_step))
    bound = find_bound_states(V, l, ode_step) if with_bound_states else []
    return ScatteringInput(l=l, q=q, delta=delta, bound_states=tuple(bound))
