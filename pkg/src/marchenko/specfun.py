"""Riccati-Bessel and Riccati-Hankel functions.

Convention
----------
The outgoing Riccati-Hankel function is

    h_l^+(z) = i z h_l^(1)(z),

with ``h_l^(1)`` the spherical Hankel function of the first kind.  This is
the normalization for which the differential operator

    K_l f(z) = z^(l+1) (-1/z d/dz)^l [f(z)/z]

maps ``exp(i q z)`` onto ``q^l h_l^+(q z)``.  Consequences:

    h_0^+(z) = exp(iz),   h_l^+(z) -> exp(i(z - l pi/2))  for |z| -> inf,
    Re h_l^+(x) = -x y_l(x),   Im h_l^+(x) = x j_l(x)   for real x.

Values are produced from the exact (l+1)-term sum

    h_l^+(z) = (-i)^l exp(iz) sum_k w_l[l-k] (i/(2z))^k,

where ``w_l`` are the weights returned by :func:`k_weights`.  The finite sum
stays well behaved on the positive imaginary axis, which is where bound
states live (``z = i kappa r``).
"""

from __future__ import annotations

from math import factorial

import numpy as np
from scipy.special import spherical_jn, spherical_yn

L_MAX = 6

# weights stay below 2**53 up to here, so float64 holds them exactly
_EXACT_L = 17


def k_weights(l: int) -> np.ndarray:
    """Weights ``(2l-n)! / (n! (l-n)!)`` for ``n = 0..l`` as a float array.

    Computed in integer arithmetic; raises ``OverflowError`` once a weight
    can no longer be stored exactly in double precision.
    """
    if l < 0:
        raise ValueError(f"l must be non-negative, got {l}")
    w = [factorial(2 * l - n) // (factorial(n) * factorial(l - n)) for n in range(l + 1)]
    if max(w) >= 2**53:
        raise OverflowError(f"K-transform weights for l={l} exceed exact float range")
    return np.array(w, dtype=float)


def _check_l(l: int, l_max: int) -> None:
    if l < 0:
        raise ValueError(f"l must be non-negative, got {l}")
    if l > l_max:
        raise ValueError(f"l={l} exceeds l_max={l_max}")


def riccati_hankel_plus(l: int, z, l_max: int = L_MAX):
    """Outgoing Riccati-Hankel function ``h_l^+(z)`` for complex ``z``.

    Accepts scalars or arrays.  ``z = 0`` is a domain error for ``l >= 1``.
    Accuracy is relative to ``|h_l^+(z)|``: for real ``|z| << l`` the small
    imaginary part comes out of cancellation, so use
    :func:`riccati_bessel_j` when the regular function itself is needed.
    """
    _check_l(l, l_max)
    z = np.asarray(z, dtype=complex)
    if l >= 1 and np.any(z == 0):
        raise ValueError(f"h_{l}^+ is singular at z=0")
    w = k_weights(l)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = 1j / (2.0 * z) if l else np.zeros_like(z)
    # Horner in t: coefficient of t^k is w[l-k]
    acc = np.full_like(z, w[0])
    for n in range(1, l + 1):
        acc = acc * t + w[n]
    val = (-1j) ** l * np.exp(1j * z) * acc
    if not np.all(np.isfinite(val)):
        raise FloatingPointError("non-finite Riccati-Hankel value")
    return val[()] if val.ndim == 0 else val


def riccati_bessel_j(l: int, x, l_max: int = L_MAX):
    """Regular Riccati-Bessel function ``x j_l(x)`` for real ``x``."""
    _check_l(l, l_max)
    x = np.asarray(x, dtype=float)
    val = x * spherical_jn(l, x)
    return val[()] if val.ndim == 0 else val


def riccati_bessel_n(l: int, x, l_max: int = L_MAX):
    """Irregular Riccati-Bessel function ``-x y_l(x)`` (``cos x`` for l=0)."""
    _check_l(l, l_max)
    x = np.asarray(x, dtype=float)
    val = -x * spherical_yn(l, x)
    return val[()] if val.ndim == 0 else val


def riccati_pair(l: int, x):
    """Return ``(j, j', n, n')`` of the Riccati-Bessel pair at real ``x > 0``.

    Asymptotically ``j ~ sin(x - l pi/2)`` and ``n ~ cos(x - l pi/2)``.
    """
    x = np.asarray(x, dtype=float)
    jl = spherical_jn(l, x)
    jp = spherical_jn(l, x, derivative=True)
    yl = spherical_yn(l, x)
    yp = spherical_yn(l, x, derivative=True)
    return x * jl, jl + x * jp, -x * yl, -(yl + x * yp)


def decaying_solution(l: int, kappa: float, r):
    """Free solution ``i^l h_l^+(i kappa r)`` and its r-derivative.

    Real, positive, and asymptotic to ``exp(-kappa r)``.
    """
    r = np.asarray(r, dtype=float)
    w = k_weights(l)
    s = 1.0 / (2.0 * kappa * r)
    poly = np.zeros_like(r)
    dpoly = np.zeros_like(r)
    for k in range(l + 1):
        poly = poly + w[l - k] * s**k
        # d/dr s^k = -k s^k / r
        dpoly = dpoly - k * w[l - k] * s**k / r
    e = np.exp(-kappa * r)
    return e * poly, e * (dpoly - kappa * poly)
