"""Same potential, partial waves l = 0, 1, 2, and what the expansion range does.

The inversion expands the kernel on [0, R] with R = N h and treats the
potential as zero beyond R.  For l >= 1 the centrifugal barrier makes the
phase shifts less sensitive to the inner region, so the residual tail of
the exponential past R (-3 exp(-6) ~ -0.007 fm^-2 at 4 fm) weighs more.
This script compares data from the exponential cut at R with data from
the full exponential, and shows how a longer grid absorbs the tail.

    python demos/02_higher_partial_waves.py
"""

import numpy as np

from marchenko import InversionGrid, exponential, invert, s_matrix_curve, truncated

V = exponential(-3.0, 1.5)
q = 0.05 * np.arange(1, 161)
h = 0.04


def rms(curve, lo=0.3, hi=3.0):
    m = (curve.r >= lo) & (curve.r <= hi)
    return np.sqrt(np.mean((curve.V[m] - V(curve.r[m])) ** 2))


print("data cut at R = 4 fm, N = 100")
for l in (0, 1, 2):
    data = s_matrix_curve(truncated(V, 4.0), l, q)
    print(f"  l={l}: rms {rms(invert(data)):.4f} fm^-2")

print("\nfull exponential, growing grid (h fixed)")
full = {l: s_matrix_curve(V, l, q) for l in (1, 2)}
for N in (100, 150, 200):
    row = "  ".join(f"l={l} {rms(invert(full[l], grid=InversionGrid(h, N))):.4f}" for l in (1, 2))
    print(f"  N={N:3d} (R={N * h:.0f} fm): {row}")

print("\nextending the f-table seed instead of the grid (N = 100, l = 2)")
for K in (201, 402, 804):
    c = invert(full[2], seed_index=K)
    print(f"  seed index {K}: rms {rms(c):.4f}")
