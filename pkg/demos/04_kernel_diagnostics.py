"""Inside the inversion: f-table, kernel matrix and translation kernel.

Checks that are cheap to run on any input table:
  * i^m f_m should be real, and the combined kernel symmetric;
  * the two kernel paths (f-table combination and direct Riccati-Hankel
    quadrature) agree for l = 0;
  * the diagonal of the translation kernel goes to zero at the range R.

    python demos/04_kernel_diagnostics.py
"""

import numpy as np

from marchenko import InversionGrid, exponential, s_matrix_curve, truncated
from marchenko.inversion import invert
from marchenko.kernel import combine_fm_to_F, compute_F_direct, compute_fm_table, default_rule
from marchenko.scattering import SpectralFunction

q = 0.05 * np.arange(1, 161)
V = truncated(exponential(-3.0, 1.5), 4.0)
grid = InversionGrid(0.04, 100)

for l in (0, 1, 2):
    Y = SpectralFunction(s_matrix_curve(V, l, q))
    rule = default_rule(grid, Y.anchors)
    folded = compute_fm_table(Y, grid, l, rule)
    full = compute_fm_table(Y, grid, l, rule, fold=False)
    F = combine_fm_to_F(folded)
    print(f"l={l}: {len(rule.nodes)} nodes, |Im i^m f_m| residue {full.imag_residue:.1e}, "
          f"fold vs full {np.max(np.abs(folded.f - full.f)):.1e}, "
          f"F(0,0) = {F[0, 0]:.4f}")

Y = SpectralFunction(s_matrix_curve(V, 0, q))
small = InversionGrid(0.04, 20)
rule = default_rule(small, Y.anchors)
a = combine_fm_to_F(compute_fm_table(Y, small, 0, rule))
b = compute_F_direct(Y, small, 0, rule)
print(f"\nl=0, N=20: f-table vs direct kernel, max relative difference "
      f"{np.max(np.abs(a - b)) / np.max(np.abs(b)):.1e}")

res = invert(s_matrix_curve(V, 0, q), full=True)
D = res.solution.D
print("\ntranslation-kernel diagonal D(x) = L(x, x)")
for i in range(0, len(D) - 1, 20):
    print(f"  x = {grid.x[i]:5.2f} fm   D = {D[i]: .5f}")
print(f"  x = {grid.x[-1]:5.2f} fm   D = {D[-1]: .5f}   (range end)")
