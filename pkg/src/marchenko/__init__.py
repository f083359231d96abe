"""Algebraic fixed-l Marchenko inversion of quantum scattering data."""

from .forward import (MEV_FM2, BoundState, PotentialModel, exponential, find_bound_states,
                      parse_potential, phase_shift, s_matrix_curve, square_well, truncated)
from .inversion import (PotentialCurve, TranslationSolution, invert, reconstruct_potential,
                        solve_translation, zeta)
from .kernel import (FmTable, InversionGrid, combine_fm_to_F, compute_F_direct,
                     compute_fm_table, default_rule, geometric_factor)
from .scattering import (ScatteringInput, SpectralFunction, TailModel, eval_delta, eval_Y,
                         load_table, save_table)
from .specfun import k_weights, riccati_bessel_j, riccati_hankel_plus

__all__ = [
    "MEV_FM2", "BoundState", "PotentialModel", "exponential", "find_bound_states", "parse_potential",
    "phase_shift", "s_matrix_curve", "square_well", "truncated", "PotentialCurve", "TranslationSolution",
    "invert", "reconstruct_potential", "solve_translation", "zeta", "FmTable", "InversionGrid",
    "combine_fm_to_F", "compute_F_direct", "compute_fm_table", "default_rule",
    "geometric_factor", "ScatteringInput", "SpectralFunction", "TailModel", "eval_delta",
    "eval_Y", "load_table", "save_table", "k_weights", "riccati_bessel_j", "riccati_hankel_plus",
]
