import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from marchenko.kernel import (FmTable, InversionGrid, combine_fm_to_F, compute_F_direct,
                              compute_fm_table, default_rule, geometric_factor)
from marchenko.scattering import SpectralFunction
from oracles import combine_brute

SMALL = InversionGrid(0.04, 20)


def single_mode(m, k0, h):
    """Y whose f_m table is the unit vector at k0."""
    return lambda q: 1j * q ** (m - 1.0) * (np.exp(-1j * q * h) - 1) * np.exp(-1j * q * h * k0)


def test_grid_basics():
    g = InversionGrid.from_range(0.04, 4.0)
    assert g.N == 100 and g.R == pytest.approx(4.0)
    assert g.q_cut == pytest.approx(np.pi / 0.04)
    np.testing.assert_allclose(g.x[:2], [0.01, 0.05])
    for k in range(5):
        np.testing.assert_allclose([g.hat_basis(k, x) for x in g.x[:5]], np.eye(5)[k], atol=1e-15)
    assert g.step_basis(2, 0.1) == 1.0 and g.step_basis(2, 0.13) == 0.0
    with pytest.raises(ValueError):
        InversionGrid(0.0, 10)
    with pytest.raises(ValueError):
        InversionGrid(0.1, 0)


def test_default_rule_width():
    g = InversionGrid(0.04, 100)
    rule = default_rule(g, anchors=[1.0, 2.0])
    assert rule.b == pytest.approx(g.q_cut)
    assert np.max(np.diff(rule.breaks)) <= min(np.pi * 0.04 / 8, 0.25) + 1e-12
    # resolves the fastest oscillation exp(i q (2R + h)) with many nodes per period
    period = 2 * np.pi / (2 * g.R + g.h)
    assert period / np.max(np.diff(rule.breaks)) * rule.nodes_per_panel >= 8


def test_geometric_factor_examples():
    assert geometric_factor(5, 0.0, 0.04) == 5
    assert abs(geometric_factor(2, np.pi / 0.04, 0.04)) < 1e-14
    assert geometric_factor(3, np.pi / 2, 1.0) == pytest.approx(-1.0, abs=1e-14)


@given(M=st.integers(0, 300), q=st.floats(-78.5, 78.5), h=st.just(0.04))
def test_geometric_factor_matches_sum(M, q, h):
    n = np.arange(1, M + 1)
    ref = np.sum(np.exp(1j * q * h * n))
    assert abs(geometric_factor(M, q, h) - ref) <= 1e-10 * max(1, M)


def test_zero_Y_gives_zero_tables():
    Y = lambda q: np.zeros_like(q, dtype=complex)  # noqa: E731
    fm = compute_fm_table(Y, SMALL, 2)
    assert np.all(fm.f == 0)
    assert np.all(combine_fm_to_F(fm) == 0)
    assert np.all(compute_F_direct(Y, SMALL, 0) == 0)


@pytest.mark.parametrize("m", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("k0", [0, 5, 40])
def test_fourier_mode_oracle(m, k0):
    h = SMALL.h
    # the fold assumes Y(-q) = conj Y(q), which this synthetic Y has only for even m
    fm = compute_fm_table(single_mode(m, k0, h), SMALL, 2, fold=(m % 2 == 0), m_values=[m])
    e = np.zeros(2 * SMALL.N + 2)
    e[k0] = 1.0
    np.testing.assert_allclose(fm.f[m], e, atol=1e-10)


def test_seed_column_is_zero(exp_data):
    fm = compute_fm_table(SpectralFunction(exp_data), SMALL, 0)
    assert fm.f[0, -1] == 0
    assert fm.seed_index == 2 * SMALL.N + 1
    with pytest.raises(ValueError):
        compute_fm_table(SpectralFunction(exp_data), SMALL, 0, seed_index=10)


def test_extended_seed_keeps_table_shape(exp_data):
    fm = compute_fm_table(SpectralFunction(exp_data), SMALL, 0, seed_index=4 * 41)
    assert fm.f.shape == (1, 42) and fm.f[0, -1] != 0


def test_fold_matches_full_range(finite_range_data):
    for l in (1, 2):
        Y = SpectralFunction(finite_range_data[l])
        rule = default_rule(SMALL, Y.anchors)
        a = compute_fm_table(Y, SMALL, l, rule).f
        b = compute_fm_table(Y, SMALL, l, rule, fold=False).f
        assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))


def test_fm_parity(finite_range_data):
    Y = SpectralFunction(finite_range_data[2])
    fm = compute_fm_table(Y, SMALL, 2, fold=False)
    assert fm.imag_residue < 1e-10
    scale = np.abs(fm.f).max()
    assert np.abs(fm.f[0].imag).max() < 1e-10 * scale
    assert np.abs(fm.f[1].real).max() < 1e-10 * scale


def test_fm_is_summed_derivative_of_transform(exp_data):
    # f_{0,k} = -h sum_{n=k+1}^{K} F_0'(n h), F_0(z) = (1/2pi) int exp(iqz) Y dq,
    # and by the midpoint rule ~ F_0((k + 1/2) h) - F_0((K + 1/2) h)
    g = InversionGrid(0.04, 100)
    Y = SpectralFunction(exp_data)
    rule = default_rule(g, Y.anchors)
    fm = compute_fm_table(Y, g, 0, rule)
    q, w = rule.nodes, rule.weights
    Yq = Y(q)
    K = 2 * g.N + 1

    def F0(z):
        return np.sum(w * (np.exp(1j * q * z) * Yq)).real / np.pi

    def dF0(z):
        return np.sum(w * (1j * q * np.exp(1j * q * z) * Yq)).real / np.pi

    for k in (0, 1, 10, 50, 150):
        explicit = -g.h * sum(dF0(n * g.h) for n in range(k + 1, K + 1))
        assert fm.f[0, k].real == pytest.approx(explicit, rel=1e-10, abs=1e-12)
        if k >= 10:
            # F_0 is not smooth through z = 0, so the midpoint picture holds away from it
            mid = F0((k + 0.5) * g.h) - F0((K + 0.5) * g.h)
            assert fm.f[0, k].real == pytest.approx(mid, abs=0.02 * abs(fm.f[0, 0]))
    # decays along k and vanishes at the far end
    assert abs(fm.f[0, 2 * g.N]) < 1e-3 * abs(fm.f[0, 0])


def test_combine_l0_is_hankel_copy():
    rng = np.random.default_rng(0)
    f = rng.normal(size=(1, 2 * SMALL.N + 2)).astype(complex)
    F = combine_fm_to_F(FmTable(f, 0, SMALL))
    k = np.arange(SMALL.N + 1)
    np.testing.assert_array_equal(F, f[0].real[np.add.outer(k, k)])


def test_combine_brute_force_l1():
    grid = InversionGrid(0.04, 4)
    f = np.ones((3, 10), dtype=complex)
    # make i^m f_m real so the sum is real: f_1 imaginary
    f[1] *= -1j
    got = combine_fm_to_F(FmTable(f, 1, grid))
    ref = combine_brute(f, 1, grid.h, grid.N)
    np.testing.assert_allclose(got, ref.real, rtol=1e-13)
    assert np.abs(ref.imag).max() < 1e-9 * np.abs(ref.real).max()


def test_combine_rejects_complex_input():
    grid = InversionGrid(0.04, 4)
    f = np.ones((3, 10), dtype=complex)
    with pytest.raises(ValueError, match="imaginary"):
        combine_fm_to_F(FmTable(f, 1, grid))


@settings(max_examples=25)
@given(l=st.integers(0, 3), N=st.integers(1, 8), seed=st.integers(0, 2**31 - 1))
def test_combine_matches_brute_and_is_symmetric(l, N, seed):
    grid = InversionGrid(0.05, N)
    rng = np.random.default_rng(seed)
    real = rng.normal(size=(2 * l + 1, 2 * N + 2))
    # f_m = i^-m * real keeps the combination real
    f = real * (1j ** -np.arange(2 * l + 1))[:, None]
    got = combine_fm_to_F(FmTable(f, l, grid))
    ref = combine_brute(f, l, grid.h, grid.N)
    np.testing.assert_allclose(got, ref.real, rtol=1e-10, atol=1e-12 * np.abs(ref).max())
    np.testing.assert_array_equal(got, got.T)


def test_direct_path_l0_matches_combine(exp_data):
    Y = SpectralFunction(exp_data)
    rule = default_rule(SMALL, Y.anchors)
    F1 = combine_fm_to_F(compute_fm_table(Y, SMALL, 0, rule))
    F2 = compute_F_direct(Y, SMALL, 0, rule)
    np.testing.assert_allclose(F1, F2, rtol=1e-6)
    assert F2[0, 0] == pytest.approx(compute_fm_table(Y, SMALL, 0, rule).f[0, 0].real, rel=1e-12)


def test_direct_path_higher_l_restrictions(finite_range_data):
    Y = SpectralFunction(finite_range_data[1])
    with pytest.raises(ValueError):
        compute_F_direct(Y, SMALL, 1)
    F = compute_F_direct(Y, SMALL, 1, indices=[1, 2, 3])
    assert F.shape == (3, 3)
    np.testing.assert_allclose(F, F.T, rtol=1e-12, atol=1e-14 * np.abs(F).max())


def test_quadrature_convergence(exp_data):
    Y = SpectralFunction(exp_data)
    a = combine_fm_to_F(compute_fm_table(Y, SMALL, 0, default_rule(SMALL, Y.anchors)))
    width = min(np.pi * SMALL.h / 8, 0.25) / 2
    b = combine_fm_to_F(compute_fm_table(Y, SMALL, 0, default_rule(SMALL, Y.anchors, max_width=width)))
    assert np.max(np.abs(a - b)) < 1e-8


def test_workers_do_not_change_bits(exp_data):
    Y = SpectralFunction(exp_data)
    rule = default_rule(SMALL, Y.anchors)
    a = compute_fm_table(Y, SMALL, 0, rule, workers=1).f
    b = compute_fm_table(Y, SMALL, 0, rule, workers=4).f
    np.testing.assert_array_equal(a, b)
