import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from marchenko.numerics import (SingularSystemError, central_diff, integrate, make_rule,
                                panel_rule, refined_rule, solve_batch, solve_dense,
                                spline_eval, spline_fit)


def test_constant_on_kernel_range():
    h = 0.04
    rule = panel_rule(0.0, np.pi / h, 50)
    assert integrate(lambda q: np.ones_like(q), rule) == pytest.approx(np.pi / h, rel=1e-12)


def test_full_period_exponential():
    rule = panel_rule(-np.pi, np.pi, 10)
    assert abs(integrate(lambda q: np.exp(1j * q), rule)) < 1e-12


def test_quadratic_exact():
    rule = panel_rule(0.0, 1.0, 4, 8)
    assert integrate(lambda q: q**2, rule) == pytest.approx(1 / 3, abs=1e-14)


def test_rule_invariants():
    rule = refined_rule(0.0, 78.5, 0.02, anchors=[0.05, 0.1, 7.999, 8.0, 100.0])
    assert np.all(rule.nodes > rule.a) and np.all(rule.nodes < rule.b)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(rule.b - rule.a, rel=1e-12)
    assert np.all(np.diff(rule.breaks) <= 0.02 + 1e-12)
    for t in (0.05, 0.1, 7.999, 8.0):
        assert np.min(np.abs(rule.breaks - t)) < 1e-12
    m = rule.mirrored()
    np.testing.assert_array_equal(m.nodes, -m.nodes[::-1])
    assert m.weights.sum() == pytest.approx(2 * rule.weights.sum(), rel=1e-13)


def test_bad_rules():
    with pytest.raises(ValueError):
        make_rule([0.0, 1.0, 0.5])
    with pytest.raises(ValueError):
        panel_rule(0.0, 1.0, 0)
    with pytest.raises(ValueError):
        panel_rule(1.0, 2.0, 3).mirrored()


def test_non_finite_integrand_names_node():
    rule = panel_rule(0.0, 1.0, 1, 4)
    with pytest.raises(FloatingPointError, match="q="):
        integrate(lambda q: 1.0 / (q - rule.nodes[2]), rule)


def test_batch_shape_is_contracted_last_axis():
    rule = panel_rule(0.0, 2.0, 3)
    out = integrate(lambda q: np.vstack([q, q**2]), rule)
    np.testing.assert_allclose(out, [2.0, 8 / 3], rtol=1e-13)


@settings(max_examples=50)
@given(deg=st.integers(0, 15), seed=st.integers(0, 2**31 - 1),
       panels=st.integers(1, 6), lo=st.floats(-3, 3), width=st.floats(0.1, 4))
def test_polynomial_exactness(deg, seed, panels, lo, width):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=deg + 1)
    p = np.polynomial.Polynomial(c)
    rule = panel_rule(lo, lo + width, panels, 8)
    exact = p.integ()(lo + width) - p.integ()(lo)
    scale = np.sum(np.abs(c)) * max(1.0, abs(lo) + width) ** (deg + 1)
    assert abs(integrate(p, rule) - exact) <= 1e-13 * scale


def test_solve_dense_examples():
    np.testing.assert_array_equal(solve_dense(np.eye(3), [1.0, 2.0, 3.0]), [1, 2, 3])
    np.testing.assert_allclose(solve_dense([[2.0, 0.0], [0.0, 4.0]], [2.0, 8.0]), [1, 2])


def test_solve_dense_random_50():
    rng = np.random.default_rng(7)
    A = rng.normal(size=(50, 50)) + 10 * np.eye(50)
    x = rng.normal(size=50)
    got = solve_dense(A, A @ x)
    assert np.linalg.norm(got - x) / np.linalg.norm(x) < 1e-9


def test_solve_dense_errors():
    with pytest.raises(SingularSystemError):
        solve_dense([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])
    with pytest.raises(ValueError):
        solve_dense(np.ones((2, 3)), [1.0, 1.0])
    with pytest.raises(ValueError):
        solve_dense(np.eye(2), [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        solve_dense([[np.nan, 0.0], [0.0, 1.0]], [1.0, 1.0])


def test_solve_batch_reports_index():
    As = np.array([np.eye(2), [[1.0, 1.0], [1.0, 1.0]]])
    with pytest.raises(SingularSystemError, match="system 1"):
        solve_batch(As, np.ones((2, 2)))


@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 30))
def test_solve_residual_and_batch_independence(seed, n):
    rng = np.random.default_rng(seed)
    As = rng.normal(size=(5, n, n)) + 3 * np.sqrt(n) * np.eye(n)
    bs = rng.normal(size=(5, n))
    x1 = solve_batch(As, bs, workers=1)
    x3 = solve_batch(As, bs, workers=3)
    np.testing.assert_array_equal(x1, x3)
    for A, b, x in zip(As, bs, x1):
        assert np.linalg.norm(A @ x - b) / np.linalg.norm(b) <= 1e-10


def test_spline_reproduces_quadratic():
    s = spline_fit([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 4.0, 9.0])
    assert spline_eval(s, 1.5) == pytest.approx(2.25, abs=1e-14)


def test_spline_reproduces_line():
    x = np.array([0.1, 0.4, 0.45, 1.3, 2.0, 2.2])
    s = spline_fit(x, 3 * x - 1)
    t = np.linspace(0.1, 2.2, 77)
    np.testing.assert_allclose(s(t), 3 * t - 1, atol=1e-13)


def test_spline_sin_accuracy():
    x = 0.05 * np.arange(161)
    s = spline_fit(x, np.sin(x))
    t = np.linspace(0, 8, 20001)
    assert np.max(np.abs(s(t) - np.sin(t))) < 1e-4


def test_spline_errors():
    with pytest.raises(ValueError):
        spline_fit([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        spline_fit([0.0, 2.0, 1.0], [0.0, 1.0, 2.0])
    s = spline_fit([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        s(2.5)
    with pytest.raises(ValueError):
        s(-0.1)


@settings(max_examples=50)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(3, 40))
def test_spline_interpolates_and_is_c1(seed, n):
    rng = np.random.default_rng(seed)
    x = np.cumsum(rng.uniform(0.05, 1.0, size=n))
    y = rng.normal(size=n)
    s = spline_fit(x, y)
    np.testing.assert_allclose(s(x), y, atol=1e-10 * (1 + np.abs(y).max()))
    for b in s.breaks[1:-1]:
        eps = 1e-9 * max(1.0, abs(b))
        left, right = s.derivative(b - eps), s.derivative(b + eps)
        scale = 1 + np.abs(s.derivative(x)).max()
        assert abs(left - right) <= 1e-5 * scale


def test_central_diff_examples():
    np.testing.assert_array_equal(central_diff(np.full(6, 2.5), 0.1), np.zeros(6))
    step = 0.1
    i = np.arange(8)
    np.testing.assert_allclose(central_diff(3.0 * i * step, step), 3.0, atol=1e-13)
    y = (i * step) ** 2
    np.testing.assert_allclose(central_diff(y, step), 2 * i * step, atol=1e-12)
    with pytest.raises(ValueError):
        central_diff([1.0, 2.0], 0.1)


@given(a=st.floats(-5, 5), b=st.floats(-5, 5), c=st.floats(-5, 5),
       step=st.floats(0.01, 1.0), n=st.integers(3, 30))
def test_central_diff_exact_on_quadratics(a, b, c, step, n):
    x = step * np.arange(n)
    got = central_diff(a + b * x + c * x**2, step)
    scale = 1 + abs(a) + abs(b) + abs(c) * (x[-1] + 1) ** 2
    np.testing.assert_allclose(got, b + 2 * c * x, atol=1e-10 * scale / step)
