import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rslmc.errors import (
    NegativeWeight,
    NonFiniteEntry,
    NormOverflow,
    SubdivisionLimit,
    UnnormalizedWeights,
)
from rslmc.numerics import (
    RngStream,
    eigenvalues,
    matrix_exp,
    quadrature,
    sample_categorical,
    standard_normal,
)


def durand_kerner_roots(coeffs, iters=500):
    """Independent polynomial root finder (monic coeffs, highest first)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs) - 1
    roots = (0.4 + 0.9j) ** np.arange(n)
    for _ in range(iters):
        vals = np.polyval(coeffs, roots)
        for i in range(n):
            denom = np.prod(roots[i] - np.delete(roots, i))
            roots[i] = roots[i] - vals[i] / denom
    return roots


def char_poly(a):
    """Characteristic polynomial coefficients by Faddeev-LeVerrier."""
    n = a.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.array(coeffs)


# --- streams -----------------------------------------------------------------

def test_standard_normal_deterministic():
    a = standard_normal(RngStream(42), 3)
    b = standard_normal(RngStream(42), 3)
    np.testing.assert_array_equal(a, b)


def test_substreams_differ_and_reproduce():
    root = RngStream(5)
    s1 = standard_normal(root.substream(1), 8)
    s2 = standard_normal(root.substream(2), 8)
    assert not np.array_equal(s1, s2)
    np.testing.assert_array_equal(s1, standard_normal(RngStream(5).substream(1), 8))


def test_standard_normal_moments():
    draws = standard_normal(RngStream(0), 10**6)
    assert abs(draws.mean()) < 0.01
    # var of the sample variance is ~2/n, so 0.01 is a ~7 sigma band
    assert abs(draws.var() - 1.0) < 0.01


def test_standard_normal_rejects_empty():
    with pytest.raises(ValueError):
        standard_normal(RngStream(0), 0)


# --- categorical -------------------------------------------------------------

def test_categorical_degenerate():
    rng = RngStream(1)
    assert all(sample_categorical(rng, np.array([1.0, 0.0, 0.0])) == 0
               for _ in range(100))


def test_categorical_fair_coin():
    rng = RngStream(2)
    draws = np.array([sample_categorical(rng, np.array([0.5, 0.5]))
                      for _ in range(10**6)])
    assert abs(np.mean(draws == 0) - 0.5) < 0.005


def test_categorical_kernel_row_frequencies():
    # first row of the first-order kernel of the slow 5-state generator at 0.1
    weights = np.array([0.94, 0.02, 0.02, 0.01, 0.01])
    rng = RngStream(3)
    counts = np.zeros(5)
    for _ in range(10**6):
        counts[sample_categorical(rng, weights)] += 1
    np.testing.assert_allclose(counts / 10**6, weights, atol=0.005)


def test_categorical_errors():
    rng = RngStream(4)
    with pytest.raises(NegativeWeight):
        sample_categorical(rng, np.array([-0.1, 1.1]))
    with pytest.raises(UnnormalizedWeights):
        sample_categorical(rng, np.array([0.5, 0.4]))


# --- eigenvalues -------------------------------------------------------------

def test_eigenvalues_zero_matrix():
    np.testing.assert_allclose(eigenvalues(np.zeros((2, 2))), np.zeros(2))


def test_eigenvalues_uniform_generator(fast_gen_5):
    # 8*J - 40*I with J the all-ones matrix: spectrum {0, -40 x4}
    lam = np.sort(eigenvalues(fast_gen_5.q).real)
    np.testing.assert_allclose(lam, [-40, -40, -40, -40, 0], atol=1e-10)


def test_eigenvalues_against_char_poly_roots(slow_gen_a):
    lam = eigenvalues(slow_gen_a.q)
    roots = durand_kerner_roots(char_poly(slow_gen_a.q))
    # the double root at -0.7 caps root-finder accuracy near sqrt(eps)
    assert np.max(np.abs(np.sort_complex(lam) - np.sort_complex(roots))) < 1e-6
    # one zero eigenvalue forced by zero row sums, the rest strictly stable
    lam_sorted = np.sort(lam.real)
    assert abs(lam_sorted[-1]) < 1e-12
    assert np.all(lam_sorted[:-1] < -1e-6)


def test_eigenvalues_nonfinite():
    with pytest.raises(NonFiniteEntry):
        eigenvalues(np.array([[np.nan, 0.0], [0.0, 1.0]]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_eigenvalue_sum_and_product_match_trace_det(seed):
    a = RngStream(seed).generator.standard_normal((4, 4))
    lam = eigenvalues(a)
    scale = max(np.linalg.norm(a), 1.0)
    assert abs(lam.sum().real - np.trace(a)) < 1e-8 * scale
    assert abs(lam.sum().imag) < 1e-8 * scale
    assert abs(np.prod(lam) - np.linalg.det(a)) < 1e-8 * scale**4


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_eigenvalues_conjugate_pairs(seed):
    a = RngStream(seed).generator.standard_normal((5, 5))
    lam = eigenvalues(a)
    np.testing.assert_allclose(np.sort_complex(lam),
                               np.sort_complex(lam.conj()), atol=1e-9)


# --- matrix exponential ------------------------------------------------------

def test_matrix_exp_t_zero_is_identity():
    a = np.arange(9.0).reshape(3, 3)
    np.testing.assert_allclose(matrix_exp(a, 0.0), np.eye(3), atol=1e-14)


def test_matrix_exp_diagonal():
    out = matrix_exp(np.diag([-1.0, -2.0]), 1.0)
    np.testing.assert_allclose(out, np.diag([np.exp(-1), np.exp(-2)]),
                               atol=1e-12)


def test_matrix_exp_generator_rows_stochastic(slow_gen_a):
    for t in (0.1, 1.0, 10.0, 100.0):
        p = matrix_exp(slow_gen_a.q, t)
        assert np.all(p >= -1e-12)
        np.testing.assert_allclose(p.sum(axis=1), np.ones(5), atol=1e-10)


def test_matrix_exp_semigroup(slow_gen_a):
    s, t = 0.7, 1.9
    left = matrix_exp(slow_gen_a.q, s + t)
    right = matrix_exp(slow_gen_a.q, s) @ matrix_exp(slow_gen_a.q, t)
    assert np.max(np.abs(left - right)) < 1e-8


def test_matrix_exp_guards():
    with pytest.raises(NormOverflow):
        matrix_exp(np.full((2, 2), 1e5), 1e3)
    with pytest.raises(NonFiniteEntry):
        matrix_exp(np.array([[np.inf, 0.0], [0.0, 0.0]]), 1.0)


# --- quadrature --------------------------------------------------------------

def test_quadrature_constant():
    assert quadrature(lambda t: 1.0, 0.0, 1.0, 1e-12) == pytest.approx(1.0)


def test_quadrature_exponential_closed_form():
    gamma, h = 1.5, 0.1
    val = quadrature(lambda t: np.exp(-2 * gamma * t), 0.0, h, 1e-13)
    assert val == pytest.approx((1 - np.exp(-0.3)) / 3.0, abs=1e-12)


def test_quadrature_empty_interval():
    assert quadrature(np.sin, 2.0, 2.0, 1e-12) == 0.0


def test_quadrature_subdivision_limit():
    with pytest.raises(SubdivisionLimit):
        quadrature(lambda t: np.sqrt(abs(t - 0.31)), 0.0, 1.0, 1e-15,
                   max_depth=4)


def test_quadrature_polynomial_sharp():
    # Simpson with Richardson is exact through degree 4 panels; a degree-7
    # polynomial still converges tightly under subdivision
    val = quadrature(lambda t: t**7, 0.0, 2.0, 1e-12)
    assert val == pytest.approx(2.0**8 / 8.0, rel=1e-11)
