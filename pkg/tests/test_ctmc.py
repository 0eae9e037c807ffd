import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rslmc.ctmc import (
    discrete_kernel,
    make_regime_spec,
    simulate_discrete_chain,
    simulate_exact_path,
    spectral_rate,
    stationary_distribution,
    survival_functional,
    validate_generator,
)
from rslmc.errors import (
    NegativeOffDiagonal,
    NotIrreducible,
    RowSumNonzero,
    StepsizeTooLarge,
)
from rslmc.numerics import RngStream, matrix_exp

# The 4x5 generator printed for the logistic benchmark is malformed: the
# first diagonal entry has the wrong sign (row sums to 1.2) and one row is a
# shifted duplicate. Squared off verbatim, validation must reject row 0 first.
MALFORMED_LOGISTIC_GEN = np.array([
    [0.6, 0.2, 0.2, 0.1, 0.1],
    [0.1, -0.5, 0.2, 0.1, 0.1],
    [0.1, -0.5, 0.2, 0.1, 0.1],
    [0.1, 0.1, 0.2, -0.6, 0.2],
    [0.1, 0.1, 0.2, 0.2, -0.6],
])


def tv_distance(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


# --- validation --------------------------------------------------------------

def test_validate_accepts_benchmark_generators(slow_gen_a, slow_gen_b,
                                               fast_gen_5, fast_gen_4):
    for g in (slow_gen_a, slow_gen_b, fast_gen_5, fast_gen_4):
        assert g.q.shape[0] == g.q.shape[1]


def test_validate_single_state():
    g = validate_generator(np.zeros((1, 1)))
    assert g.n_states == 1


def test_validate_malformed_logistic_generator():
    with pytest.raises(RowSumNonzero, match="row 0"):
        validate_generator(MALFORMED_LOGISTIC_GEN)


def test_validate_negative_off_diagonal():
    q = np.array([[-1.0, 1.0], [2.0, -2.0]])
    q[0, 1] = -1.0
    q[0, 0] = 1.0  # keep the row sum at zero so the sign check fires
    with pytest.raises(NegativeOffDiagonal):
        validate_generator(q)


def test_validate_not_irreducible():
    q = np.array([
        [-1.0, 1.0, 0.0, 0.0],
        [1.0, -1.0, 0.0, 0.0],
        [0.0, 0.0, -2.0, 2.0],
        [0.0, 0.0, 2.0, -2.0],
    ])
    with pytest.raises(NotIrreducible):
        validate_generator(q)


def test_validate_rejects_non_square():
    with pytest.raises(ValueError):
        validate_generator(np.zeros((2, 3)))


# --- stationary distribution --------------------------------------------------

def test_stationary_uniform_for_symmetric(fast_gen_5):
    np.testing.assert_allclose(stationary_distribution(fast_gen_5),
                               np.full(5, 0.2), atol=1e-13)


def test_stationary_solves_balance(slow_gen_a):
    psi = stationary_distribution(slow_gen_a)
    assert np.max(np.abs(psi @ slow_gen_a.q)) < 1e-12
    assert psi.sum() == pytest.approx(1.0, abs=1e-14)


def test_stationary_single_state():
    g = validate_generator(np.zeros((1, 1)))
    np.testing.assert_array_equal(stationary_distribution(g), [1.0])


def test_stationary_matches_long_run_occupation(slow_gen_a):
    psi = stationary_distribution(slow_gen_a)
    path = simulate_exact_path(slow_gen_a, psi, 1e5, RngStream(10))
    occ = path.occupation_fractions(5)
    assert tv_distance(occ, psi) < 1e-2


# --- discrete kernel ----------------------------------------------------------

def test_kernel_first_row(slow_gen_a):
    p = discrete_kernel(slow_gen_a, 0.1)
    np.testing.assert_allclose(p[0], [0.94, 0.02, 0.02, 0.01, 0.01],
                               atol=1e-15)
    np.testing.assert_allclose(p.sum(axis=1), np.ones(5), atol=1e-15)


def test_kernel_small_eta_near_identity(slow_gen_a):
    p = discrete_kernel(slow_gen_a, 1e-9)
    assert np.max(np.abs(p - np.eye(5))) < 1e-9


def test_kernel_stepsize_guard(fast_gen_5):
    with pytest.raises(StepsizeTooLarge):
        discrete_kernel(fast_gen_5, 0.05)  # exit rate 32 gives 1.6 > 1


def test_kernel_preserves_stationary_law(slow_gen_a):
    psi = stationary_distribution(slow_gen_a)
    p = discrete_kernel(slow_gen_a, 0.8)
    np.testing.assert_allclose(psi @ p, psi, atol=1e-12)


def test_kernel_close_to_exact_semigroup(slow_gen_a):
    # first-order kernel agrees with the exact one to the Taylor remainder
    norm = np.linalg.norm(slow_gen_a.q, np.inf)
    for eta in (0.01, 0.1, 0.5):
        diff = np.max(np.abs(matrix_exp(slow_gen_a.q, eta)
                             - discrete_kernel(slow_gen_a, eta)))
        assert diff <= norm**2 * eta**2 * np.exp(norm * eta)


# --- chain simulation ----------------------------------------------------------

def test_discrete_chain_identity_kernel():
    chain = simulate_discrete_chain(np.eye(3), np.array([0.2, 0.5, 0.3]),
                                    1000, RngStream(11))
    assert len(set(chain.tolist())) == 1


def test_discrete_chain_single_step():
    chain = simulate_discrete_chain(np.eye(2), np.array([0.0, 1.0]), 1,
                                    RngStream(12))
    np.testing.assert_array_equal(chain, [1])


def test_discrete_chain_hits_stationary_frequencies(slow_gen_a):
    psi = stationary_distribution(slow_gen_a)
    p = discrete_kernel(slow_gen_a, 0.01)
    chain = simulate_discrete_chain(p, psi, 10**6, RngStream(13))
    freq = np.bincount(chain, minlength=5) / len(chain)
    assert tv_distance(freq, psi) < 1e-2


def test_exact_path_single_state():
    g = validate_generator(np.zeros((1, 1)))
    path = simulate_exact_path(g, np.array([1.0]), 5.0, RngStream(14))
    np.testing.assert_array_equal(path.jump_times, [0.0])
    np.testing.assert_array_equal(path.states, [0])
    assert path.end_time == 5.0


def test_exact_path_mean_holding_time(fast_gen_4):
    # every state exits at rate 36, so holding times average 1/36
    path = simulate_exact_path(fast_gen_4, np.full(4, 0.25), 3000.0,
                               RngStream(15))
    holds = np.diff(path.jump_times)
    assert len(holds) > 10**5
    assert abs(holds.mean() - 1 / 36) < 0.01 / 36


def test_path_integrate_single_state():
    g = validate_generator(np.zeros((1, 1)))
    path = simulate_exact_path(g, np.array([1.0]), 4.0, RngStream(16))
    assert path.integrate(np.array([2.5])) == pytest.approx(10.0)
    assert path.integrate(np.array([2.5]), t=1.5) == pytest.approx(3.75)


# --- spectral quantities --------------------------------------------------------

def test_spectral_rate_zero_cost(slow_gen_a):
    assert spectral_rate(slow_gen_a, 0.0, np.ones(5)) == pytest.approx(0.0, abs=1e-12)


def test_spectral_rate_uniform_shift(fast_gen_5):
    # Q - I has spectrum {-1, -41 x4}
    assert spectral_rate(fast_gen_5, 1.0, np.ones(5)) == pytest.approx(1.0, abs=1e-10)


def test_spectral_rate_scalar_case():
    g = validate_generator(np.zeros((1, 1)))
    assert spectral_rate(g, 2.0, np.array([3.0])) == pytest.approx(6.0)


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0))
@settings(max_examples=25, deadline=None)
def test_spectral_rate_positive(slow_gen_a, c, scale):
    values = scale * np.array([0.6, 0.8, 1.0, 1.2, 1.4])
    assert spectral_rate(slow_gen_a, c, values) > 0


def test_survival_at_zero(wide_spec):
    psi = stationary_distribution(wide_spec.generator)
    assert survival_functional(wide_spec.generator, wide_spec.values, psi,
                               2.0, 0.0) == pytest.approx(1.0)


def test_survival_no_cost_is_one(wide_spec):
    psi = stationary_distribution(wide_spec.generator)
    for t in (0.5, 3.0, 20.0):
        assert survival_functional(wide_spec.generator, wide_spec.values, psi,
                                   0.0, t) == pytest.approx(1.0, abs=1e-12)


def test_survival_single_state_closed_form():
    g = validate_generator(np.zeros((1, 1)))
    val = survival_functional(g, np.array([1.7]), np.array([1.0]), 2.0, 0.9)
    assert val == pytest.approx(np.exp(-2.0 * 1.7 * 0.9), rel=1e-12)


def test_survival_nonincreasing_in_time(wide_spec):
    psi = stationary_distribution(wide_spec.generator)
    grid = np.linspace(0.0, 5.0, 41)
    vals = [survival_functional(wide_spec.generator, wide_spec.values, psi,
                                2.0, t) for t in grid]
    assert np.all(np.diff(vals) <= 1e-12)


def test_regime_spec_defaults_to_stationary(slow_gen_a):
    spec = make_regime_spec([0.1, 1.0, 1.8, 2.6, 4.0], slow_gen_a)
    np.testing.assert_allclose(spec.initial_law,
                               stationary_distribution(slow_gen_a), atol=1e-14)
    assert spec.value_min == 0.1
    assert spec.value_max == 4.0


def test_regime_spec_rejects_nonpositive_values(slow_gen_a):
    with pytest.raises(ValueError):
        make_regime_spec([0.5, 0.6, 0.7, 0.8, 0.0], slow_gen_a)
