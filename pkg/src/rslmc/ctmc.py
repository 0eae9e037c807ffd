"""Finite-state continuous-time Markov chains driving the regime switching.

A regime process is specified by a generator (Q-matrix) together with the
regime values it modulates (stepsize multipliers or friction coefficients).
This module validates generators, simulates the chain exactly and through its
first-order discrete kernel, and computes the stationary, spectral, and
exponential-functional quantities the convergence bounds are built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import (
    NegativeOffDiagonal,
    NotIrreducible,
    RowSumNonzero,
    SingularSolve,
    StepsizeTooLarge,
)
from .numerics import RngStream

__all__ = [
    "GeneratorMatrix",
    "RegimeSpec",
    "ContinuousPath",
    "validate_generator",
    "stationary_distribution",
    "discrete_kernel",
    "simulate_discrete_chain",
    "simulate_exact_path",
    "spectral_rate",
    "survival_functional",
    "make_regime_spec",
]

ROW_SUM_TOL = 1e-10
STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class GeneratorMatrix:
    """A validated N x N transition-rate matrix; construct via validate_generator."""

    q: np.ndarray

    @property
    def n_states(self) -> int:
        return self.q.shape[0]

    @property
    def exit_rates(self) -> np.ndarray:
        """Total exit rate from each state (the negated diagonal)."""
        return -np.diag(self.q)


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [start]
    seen[start] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(adj[i])[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return seen


def validate_generator(q: np.ndarray) -> GeneratorMatrix:
    """Check rate-matrix structure row by row, then strong connectivity."""
    q = np.array(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError(f"generator must be square, got shape {q.shape}")
    n = q.shape[0]
    if not np.all(np.isfinite(q)):
        raise ValueError("generator has non-finite entries")
    for i in range(n):
        off_cols = np.delete(np.arange(n), i)
        bad = off_cols[q[i, off_cols] < 0]
        if bad.size:
            j = int(bad[0])
            raise NegativeOffDiagonal(f"q[{i},{j}] = {q[i, j]} < 0")
        s = q[i].sum()
        if abs(s) > ROW_SUM_TOL:
            raise RowSumNonzero(f"row {i} sums to {s!r}")
    adj = q > 0
    np.fill_diagonal(adj, False)
    if n > 1:
        fwd = _reachable(adj, 0)
        bwd = _reachable(adj.T, 0)
        if not (fwd.all() and bwd.all()):
            raise NotIrreducible("transition graph is not strongly connected")
    q.setflags(write=False)
    return GeneratorMatrix(q)


@dataclass(frozen=True)
class RegimeSpec:
    """Regime values paired with their switching generator and initial law."""

    values: np.ndarray
    generator: GeneratorMatrix
    initial_law: np.ndarray

    @property
    def n_states(self) -> int:
        return len(self.values)

    @property
    def value_min(self) -> float:
        return float(self.values.min())

    @property
    def value_max(self) -> float:
        return float(self.values.max())


def make_regime_spec(values, generator: GeneratorMatrix | np.ndarray,
                     initial_law=None) -> RegimeSpec:
    """Build a RegimeSpec; the initial law defaults to the stationary one."""
    if not isinstance(generator, GeneratorMatrix):
        generator = validate_generator(generator)
    values = np.array(values, dtype=float)
    if values.ndim != 1 or len(values) != generator.n_states:
        raise ValueError(
            f"need {generator.n_states} regime values, got shape {values.shape}")
    if np.any(values <= 0):
        raise ValueError("regime values must be strictly positive")
    if initial_law is None:
        initial_law = stationary_distribution(generator)
    initial_law = np.array(initial_law, dtype=float)
    if np.any(initial_law < 0) or abs(initial_law.sum() - 1.0) > 1e-12:
        raise ValueError("initial law must be a probability row")
    values.setflags(write=False)
    initial_law.setflags(write=False)
    return RegimeSpec(values, generator, initial_law)


@dataclass(frozen=True)
class ContinuousPath:
    """A realized trajectory of the regime chain up to end_time.

    states[k] holds on [jump_times[k], jump_times[k+1]), with the final
    interval closing at end_time.
    """

    jump_times: np.ndarray
    states: np.ndarray
    end_time: float

    def state_at(self, t: float) -> int:
        k = int(np.searchsorted(self.jump_times, t, side="right")) - 1
        return int(self.states[k])

    def occupation_fractions(self, n_states: int) -> np.ndarray:
        """Fraction of [0, end_time] spent in each state."""
        bounds = np.append(self.jump_times, self.end_time)
        lengths = np.diff(bounds)
        frac = np.bincount(self.states, weights=lengths, minlength=n_states)
        return frac / self.end_time

    def integrate(self, values: np.ndarray, t: float | None = None) -> float:
        """Time integral of values[state(s)] ds over [0, t]."""
        if t is None:
            t = self.end_time
        bounds = np.minimum(np.append(self.jump_times, self.end_time), t)
        lengths = np.clip(np.diff(bounds), 0.0, None)
        return float(np.dot(np.asarray(values)[self.states], lengths))


def stationary_distribution(g: GeneratorMatrix) -> np.ndarray:
    """The unique probability row psi with psi Q = 0."""
    n = g.n_states
    a = g.q.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        psi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSolve(str(exc)) from exc
    residual = np.max(np.abs(psi @ g.q))
    scale = max(np.max(np.abs(g.q)), 1.0)
    if residual > 1e-12 * scale or np.any(psi < -1e-12):
        raise SingularSolve(f"stationary solve residual {residual:g}")
    psi = np.clip(psi, 0.0, None)
    return psi / psi.sum()


def discrete_kernel(g: GeneratorMatrix, eta: float) -> np.ndarray:
    """First-order transition kernel P = I + eta*Q; requires q_i*eta <= 1."""
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    worst = float(np.max(g.exit_rates) * eta)
    if worst > 1.0:
        raise StepsizeTooLarge(
            f"max exit rate times eta is {worst:g} > 1; shrink the stepsize")
    return np.eye(g.n_states) + eta * g.q


def _cumulative_rows(p: np.ndarray) -> list:
    cum = np.cumsum(p, axis=1)
    cum[:, -1] = np.maximum(cum[:, -1], 1.0)
    return [row.tolist() for row in cum]


def simulate_discrete_chain(p: np.ndarray, initial_law: np.ndarray, k: int,
                            rng: RngStream) -> np.ndarray:
    """K steps of the Markov chain with kernel p, first index from initial_law."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.max(np.abs(p.sum(axis=1) - 1.0)) > STOCHASTIC_TOL:
        raise ValueError("kernel is not row-stochastic within 1e-12")
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    out = np.empty(k, dtype=np.int64)
    idx = numerics.sample_categorical(rng, initial_law)
    out[0] = idx
    if k == 1:
        return out
    rows = _cumulative_rows(p)
    us = rng.generator.random(k - 1).tolist()
    row = rows[idx]
    n_last = len(row) - 1
    for step, u in enumerate(us, start=1):
        j = 0
        while j < n_last and row[j] < u:
            j += 1
        out[step] = j
        idx = j
        row = rows[j]
    return out


def simulate_exact_path(g: GeneratorMatrix, initial_law: np.ndarray, t_end: float,
                        rng: RngStream) -> ContinuousPath:
    """Exact CTMC simulation: exponential holding times, embedded jump chain."""
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    n = g.n_states
    exit_rates = g.exit_rates
    jump_cum = []
    for i in range(n):
        rate = exit_rates[i]
        if rate > 0:
            row = np.clip(g.q[i], 0.0, None)
            row[i] = 0.0
            cum = np.cumsum(row / rate)
            cum[-1] = max(cum[-1], 1.0)
            jump_cum.append(cum.tolist())
        else:
            jump_cum.append(None)
    gen = rng.generator
    state = numerics.sample_categorical(rng, initial_law)
    times = [0.0]
    states = [state]
    t = 0.0
    while True:
        rate = exit_rates[state]
        if rate <= 0:
            break
        t += gen.exponential(1.0 / rate)
        if t >= t_end:
            break
        u = gen.random()
        row = jump_cum[state]
        j = 0
        last = len(row) - 1
        while j < last and row[j] < u:
            j += 1
        state = j
        times.append(t)
        states.append(state)
    return ContinuousPath(np.array(times), np.array(states, dtype=np.int64),
                          float(t_end))


def spectral_rate(g: GeneratorMatrix, c: float, values: np.ndarray) -> float:
    """Decay rate alpha = -max Re lambda(Q - c*diag(values))."""
    values = np.asarray(values, dtype=float)
    lam = numerics.eigenvalues(g.q - c * np.diag(values))
    return float(-np.max(lam.real))


def survival_functional(g: GeneratorMatrix, values: np.ndarray, psi: np.ndarray,
                        c: float, t: float) -> float:
    """psi^T exp((Q - c*diag(values)) t) 1.

    Equals the expectation of exp(-c * integral of the regime value over
    [0, t]) when the chain starts from psi.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    values = np.asarray(values, dtype=float)
    e = numerics.matrix_exp(g.q - c * np.diag(values), t)
    return float(np.asarray(psi) @ e @ np.ones(g.n_states))
