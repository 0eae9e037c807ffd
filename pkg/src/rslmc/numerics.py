"""Deterministic random streams and small dense linear-algebra kernels.

Everything here is seed-reproducible: the random streams are counter-based
(Philox) so the same (seed, stream path) gives bit-identical output on any
platform, and derived sub-streams are independent by construction.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    IterationLimitExceeded,
    NegativeWeight,
    NonFiniteEntry,
    NormOverflow,
    SubdivisionLimit,
    UnnormalizedWeights,
)

__all__ = [
    "RngStream",
    "standard_normal",
    "sample_categorical",
    "eigenvalues",
    "matrix_exp",
    "quadrature",
]

WEIGHT_SUM_TOL = 1e-12
MAX_EXP_NORM = 1e6  # guard against exp() of absurdly scaled inputs


class RngStream:
    """A single-owner random stream keyed by (seed, spawn path).

    Sub-streams created with :meth:`substream` use distinct spawn keys of the
    underlying ``SeedSequence``, which guarantees non-overlapping, pairwise
    independent streams. A stream must not be shared across concurrent
    consumers; give each chain its own sub-stream instead.
    """

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.generator = np.random.Generator(np.random.Philox(seq))

    def substream(self, stream_id: int) -> "RngStream":
        """Derive the independent sub-stream with the given id."""
        return RngStream(self.seed, self.path + (int(stream_id),))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"


def standard_normal(rng: RngStream, n: int) -> np.ndarray:
    """Draw n i.i.d. standard normal variates, advancing the stream."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return rng.generator.standard_normal(n)


def sample_categorical(rng: RngStream, weights: np.ndarray) -> int:
    """Draw an index with the given probabilities by inverse CDF.

    Ties at cumulative thresholds break toward the lower index. Weights must
    be nonnegative and sum to 1 within 1e-12.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise NegativeWeight(f"negative weight in {w}")
    total = w.sum()
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise UnnormalizedWeights(f"weights sum to {total!r}, expected 1")
    cum = np.cumsum(w)
    cum[-1] = max(cum[-1], 1.0)
    u = rng.generator.random()
    return int(np.searchsorted(cum, u, side="left"))


def _check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntry("matrix contains non-finite entries")


def eigenvalues(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a real square matrix, as a complex array.

    Backed by LAPACK's QR/real-Schur iteration; intended for N <= 16.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    _check_finite(a)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise IterationLimitExceeded(str(exc)) from exc


def matrix_exp(a: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(a*t) by scaling-and-squaring (Pade core), for small dense a."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    _check_finite(a)
    scaled = a * t
    if np.max(np.abs(scaled), initial=0.0) > MAX_EXP_NORM:
        raise NormOverflow(f"||a*t|| exceeds {MAX_EXP_NORM:g}")
    from scipy.linalg import expm

    return expm(scaled)


def quadrature(f, a: float, b: float, tol: float = 1e-10,
               max_depth: int = 60) -> float:
    """Adaptive Simpson integral of a smooth f over [a, b].

    The error of each panel is estimated by Richardson comparison of one and
    two Simpson panels; panels are split until the local estimate fits within
    the proportional share of tol. Used as the independent oracle for every
    closed-form integral in the toolkit.
    """
    if a > b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, budget, depth):
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        if not (np.isfinite(fl) and np.isfinite(fr)):
            raise NonFiniteEntry(f"integrand non-finite near [{x0}, {x2}]")
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        err = (left + right - whole) / 15.0
        if abs(err) <= budget or (x2 - x0) <= abs(xm) * 1e-15:
            return left + right + err
        if depth >= max_depth:
            raise SubdivisionLimit(
                f"no convergence on [{x0}, {x2}] after {max_depth} splits")
        half = budget / 2.0
        return (recurse(x0, xm, f0, fl, f1, left, half, depth + 1)
                + recurse(xm, x2, f1, fr, f2, right, half, depth + 1))

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    if not (np.isfinite(fa) and np.isfinite(fm) and np.isfinite(fb)):
        raise NonFiniteEntry("integrand non-finite on [a, b]")
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, float(tol), 0)
