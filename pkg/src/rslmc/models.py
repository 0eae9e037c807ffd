"""Target potentials: quadratic, Bayesian linear and logistic regression.

A potential packages the negative log-density f together with its gradient,
per-datapoint gradients for minibatching, and the strong-convexity/smoothness
pair (m, M) that every stepsize guard and convergence bound consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import expit

from .errors import BatchLargerThanDataset, NotPositiveDefinite
from .numerics import RngStream

__all__ = [
    "Potential",
    "LinRegProblem",
    "LogRegProblem",
    "quadratic_potential",
    "linreg_potential",
    "logreg_potential",
    "stochastic_gradient",
]


@dataclass(frozen=True)
class Potential:
    """f with gradient oracles and (m, M) constants; M >= m > 0."""

    dim: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    strong_convexity: float
    smoothness: float
    n_components: int = 0
    component_gradient: Optional[Callable[[int, np.ndarray], np.ndarray]] = None
    batch_gradient: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not (self.smoothness >= self.strong_convexity > 0):
            raise ValueError(
                f"need M >= m > 0, got m={self.strong_convexity}, "
                f"M={self.smoothness}")


@dataclass(frozen=True)
class LinRegProblem:
    """Gaussian-prior linear regression data (features a_j, responses y_j)."""

    features: np.ndarray
    responses: np.ndarray
    prior_variance: float
    true_coefficients: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class LogRegProblem:
    """Gaussian-prior logistic regression data with binary labels."""

    features: np.ndarray
    labels: np.ndarray
    prior_variance: float

    def __post_init__(self):
        if not np.all(np.isin(self.labels, (0.0, 1.0))):
            raise ValueError("labels must be binary 0/1")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def quadratic_potential(a: np.ndarray, b: np.ndarray) -> Potential:
    """f(x) = x'Ax/2 - b'x for symmetric positive-definite A; exact (m, M)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not np.allclose(a, a.T, atol=1e-12):
        raise NotPositiveDefinite("matrix is not symmetric")
    eigs = np.linalg.eigvalsh(a)
    if eigs[0] <= 0:
        raise NotPositiveDefinite(f"min eigenvalue {eigs[0]:g} <= 0")

    def value(x):
        return float(0.5 * x @ a @ x - b @ x)

    def gradient(x):
        return a @ x - b

    return Potential(dim=len(b), value=value, gradient=gradient,
                     strong_convexity=float(eigs[0]), smoothness=float(eigs[-1]))


def linreg_potential(p: LinRegProblem) -> Potential:
    """Negative log posterior of the linear model, with closed-form constants."""
    feats = p.features
    y = p.responses
    n, d = feats.shape
    lam = p.prior_variance
    gram = feats.T @ feats
    xty = feats.T @ y
    eigs = np.linalg.eigvalsh(gram)

    def value(theta):
        r = y - feats @ theta
        return float(0.5 * r @ r + theta @ theta / (2.0 * lam))

    def gradient(theta):
        return gram @ theta - xty + theta / lam

    def component_gradient(j, theta):
        a_j = feats[j]
        return (theta @ a_j - y[j]) * a_j + theta / (n * lam)

    def batch_gradient(idx, theta):
        a_b = feats[idx]
        resid = a_b @ theta - y[idx]
        return a_b.T @ resid + (len(idx) / (n * lam)) * theta

    return Potential(
        dim=d, value=value, gradient=gradient,
        strong_convexity=float(eigs[0] + 1.0 / lam),
        smoothness=float(eigs[-1] + 1.0 / lam),
        n_components=n, component_gradient=component_gradient,
        batch_gradient=batch_gradient)


def logreg_potential(p: LogRegProblem, use_label_signs: bool = True) -> Potential:
    """Negative log posterior of the logistic model.

    With use_label_signs the per-sample loss is log(1 + exp(-s_j c'X_j)) with
    s_j = 2 y_j - 1; switching it off drops the labels from the loss entirely
    (every s_j = +1), which is only useful for ablations.
    """
    feats = p.features
    n, d = feats.shape
    lam = p.prior_variance
    signs = 2.0 * p.labels - 1.0 if use_label_signs else np.ones(n)
    # Hessian of the likelihood term is bounded by sum X_j X_j' / 4.
    gram_top = float(np.linalg.eigvalsh(feats.T @ feats)[-1])
    m = 1.0 / lam
    big_m = 1.0 / lam + 0.25 * gram_top

    def value(c):
        z = signs * (feats @ c)
        return float(np.logaddexp(0.0, -z).sum() + c @ c / (2.0 * lam))

    def gradient(c):
        z = signs * (feats @ c)
        w = expit(-z)  # 1 - sigmoid(z), saturates cleanly for |z| large
        return -feats.T @ (signs * w) + c / lam

    def component_gradient(j, c):
        z = signs[j] * (feats[j] @ c)
        return -signs[j] * expit(-z) * feats[j] + c / (n * lam)

    def batch_gradient(idx, c):
        x_b = feats[idx]
        z = signs[idx] * (x_b @ c)
        w = expit(-z)
        return -x_b.T @ (signs[idx] * w) + (len(idx) / (n * lam)) * c

    return Potential(
        dim=d, value=value, gradient=gradient,
        strong_convexity=m, smoothness=big_m,
        n_components=n, component_gradient=component_gradient,
        batch_gradient=batch_gradient)


def stochastic_gradient(pot: Potential, x: np.ndarray, batch_size: int,
                        rng: RngStream) -> np.ndarray:
    """Unbiased minibatch gradient: (n/b) times the sum over a uniform
    without-replacement batch of component gradients."""
    n = pot.n_components
    if n == 0:
        raise ValueError("potential has no component structure")
    if not 1 <= batch_size <= n:
        raise BatchLargerThanDataset(
            f"batch size {batch_size} not in [1, {n}]")
    idx = rng.generator.choice(n, size=batch_size, replace=False)
    if pot.batch_gradient is not None:
        total = pot.batch_gradient(idx, x)
    else:
        total = np.zeros(pot.dim)
        for j in idx:
            total += pot.component_gradient(int(j), x)
    return (n / batch_size) * total
