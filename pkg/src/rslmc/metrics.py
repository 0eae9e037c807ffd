"""Distances and task metrics: Wasserstein estimators, MSE, accuracy, moments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPSD, TooFewSamples
from .models import LinRegProblem, LogRegProblem
from .samplers import Trace

__all__ = [
    "MetricSeries",
    "gaussian_w2",
    "empirical_w2_1d",
    "mse_series",
    "accuracy",
    "accuracy_series",
    "moment_diagnostics",
]

PSD_TOL = 1e-10


@dataclass(frozen=True)
class MetricSeries:
    name: str
    iterations: np.ndarray
    values: np.ndarray
    iteration_stride: int


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    a = 0.5 * (a + a.T)
    eigs, vecs = np.linalg.eigh(a)
    scale = max(abs(eigs[-1]), 1.0)
    if eigs[0] < -PSD_TOL * scale:
        raise NotPSD(f"matrix has eigenvalue {eigs[0]:g} < 0")
    return (vecs * np.sqrt(np.clip(eigs, 0.0, None))) @ vecs.T


def gaussian_w2(mu1: np.ndarray, sigma1: np.ndarray, mu2: np.ndarray,
                sigma2: np.ndarray) -> float:
    """Closed-form 2-Wasserstein distance between two Gaussians."""
    mu1, mu2 = np.atleast_1d(mu1).astype(float), np.atleast_1d(mu2).astype(float)
    sigma1, sigma2 = np.atleast_2d(sigma1), np.atleast_2d(sigma2)
    root2 = _psd_sqrt(sigma2)
    cross = _psd_sqrt(root2 @ sigma1 @ root2)
    mean_part = float(np.sum((mu1 - mu2) ** 2))
    trace_part = float(np.trace(sigma1) + np.trace(sigma2) - 2.0 * np.trace(cross))
    return float(np.sqrt(max(mean_part + trace_part, 0.0)))


def empirical_w2_1d(samples: np.ndarray, target_quantile) -> float:
    """Quantile-coupling estimator of W2 between 1D samples and a target law.

    Matches the i-th order statistic against the target quantile at
    (i - 1/2)/n; consistent as n grows.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    n = len(samples)
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    order = np.sort(samples)
    grid = (np.arange(1, n + 1) - 0.5) / n
    try:
        quantiles = np.asarray(target_quantile(grid), dtype=float)
        if quantiles.shape != grid.shape:
            raise TypeError("quantile function is not vectorized")
    except (TypeError, ValueError):
        quantiles = np.array([float(target_quantile(p)) for p in grid])
    return float(np.sqrt(np.mean((order - quantiles) ** 2)))


def mse_series(trace: Trace, problem: LinRegProblem) -> MetricSeries:
    """Mean squared residual of each recorded iterate on the training data."""
    if trace.states.shape[1] != problem.dim:
        raise DimensionMismatch(
            f"trace dimension {trace.states.shape[1]} != problem {problem.dim}")
    preds = trace.states @ problem.features.T
    vals = np.mean((problem.responses[None, :] - preds) ** 2, axis=1)
    return MetricSeries("mse", trace.iterations, vals, trace.thinning)


def accuracy(c: np.ndarray, problem: LogRegProblem) -> float:
    """Fraction of correct labels under the linear rule; boundary predicts 1."""
    c = np.asarray(c, dtype=float)
    if c.shape != (problem.dim,):
        raise DimensionMismatch(
            f"coefficient shape {c.shape} != ({problem.dim},)")
    predicted = (problem.features @ c >= 0.0).astype(float)
    return float(np.mean(predicted == problem.labels))


def accuracy_series(trace: Trace, problem: LogRegProblem) -> MetricSeries:
    if trace.states.shape[1] != problem.dim:
        raise DimensionMismatch(
            f"trace dimension {trace.states.shape[1]} != problem {problem.dim}")
    scores = trace.states @ problem.features.T
    predicted = (scores >= 0.0).astype(float)
    vals = np.mean(predicted == problem.labels[None, :], axis=1)
    return MetricSeries("accuracy", trace.iterations, vals, trace.thinning)


def moment_diagnostics(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and unbiased sample covariance of row-stacked samples."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] < 2:
        raise TooFewSamples(f"need at least 2 samples, got {samples.shape[0]}")
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / (samples.shape[0] - 1)
    return mean, cov
