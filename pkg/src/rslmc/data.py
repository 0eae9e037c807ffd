"""Synthetic data generators and CSV ingestion for the benchmark problems."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ParseError, SchemaMismatch, UnknownClass
from .models import LinRegProblem, LogRegProblem
from .numerics import RngStream

__all__ = [
    "Dataset",
    "CsvSchema",
    "StandardizeParams",
    "gen_linreg",
    "gen_logreg",
    "load_csv",
    "binarize_labels",
    "standardize",
    "fnv1a64",
    "to_logreg_problem",
]

LINREG_TRUE_COEFFICIENTS = np.array([1.0, -0.7, 0.5])
LINREG_FEATURE_VARIANCE = 0.5
LINREG_NOISE_VARIANCE = 0.25
LOGREG_FEATURE_VARIANCE = 2.0


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a digest, used to record dataset provenance stably."""
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels_or_responses: np.ndarray
    schema: tuple
    provenance: dict

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class CsvSchema:
    """Column layout of an input CSV: (name, kind) pairs with kind in
    {"float", "label"}; exactly one label column."""

    columns: tuple
    has_header: bool = False
    expected_rows: Optional[int] = None

    def __post_init__(self):
        kinds = [kind for _, kind in self.columns]
        if kinds.count("label") != 1:
            raise ValueError("schema needs exactly one label column")
        if any(kind not in ("float", "label") for kind in kinds):
            raise ValueError(f"unknown column kind in {kinds}")


def gen_linreg(n: int, rng: RngStream, prior_variance: float = 1.0) -> LinRegProblem:
    """Synthetic linear-regression data: 3 Gaussian features with variance
    0.5, responses from fixed true coefficients plus noise of variance 0.25."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gen = rng.generator
    feats = gen.standard_normal((n, 3)) * np.sqrt(LINREG_FEATURE_VARIANCE)
    noise = gen.standard_normal(n) * np.sqrt(LINREG_NOISE_VARIANCE)
    responses = feats @ LINREG_TRUE_COEFFICIENTS + noise
    return LinRegProblem(feats, responses, prior_variance,
                         LINREG_TRUE_COEFFICIENTS.copy())


def gen_logreg(n: int, d: int, prior_variance: float,
               rng: RngStream) -> tuple[LogRegProblem, np.ndarray]:
    """Synthetic logistic data: coefficients drawn once from the prior,
    Gaussian features with variance 2, Bernoulli labels through the sigmoid.

    Returns the problem and the generating coefficient vector.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    gen = rng.generator
    coef = gen.standard_normal(d) * np.sqrt(prior_variance)
    feats = gen.standard_normal((n, d)) * np.sqrt(LOGREG_FEATURE_VARIANCE)
    uniforms = gen.random(n)
    probs = 1.0 / (1.0 + np.exp(-(feats @ coef)))
    labels = (uniforms <= probs).astype(float)
    return LogRegProblem(feats, labels, prior_variance), coef


def load_csv(path, schema: CsvSchema) -> Dataset:
    """Parse a comma-separated file under the given schema.

    Raises FileNotFoundError, ParseError (with 1-based row index), or
    SchemaMismatch; records the file's FNV-1a content hash in provenance.
    """
    path = Path(path)
    raw = path.read_bytes()
    digest = fnv1a64(raw)
    names = [name for name, _ in schema.columns]
    label_idx = next(i for i, (_, kind) in enumerate(schema.columns)
                     if kind == "label")
    feature_idx = [i for i, (_, kind) in enumerate(schema.columns)
                   if kind == "float"]
    rows = []
    labels = []
    reader = csv.reader(raw.decode("utf-8").splitlines())
    for lineno, row in enumerate(reader, start=1):
        if lineno == 1 and schema.has_header:
            continue
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(schema.columns):
            raise SchemaMismatch(
                f"row {lineno}: {len(row)} columns, schema has "
                f"{len(schema.columns)}")
        values = np.empty(len(feature_idx))
        for out_col, col in enumerate(feature_idx):
            try:
                values[out_col] = float(row[col])
            except ValueError as exc:
                raise ParseError(lineno, col + 1, str(exc)) from exc
        rows.append(values)
        labels.append(row[label_idx].strip())
    if not rows:
        raise SchemaMismatch("file contains no data rows")
    if schema.expected_rows is not None and len(rows) != schema.expected_rows:
        raise SchemaMismatch(
            f"expected {schema.expected_rows} rows, found {len(rows)}")
    return Dataset(
        features=np.vstack(rows),
        labels_or_responses=np.array(labels, dtype=object),
        schema=tuple(names),
        provenance={"path": str(path), "fnv1a64": f"{digest:016x}"})


def binarize_labels(ds: Dataset, positive_class: str) -> Dataset:
    """Map the label column to 1 for positive_class and 0 otherwise."""
    labels = ds.labels_or_responses
    present = set(str(label) for label in labels)
    if positive_class not in present:
        raise UnknownClass(
            f"{positive_class!r} not among classes {sorted(present)}")
    binary = np.array([1.0 if str(label) == positive_class else 0.0
                       for label in labels])
    prov = dict(ds.provenance, positive_class=positive_class)
    return Dataset(ds.features, binary, ds.schema, prov)


@dataclass(frozen=True)
class StandardizeParams:
    mean: np.ndarray
    scale: np.ndarray

    def apply(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.scale

    def invert(self, features: np.ndarray) -> np.ndarray:
        return features * self.scale + self.mean


def standardize(ds: Dataset) -> tuple[Dataset, StandardizeParams]:
    """Center each feature column and scale it to unit sample variance;
    zero-variance columns stay centered with scale 1."""
    mean = ds.features.mean(axis=0)
    if ds.n > 1:
        std = ds.features.std(axis=0, ddof=1)
    else:
        std = np.zeros(ds.dim)
    scale = np.where(std > 0.0, std, 1.0)
    params = StandardizeParams(mean, scale)
    prov = dict(ds.provenance, standardized=True)
    return Dataset(params.apply(ds.features), ds.labels_or_responses,
                   ds.schema, prov), params


def to_logreg_problem(ds: Dataset, prior_variance: float,
                      add_intercept: bool = False) -> LogRegProblem:
    """Wrap a binarized dataset as a logistic-regression target."""
    feats = ds.features
    if add_intercept:
        feats = np.hstack([feats, np.ones((ds.n, 1))])
    return LogRegProblem(feats, np.asarray(ds.labels_or_responses, dtype=float),
                         prior_variance)
