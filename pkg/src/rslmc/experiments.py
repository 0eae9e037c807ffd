"""Bundled benchmark experiments and the config-driven run machinery.

An ExperimentConfig fully determines a batch of runs: one target problem, a
set of named regime specifications, and a list of algorithm curves executed
over a common seed list. Each (curve, seed) pair owns an independent random
stream keyed by the seed, so curves within a seed share their noise and are
directly comparable, while the data generation uses its own seed.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import data as data_mod
from . import metrics
from .ctmc import RegimeSpec, make_regime_spec, validate_generator
from .errors import ConfigError, MissingDataset, NonFiniteState
from .models import Potential, linreg_potential, logreg_potential
from .numerics import RngStream
from .samplers import Algorithm, SamplerConfig, Trace, run_chain

__all__ = [
    "RunSpec",
    "ExperimentConfig",
    "RunRecord",
    "config_from_dict",
    "config_from_json",
    "config_hash",
    "run_experiment",
    "bundled_experiment",
    "bundled_experiment_names",
    "write_series_csv",
]

# Switching generators used across the bundled experiments. The two slow
# 5-state generators have spectral gaps well under 1; the uniform ones mix
# fast (gaps 40 and 48).
SLOW_GEN_A = [
    [-0.6, 0.2, 0.2, 0.1, 0.1],
    [0.1, -0.5, 0.2, 0.1, 0.1],
    [0.1, 0.1, -0.5, 0.2, 0.1],
    [0.1, 0.1, 0.2, -0.6, 0.2],
    [0.1, 0.1, 0.2, 0.2, -0.6],
]
SLOW_GEN_B = [
    [-0.5, 0.2, 0.1, 0.1, 0.1],
    [0.1, -0.5, 0.2, 0.1, 0.1],
    [0.1, 0.1, -0.6, 0.2, 0.2],
    [0.1, 0.1, 0.2, -0.7, 0.3],
    [0.1, 0.1, 0.2, 0.3, -0.7],
]
FAST_GEN_5 = [[8.0] * i + [-32.0] + [8.0] * (4 - i) for i in range(5)]
FAST_GEN_4 = [[12.0] * i + [-36.0] + [12.0] * (3 - i) for i in range(4)]
# 4-state generator for the switching-friction logistic runs.
FRICTION_GEN = [
    [-0.6, 0.2, 0.2, 0.2],
    [0.1, -0.5, 0.2, 0.2],
    [0.1, 0.1, -0.5, 0.3],
    [0.1, 0.1, 0.3, -0.5],
]

STEP_SET_NARROW = [0.5, 0.6, 0.7, 0.8, 0.9]
STEP_SET_WIDE = [0.1, 1.0, 1.8, 2.6, 4.0]
STEP_SET_UNIT = [0.6, 0.8, 1.0, 1.2, 1.4]
FRICTION_SET_LOW = [0.05, 0.08, 0.1, 0.12]
FRICTION_SET_HIGH = [8.0, 10.0, 12.0, 16.0]
# Logistic runs keep the multipliers near 1 and the friction near 0.65.
LOGISTIC_STEP_SET = [0.8, 0.9, 1.0, 1.1, 1.2]
LOGISTIC_FRICTION_SET = [0.5, 0.6, 0.7, 0.8]
LOGISTIC_FRICTION = 0.65

IRIS_POSITIVE_CLASS = "Iris-setosa"
MAGIC_FILENAME = "magic04.data"


@dataclass(frozen=True)
class RunSpec:
    """One curve: an algorithm plus optional regime wiring and overrides."""

    name: str
    algorithm: Algorithm
    regime: Optional[str] = None
    friction_regime: Optional[str] = None
    friction: Optional[float] = None


@dataclass
class ExperimentConfig:
    experiment_id: str
    target: dict
    regimes: dict
    runs: list
    stepsize: float
    iterations: int
    seeds: list
    friction: float = 1.5
    burn_in: int = 0
    batch_size: Optional[int] = None
    thinning: int = 1
    metric: str = "mse"
    output_dir: str = "runs"


@dataclass
class RunRecord:
    config_hash: str
    run_name: str
    seed: int
    csv_path: str
    wall_clock: float
    diverged: bool
    stepsize_admissible: Optional[bool]
    final_value: float


def config_hash(cfg: ExperimentConfig) -> str:
    """Stable digest over the semantically meaningful fields."""
    payload = {
        "experiment_id": cfg.experiment_id,
        "target": cfg.target,
        "regimes": cfg.regimes,
        "runs": [(r.name, r.algorithm.value, r.regime, r.friction_regime,
                  r.friction) for r in cfg.runs],
        "stepsize": cfg.stepsize,
        "iterations": cfg.iterations,
        "seeds": list(cfg.seeds),
        "friction": cfg.friction,
        "burn_in": cfg.burn_in,
        "batch_size": cfg.batch_size,
        "thinning": cfg.thinning,
        "metric": cfg.metric,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return f"{data_mod.fnv1a64(blob):016x}"


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"missing field '{key}' in {context}")
    return mapping[key]


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Validate a parsed JSON config; error messages name the bad field."""
    try:
        runs = []
        for entry in _require(raw, "runs", "config"):
            algo_name = _require(entry, "algorithm", "run entry")
            try:
                algorithm = Algorithm[algo_name.upper()]
            except KeyError:
                raise ConfigError(
                    f"unknown algorithm '{algo_name}' in run "
                    f"'{entry.get('name', '?')}'") from None
            runs.append(RunSpec(
                name=_require(entry, "name", "run entry"),
                algorithm=algorithm,
                regime=entry.get("regime"),
                friction_regime=entry.get("friction_regime"),
                friction=entry.get("friction")))
        seeds = _require(raw, "seeds", "config")
        if not seeds:
            raise ConfigError("field 'seeds' must be a nonempty list")
        iterations = int(_require(raw, "iterations", "config"))
        if iterations < 1:
            raise ConfigError("field 'iterations' must be >= 1")
        cfg = ExperimentConfig(
            experiment_id=_require(raw, "id", "config"),
            target=_require(raw, "target", "config"),
            regimes=raw.get("regimes", {}),
            runs=runs,
            stepsize=float(_require(raw, "stepsize", "config")),
            iterations=iterations,
            seeds=[int(s) for s in seeds],
            friction=float(raw.get("friction", 1.5)),
            burn_in=int(raw.get("burn_in", 0)),
            batch_size=raw.get("batch_size"),
            thinning=int(raw.get("thinning", 1)),
            metric=raw.get("metric", "mse"),
            output_dir=raw.get("output_dir", "runs"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    _resolve_regimes(cfg)  # fail fast on malformed matrices
    return cfg


def config_from_json(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


def _resolve_regimes(cfg: ExperimentConfig) -> dict:
    resolved = {}
    for name, entry in cfg.regimes.items():
        try:
            gen = validate_generator(np.array(entry["generator"], dtype=float))
            initial = entry.get("initial_law")
            resolved[name] = make_regime_spec(entry["values"], gen, initial)
        except KeyError as exc:
            raise ConfigError(f"regime '{name}' is missing field {exc}") from exc
        except Exception as exc:
            raise ConfigError(f"regime '{name}': {exc}") from exc
    return resolved


def _iris_path(data_dir: Optional[str]) -> Path:
    if data_dir:
        candidate = Path(data_dir) / "iris.csv"
        if candidate.exists():
            return candidate
    return Path(__file__).parent / "datasets" / "iris.csv"


def build_target(target: dict, data_dir: Optional[str] = None):
    """Instantiate the potential, problem object, and metric hook factory."""
    kind = _require(target, "kind", "target")
    if kind == "linreg":
        rng = RngStream(int(target.get("data_seed", 0)), (9000,))
        problem = data_mod.gen_linreg(
            int(_require(target, "n", "target")), rng,
            float(target.get("prior_variance", 1.0)))
        return linreg_potential(problem), problem
    if kind == "logreg_synthetic":
        rng = RngStream(int(target.get("data_seed", 0)), (9001,))
        problem, _coef = data_mod.gen_logreg(
            int(_require(target, "n", "target")),
            int(target.get("dim", 3)),
            float(target.get("prior_variance", 2.0)), rng)
        return logreg_potential(problem), problem
    if kind == "logreg_csv":
        dataset_name = _require(target, "dataset", "target")
        if dataset_name == "iris":
            path = _iris_path(data_dir)
            schema = data_mod.CsvSchema(columns=(
                ("sepal_length", "float"), ("sepal_width", "float"),
                ("petal_length", "float"), ("petal_width", "float"),
                ("species", "label")), expected_rows=150)
            positive = target.get("positive_class", IRIS_POSITIVE_CLASS)
        elif dataset_name == "magic":
            base = Path(data_dir) if data_dir else Path(".")
            path = base / target.get("filename", MAGIC_FILENAME)
            schema = data_mod.CsvSchema(columns=tuple(
                [(f"f{i}", "float") for i in range(10)] + [("class", "label")]),
                expected_rows=19020)
            positive = target.get("positive_class", "g")
        else:
            raise ConfigError(f"unknown dataset '{dataset_name}'")
        if not Path(path).exists():
            raise MissingDataset(str(path))
        ds = data_mod.load_csv(path, schema)
        ds = data_mod.binarize_labels(ds, positive)
        if target.get("standardize", True):
            ds, _params = data_mod.standardize(ds)
        problem = data_mod.to_logreg_problem(
            ds, float(target.get("prior_variance", 2.0)),
            add_intercept=bool(target.get("add_intercept", False)))
        return logreg_potential(problem), problem
    raise ConfigError(f"unknown target kind '{kind}'")


def _metric_hook(metric: str, problem):
    if metric == "mse":
        feats, resp = problem.features, problem.responses
        return lambda x: float(np.mean((resp - feats @ x) ** 2))
    if metric == "accuracy":
        feats, labels = problem.features, problem.labels
        return lambda x: float(np.mean(((feats @ x) >= 0.0) == labels))
    raise ConfigError(f"unknown metric '{metric}'")


def write_series_csv(path: Path, header: list, columns: list) -> None:
    """UTF-8, LF-terminated CSV with shortest round-trip float formatting."""
    lines = [",".join(header)]
    n = len(columns[0])
    for i in range(n):
        lines.append(",".join(
            repr(col[i]) if isinstance(col[i], float) else str(col[i])
            for col in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def run_experiment(cfg: ExperimentConfig, out_dir=None,
                   data_dir: Optional[str] = None,
                   seeds: Optional[list] = None) -> list:
    """Execute every (run, seed) pair and write per-seed and mean curve CSVs."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = list(cfg.seeds if seeds is None else seeds)
    digest = config_hash(cfg)
    regimes = _resolve_regimes(cfg)
    pot, problem = build_target(cfg.target, data_dir)
    hook = _metric_hook(cfg.metric, problem)

    def lookup(name: Optional[str], run_name: str) -> Optional[RegimeSpec]:
        if name is None:
            return None
        if name not in regimes:
            raise ConfigError(f"run '{run_name}' references unknown regime "
                              f"'{name}'")
        return regimes[name]

    records = []
    mean_series = {}
    for run in cfg.runs:
        sampler_cfg = SamplerConfig(
            stepsize=cfg.stepsize,
            iterations=cfg.iterations,
            friction=run.friction if run.friction is not None else cfg.friction,
            burn_in=cfg.burn_in,
            batch_size=cfg.batch_size,
            regime=lookup(run.regime, run.name),
            friction_regime=lookup(run.friction_regime, run.name),
            thinning=cfg.thinning)
        curves = []
        iters = None
        for seed in seeds:
            start = time.perf_counter()
            trace = run_chain(sampler_cfg, run.algorithm, pot,
                              RngStream(seed), {cfg.metric: hook})
            elapsed = time.perf_counter() - start
            series = trace.metrics[cfg.metric]
            iters = trace.iterations
            csv_path = out / f"{cfg.experiment_id}_{run.name}_seed{seed}.csv"
            write_series_csv(csv_path, ["iteration", cfg.metric],
                             [iters.tolist(), series.tolist()])
            curves.append(series)
            records.append(RunRecord(
                config_hash=digest, run_name=run.name, seed=seed,
                csv_path=str(csv_path), wall_clock=elapsed, diverged=False,
                stepsize_admissible=trace.stepsize_admissible,
                final_value=float(series[-1])))
        mean_curve = np.mean(np.vstack(curves), axis=0)
        mean_series[run.name] = mean_curve
        write_series_csv(out / f"{cfg.experiment_id}_{run.name}_mean.csv",
                         ["iteration", cfg.metric],
                         [iters.tolist(), mean_curve.tolist()])
    write_series_csv(
        out / f"{cfg.experiment_id}_summary.csv",
        ["iteration"] + [r.name for r in cfg.runs],
        [iters.tolist()] + [mean_series[r.name].tolist() for r in cfg.runs])
    return records


# --- bundled experiment registry ---------------------------------------------

def _linreg_target(n: int = 1000, data_seed: int = 7) -> dict:
    return {"kind": "linreg", "n": n, "prior_variance": 1.0,
            "data_seed": data_seed}


def _exp_linreg_stepsize_range() -> ExperimentConfig:
    return ExperimentConfig(
        experiment_id="linreg_stepsize_range",
        target=_linreg_target(),
        regimes={
            "narrow": {"values": STEP_SET_NARROW, "generator": SLOW_GEN_A},
            "wide": {"values": STEP_SET_WIDE, "generator": SLOW_GEN_B},
        },
        runs=[
            RunSpec("lmc", Algorithm.LMC),
            RunSpec("rslmc_narrow", Algorithm.RSLMC, regime="narrow"),
            RunSpec("rslmc_wide", Algorithm.RSLMC, regime="wide"),
        ],
        stepsize=2e-6, iterations=2000, seeds=[0, 1, 2, 3, 4],
        thinning=10, metric="mse")


def _exp_linreg_spectral_gap() -> ExperimentConfig:
    return ExperimentConfig(
        experiment_id="linreg_spectral_gap",
        target=_linreg_target(),
        regimes={
            "slow_mixing": {"values": STEP_SET_UNIT, "generator": SLOW_GEN_A},
            "fast_mixing": {"values": STEP_SET_UNIT, "generator": FAST_GEN_5},
        },
        runs=[
            RunSpec("klmc", Algorithm.KLMC),
            RunSpec("rsklmc_slow_mixing", Algorithm.RSKLMC, regime="slow_mixing"),
            RunSpec("rsklmc_fast_mixing", Algorithm.RSKLMC, regime="fast_mixing"),
        ],
        stepsize=5e-4, iterations=2000, seeds=[0, 1, 2, 3, 4],
        friction=1.5, thinning=10, metric="mse")


def _exp_linreg_friction_range() -> ExperimentConfig:
    return ExperimentConfig(
        experiment_id="linreg_friction_range",
        target=_linreg_target(),
        regimes={
            "friction_low": {"values": FRICTION_SET_LOW, "generator": FAST_GEN_4},
            "friction_high": {"values": FRICTION_SET_HIGH, "generator": FAST_GEN_4},
        },
        runs=[
            RunSpec("klmc", Algorithm.KLMC),
            RunSpec("frsklmc_low", Algorithm.FRSKLMC,
                    friction_regime="friction_low"),
            RunSpec("frsklmc_high", Algorithm.FRSKLMC,
                    friction_regime="friction_high"),
        ],
        stepsize=5e-4, iterations=2000, seeds=[0, 1, 2, 3, 4],
        friction=1.5, thinning=10, metric="mse")


def _logistic_runs() -> list:
    return [
        RunSpec("sgld", Algorithm.LMC),
        RunSpec("rs_sgld", Algorithm.RSLMC, regime="step_regime"),
        RunSpec("sghmc", Algorithm.KLMC, friction=LOGISTIC_FRICTION),
        RunSpec("rs_sghmc", Algorithm.RSKLMC, regime="step_regime",
                friction=LOGISTIC_FRICTION),
        RunSpec("frs_sghmc", Algorithm.FRSKLMC,
                friction_regime="friction_regime"),
    ]


def _logistic_regimes() -> dict:
    return {
        "step_regime": {"values": LOGISTIC_STEP_SET, "generator": SLOW_GEN_A},
        "friction_regime": {"values": LOGISTIC_FRICTION_SET,
                            "generator": FRICTION_GEN},
    }


def _exp_logistic_synthetic() -> ExperimentConfig:
    return ExperimentConfig(
        experiment_id="logistic_synthetic",
        target={"kind": "logreg_synthetic", "n": 20000, "dim": 3,
                "prior_variance": 2.0, "data_seed": 11},
        regimes=_logistic_regimes(),
        runs=_logistic_runs(),
        stepsize=1e-4, iterations=2000, seeds=[0, 1, 2, 3, 4],
        batch_size=20, thinning=10, metric="accuracy")


def _exp_logistic_iris() -> ExperimentConfig:
    return ExperimentConfig(
        experiment_id="logistic_iris",
        target={"kind": "logreg_csv", "dataset": "iris",
                "positive_class": IRIS_POSITIVE_CLASS, "prior_variance": 2.0,
                "standardize": True},
        regimes=_logistic_regimes(),
        runs=_logistic_runs(),
        stepsize=1e-4, iterations=1000, seeds=[0, 1, 2, 3, 4],
        batch_size=50, thinning=10, metric="accuracy")


def _exp_logistic_magic() -> ExperimentConfig:
    return ExperimentConfig(
        experiment_id="logistic_magic",
        target={"kind": "logreg_csv", "dataset": "magic",
                "positive_class": "g", "prior_variance": 2.0,
                "standardize": True},
        regimes=_logistic_regimes(),
        runs=_logistic_runs(),
        stepsize=1e-4, iterations=2000, seeds=[0, 1, 2, 3, 4],
        batch_size=100, thinning=10, metric="accuracy")


_REGISTRY = {
    "linreg_stepsize_range": _exp_linreg_stepsize_range,
    "linreg_spectral_gap": _exp_linreg_spectral_gap,
    "linreg_friction_range": _exp_linreg_friction_range,
    "logistic_synthetic": _exp_logistic_synthetic,
    "logistic_iris": _exp_logistic_iris,
    "logistic_magic": _exp_logistic_magic,
}


def bundled_experiment_names() -> list:
    return sorted(_REGISTRY)


def bundled_experiment(name: str) -> ExperimentConfig:
    if name not in _REGISTRY:
        raise ConfigError(
            f"unknown experiment '{name}'; bundled experiments: "
            f"{', '.join(bundled_experiment_names())}")
    return _REGISTRY[name]()
