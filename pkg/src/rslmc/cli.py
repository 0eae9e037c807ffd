"""Command-line front end: run samplers, evaluate bounds, check the chain.

Exit codes: 0 success, 2 configuration error, 3 divergence, 4 missing data.
The default data directory for real datasets comes from RSLMC_DATA_DIR.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments, theory
from .ctmc import (
    make_regime_spec,
    simulate_exact_path,
    stationary_distribution,
    validate_generator,
)
from .errors import ConfigError, MissingDataset, NonFiniteState, RslmcError
from .numerics import RngStream, eigenvalues

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_MISSING_DATA = 4

DATA_DIR_ENV = "RSLMC_DATA_DIR"


def _load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def cmd_sample(args) -> int:
    cfg = experiments.config_from_json(args.config)
    records = experiments.run_experiment(cfg, out_dir=args.out,
                                         data_dir=args.data_dir)
    for rec in records:
        print(f"{rec.run_name} seed={rec.seed} final={rec.final_value!r} "
              f"admissible={rec.stepsize_admissible} -> {rec.csv_path}")
    return EXIT_OK


def _regime_from_config(raw: dict, key: str):
    entry = raw.get(key)
    if entry is None:
        raise ConfigError(f"missing field '{key}'")
    try:
        gen = validate_generator(np.array(entry["generator"], dtype=float))
        return make_regime_spec(entry["values"], gen, entry.get("initial_law"))
    except KeyError as exc:
        raise ConfigError(f"regime '{key}' is missing field {exc}") from exc
    except RslmcError:
        raise
    except Exception as exc:
        raise ConfigError(f"regime '{key}': {exc}") from exc


def cmd_theory(args) -> int:
    raw = _load_json(args.config)
    for field in ("m", "M", "dim", "epsilons"):
        if field not in raw:
            raise ConfigError(f"missing field '{field}'")
    m, big_m, d = float(raw["m"]), float(raw["M"]), int(raw["dim"])
    w0 = float(raw.get("w0", 1.0))
    rows = theory.complexity_table(
        m, big_m, d, [float(e) for e in raw["epsilons"]], w0,
        lmc_spec=_regime_from_config(raw, "rslmc_regime"),
        klmc_spec=_regime_from_config(raw, "rsklmc_regime"),
        klmc_gamma=float(raw.get("rsklmc_friction", 1.5)),
        frs_spec=_regime_from_config(raw, "frsklmc_regime"))
    header = ["algorithm", "epsilon", "eta", "K", "alpha", "C", "C_M"]
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            repr(row[h]) if isinstance(row[h], float) else str(row[h])
            for h in header))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_ctmc_check(args) -> int:
    raw = _load_json(args.config)
    if "generator" not in raw:
        raise ConfigError("missing field 'generator'")
    gen = validate_generator(np.array(raw["generator"], dtype=float))
    psi = stationary_distribution(gen)
    spectrum = np.sort_complex(eigenvalues(gen.q))
    nonzero = spectrum.real[spectrum.real < -1e-12]
    gap = float(-nonzero.max()) if nonzero.size else 0.0
    horizon = float(raw.get("horizon", 1e5))
    seed = int(raw.get("seed", 0))
    threshold = float(raw.get("tv_threshold", 1e-2))
    path = simulate_exact_path(gen, psi, horizon, RngStream(seed))
    occupation = path.occupation_fractions(gen.n_states)
    tv = 0.5 * float(np.abs(occupation - psi).sum())
    print("stationary:", " ".join(repr(float(p)) for p in psi))
    print("spectrum:", " ".join(f"{z.real:+.6g}{z.imag:+.6g}j" for z in spectrum))
    print("spectral_gap:", repr(gap))
    print("occupation:", " ".join(repr(float(p)) for p in occupation))
    print(f"tv_distance: {tv!r} (threshold {threshold!r})")
    if tv > threshold:
        print("FAIL: occupation deviates from the stationary law")
        return 1
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = experiments.bundled_experiment(args.name)
    seeds = list(range(args.seeds)) if args.seeds else None
    records = experiments.run_experiment(
        cfg, out_dir=args.out, data_dir=args.data_dir, seeds=seeds)
    by_run = {}
    for rec in records:
        by_run.setdefault(rec.run_name, []).append(rec.final_value)
    for name, finals in by_run.items():
        print(f"{name}: mean final {cfg.metric} = {np.mean(finals):.6g} "
              f"over {len(finals)} seeds")
    out = args.out if args.out else cfg.output_dir
    print(f"curves written under {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rslmc",
        description="Regime-switching Langevin samplers and benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="run sampler curves from a config")
    p_sample.add_argument("--config", required=True)
    p_sample.add_argument("--out", default=None)
    p_sample.add_argument("--data-dir", default=os.environ.get(DATA_DIR_ENV))
    p_sample.set_defaults(func=cmd_sample)

    p_theory = sub.add_parser("theory", help="tabulate bound constants and "
                                             "iteration complexities")
    p_theory.add_argument("--config", required=True)
    p_theory.add_argument("--out", default=None)
    p_theory.set_defaults(func=cmd_theory)

    p_ctmc = sub.add_parser("ctmc-check", help="verify a generator's "
                                               "stationary behavior")
    p_ctmc.add_argument("--config", required=True)
    p_ctmc.set_defaults(func=cmd_ctmc_check)

    p_exp = sub.add_parser("experiment", help="run a bundled experiment")
    p_exp.add_argument("--name", required=True,
                       help=f"one of: {', '.join(experiments.bundled_experiment_names())}")
    p_exp.add_argument("--data-dir", default=os.environ.get(DATA_DIR_ENV))
    p_exp.add_argument("--out", default=None)
    p_exp.add_argument("--seeds", type=int, default=None,
                       help="use seeds 0..k-1 instead of the bundled list")
    p_exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingDataset as exc:
        print(f"error: missing dataset: {exc}", file=sys.stderr)
        return EXIT_MISSING_DATA
    except NonFiniteState as exc:
        print(f"error: divergence detected: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ConfigError, RslmcError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
