"""One-step kernels and chain runners for the Langevin sampler family.

Five position dynamics are provided: overdamped (LMC) and kinetic (KLMC)
baselines, plus the regime-switching variants where a Markov chain modulates
the stepsize (RSLMC, RSKLMC) or the friction (FRSKLMC). Their
stochastic-gradient counterparts (SGLD, SGHMC, ...) are the same kernels with
a minibatch gradient, selected through the config's batch size.

Within an iteration the regime index advances first and the position update
uses the pre-update regime value, so x_{k+1} is driven by the regime that was
current at step k. Regime, Gaussian noise, minibatch selection, and
initialization each consume their own sub-stream, which makes a
single-regime run bit-identical to its classical counterpart.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import theory
from .ctmc import RegimeSpec, discrete_kernel, simulate_discrete_chain
from .errors import FrictionTooSmall, NonFiniteState
from .models import Potential, stochastic_gradient
from .numerics import RngStream

__all__ = [
    "Algorithm",
    "SamplerConfig",
    "Trace",
    "IntegratorCoefficients",
    "NoiseCovariance2x2",
    "lmc_step",
    "rslmc_step",
    "klmc_coefficients",
    "klmc_noise_covariance",
    "klmc_step",
    "run_chain",
]

DIVERGENCE_NORM = 1e12
# The t - psi1(t) style closed forms cancel catastrophically: their relative
# error grows like eps/(gamma*h)^2, so anything below this threshold is
# evaluated by series instead (truncation error there is under 1e-15).
SERIES_THRESHOLD = 1e-3

# sub-stream slots owned by run_chain
_STREAM_REGIME = 0
_STREAM_NOISE = 1
_STREAM_MINIBATCH = 2
_STREAM_INIT = 3


class Algorithm(enum.Enum):
    LMC = "lmc"
    RSLMC = "rslmc"
    KLMC = "klmc"
    RSKLMC = "rsklmc"
    FRSKLMC = "frsklmc"

    @property
    def kinetic(self) -> bool:
        return self in (Algorithm.KLMC, Algorithm.RSKLMC, Algorithm.FRSKLMC)

    @property
    def regime_switching(self) -> bool:
        return self in (Algorithm.RSLMC, Algorithm.RSKLMC, Algorithm.FRSKLMC)


@dataclass(frozen=True)
class IntegratorCoefficients:
    """Exact one-block integrator coefficients for frozen-gradient kinetic steps."""

    psi0: float
    psi1: float
    psi2: float
    horizon: float
    friction: float


@dataclass(frozen=True)
class NoiseCovariance2x2:
    """Per-coordinate covariance of the (velocity, position) Gaussian kick,
    with the 2*gamma diffusion prefactor already included."""

    var_v: float
    cov_vx: float
    var_x: float


def klmc_coefficients(h: float, gamma: float) -> IntegratorCoefficients:
    """psi0 = exp(-gamma h), psi1 = (1 - psi0)/gamma, psi2 = (h - psi1)/gamma.

    psi2 suffers catastrophic cancellation for tiny gamma*h, so it switches to
    a fourth-order series below the threshold.
    """
    if h < 0 or gamma <= 0:
        raise ValueError(f"need h >= 0 and gamma > 0, got h={h}, gamma={gamma}")
    gh = gamma * h
    psi0 = math.exp(-gh)
    psi1 = -math.expm1(-gh) / gamma
    if gh < SERIES_THRESHOLD:
        psi2 = h * h * (0.5 - gh / 6.0 + gh * gh / 24.0 - gh ** 3 / 120.0
                        + gh ** 4 / 720.0)
    else:
        psi2 = (h - psi1) / gamma
    return IntegratorCoefficients(psi0, psi1, psi2, h, gamma)


def klmc_noise_covariance(h: float, gamma: float) -> NoiseCovariance2x2:
    """Closed forms of 2*gamma times the integrals of psi0^2, psi0*psi1, psi1^2
    over [0, h]; the position variance uses the same small-argument series
    switch as the coefficients."""
    if h < 0 or gamma <= 0:
        raise ValueError(f"need h >= 0 and gamma > 0, got h={h}, gamma={gamma}")
    gh = gamma * h
    var_v = -math.expm1(-2.0 * gh)
    cov_vx = math.expm1(-gh) ** 2 / gamma
    if gh < SERIES_THRESHOLD:
        var_x = gamma * h ** 3 * (2.0 / 3.0 - gh / 2.0 + 7.0 * gh * gh / 30.0
                                  - gh ** 3 / 12.0 + 31.0 * gh ** 4 / 1260.0)
    else:
        u = math.exp(-gh)
        var_x = (2.0 / gamma) * (h - 2.0 * (1.0 - u) / gamma
                                 + (1.0 - u * u) / (2.0 * gamma))
    return NoiseCovariance2x2(var_v, cov_vx, var_x)


@lru_cache(maxsize=256)
def _kinetic_step_params(h: float, gamma: float):
    """Coefficients plus the lower-triangular noise factor, cached per (h, gamma)."""
    co = klmc_coefficients(h, gamma)
    cov = klmc_noise_covariance(h, gamma)
    if cov.var_v > 0.0:
        l11 = math.sqrt(cov.var_v)
        l21 = cov.cov_vx / l11
        l22 = math.sqrt(max(cov.var_x - l21 * l21, 0.0))
    else:
        l11 = l21 = l22 = 0.0
    return co.psi0, co.psi1, co.psi2, l11, l21, l22


def _ensure_finite(x: np.ndarray) -> np.ndarray:
    if not np.isfinite(x).all():
        raise NonFiniteState("state overflowed to non-finite values")
    return x


def lmc_step(x: np.ndarray, grad: np.ndarray, eta: float,
             rng: RngStream) -> np.ndarray:
    """x - eta*grad + sqrt(2 eta) xi with xi standard normal."""
    xi = rng.generator.standard_normal(x.shape[0])
    return _ensure_finite(x - eta * grad + math.sqrt(2.0 * eta) * xi)


def rslmc_step(x: np.ndarray, regime_value: float, grad: np.ndarray, eta: float,
               rng: RngStream) -> np.ndarray:
    """The overdamped update with effective stepsize eta * regime_value."""
    xi = rng.generator.standard_normal(x.shape[0])
    return _ensure_finite(
        x - eta * regime_value * grad
        + math.sqrt(2.0 * eta * regime_value) * xi)


def klmc_step(x: np.ndarray, v: np.ndarray, grad: np.ndarray, h: float,
              gamma: float, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """One exact-OU block update of (x, v) over horizon h with friction gamma.

    The (velocity, position) noise is correlated per coordinate with
    covariance klmc_noise_covariance(h, gamma), coordinates independent.
    RSKLMC calls this with h = regime*eta; FRSKLMC with gamma = regime value.
    """
    psi0, psi1, psi2, l11, l21, l22 = _kinetic_step_params(h, gamma)
    z = rng.generator.standard_normal((2, x.shape[0]))
    n_v = l11 * z[0]
    n_x = l21 * z[0] + l22 * z[1]
    v_new = psi0 * v - psi1 * grad + n_v
    x_new = x + psi1 * v - psi2 * grad + n_x
    return _ensure_finite(x_new), _ensure_finite(v_new)


@dataclass
class SamplerConfig:
    """Run parameters shared by all chain algorithms.

    burn_in defaults to iterations // 10; it is metadata only, the trace
    always keeps the full record. batch_size None means full gradients.
    """

    stepsize: float
    iterations: int
    friction: float = 1.5
    burn_in: Optional[int] = None
    batch_size: Optional[int] = None
    regime: Optional[RegimeSpec] = None
    friction_regime: Optional[RegimeSpec] = None
    initial_position: Optional[np.ndarray] = None
    record_velocity: bool = False
    thinning: int = 1

    def resolved_burn_in(self) -> int:
        return self.iterations // 10 if self.burn_in is None else self.burn_in


@dataclass
class Trace:
    """Recorded chain output.

    Iteration 0 (the initial state) is always recorded for nonempty runs,
    then every thinning-th iteration plus the final one. regime_indices[r]
    is the regime in force when leaving the recorded state.
    """

    algorithm: Algorithm
    iterations: np.ndarray
    states: np.ndarray
    regime_indices: Optional[np.ndarray]
    velocities: Optional[np.ndarray]
    metrics: dict
    thinning: int
    burn_in: int
    stepsize_admissible: Optional[bool]
    stepsize_caps: dict = field(default_factory=dict)

    def states_after_burn_in(self) -> np.ndarray:
        return self.states[self.iterations > self.burn_in]

    def velocities_after_burn_in(self) -> np.ndarray:
        if self.velocities is None:
            raise ValueError("velocities were not recorded")
        return self.velocities[self.iterations > self.burn_in]


def _validate_pairing(config: SamplerConfig, algorithm: Algorithm) -> None:
    needs_regime = algorithm in (Algorithm.RSLMC, Algorithm.RSKLMC)
    if needs_regime and config.regime is None:
        raise ValueError(f"{algorithm.name} requires config.regime")
    if not needs_regime and algorithm is not Algorithm.FRSKLMC \
            and config.regime is not None:
        raise ValueError(f"{algorithm.name} does not take a regime spec")
    if algorithm is Algorithm.FRSKLMC and config.friction_regime is None:
        raise ValueError("FRSKLMC requires config.friction_regime")
    if algorithm is not Algorithm.FRSKLMC and config.friction_regime is not None:
        raise ValueError(f"{algorithm.name} does not take a friction regime")
    if config.stepsize <= 0:
        raise ValueError(f"stepsize must be positive, got {config.stepsize}")
    if config.iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {config.iterations}")
    if config.thinning < 1:
        raise ValueError(f"thinning must be >= 1, got {config.thinning}")
    burn = config.resolved_burn_in()
    if config.iterations > 0 and burn >= config.iterations:
        raise ValueError(
            f"burn_in {burn} must be < iterations {config.iterations}")


def _stepsize_report(config: SamplerConfig, algorithm: Algorithm,
                     pot: Potential) -> tuple[Optional[bool], dict]:
    """Evaluate the sufficient stepsize caps for the matching guarantee.

    The caps are sufficient conditions only, so violations warn instead of
    aborting; the result lands in the trace as a machine-readable flag.
    """
    m, big_m = pot.strong_convexity, pot.smoothness
    try:
        if algorithm is Algorithm.RSLMC:
            caps = theory.rslmc_constants(config.regime, m, big_m, pot.dim).eta_caps
        elif algorithm is Algorithm.RSKLMC:
            caps = theory.rsklmc_constants(
                config.regime, m, big_m, config.friction, pot.dim).eta_caps
        elif algorithm is Algorithm.FRSKLMC:
            caps = theory.frsklmc_constants(
                config.friction_regime, m, big_m, pot.dim, w0=0.0).eta_caps
        else:
            return None, {}
    except FrictionTooSmall as exc:
        warnings.warn(f"friction floor violated: {exc}", stacklevel=3)
        return False, {"friction_floor": float("nan")}
    admissible = all(config.stepsize <= cap for cap in caps.values())
    if not admissible:
        warnings.warn(
            f"stepsize {config.stepsize:g} exceeds a sufficient cap "
            f"{caps}; the run proceeds but the bound may not apply",
            stacklevel=3)
    return admissible, caps


def run_chain(config: SamplerConfig, algorithm: Algorithm, pot: Potential,
              rng: RngStream,
              metric_hooks: Optional[dict] = None) -> Trace:
    """Run K iterations of the chosen algorithm and record the trace.

    metric_hooks maps a series name to a callable evaluated on the position
    at every recorded iteration.
    """
    _validate_pairing(config, algorithm)
    k_total = config.iterations
    eta = config.stepsize
    d = pot.dim
    hooks = metric_hooks or {}

    regime_stream = rng.substream(_STREAM_REGIME)
    noise_stream = rng.substream(_STREAM_NOISE)
    batch_stream = rng.substream(_STREAM_MINIBATCH)
    init_stream = rng.substream(_STREAM_INIT)

    admissible, caps = _stepsize_report(config, algorithm, pot)

    if k_total == 0:
        return Trace(algorithm, np.empty(0, dtype=np.int64),
                     np.empty((0, d)), None, None,
                     {name: np.empty(0) for name in hooks},
                     config.thinning, config.resolved_burn_in(),
                     admissible, caps)

    spec = config.friction_regime if algorithm is Algorithm.FRSKLMC else config.regime
    regime_path = None
    regime_values = None
    if algorithm.regime_switching:
        kernel = discrete_kernel(spec.generator, eta)
        regime_path = simulate_discrete_chain(
            kernel, spec.initial_law, k_total + 1, regime_stream)
        regime_values = spec.values[regime_path]

    if config.initial_position is not None:
        x = np.array(config.initial_position, dtype=float)
        if x.shape != (d,):
            raise ValueError(f"initial position must have shape ({d},)")
    else:
        x = np.zeros(d)
    v = init_stream.generator.standard_normal(d) if algorithm.kinetic else None

    recorded = [0] + list(range(config.thinning, k_total + 1, config.thinning))
    if recorded[-1] != k_total:
        recorded.append(k_total)
    rec_iters = np.array(recorded, dtype=np.int64)
    n_rec = len(recorded)
    states = np.empty((n_rec, d))
    vels = np.empty((n_rec, d)) if (algorithm.kinetic and config.record_velocity) else None
    metric_values = {name: np.empty(n_rec) for name in hooks}

    def record(slot: int) -> None:
        states[slot] = x
        if vels is not None:
            vels[slot] = v
        for name, hook in hooks.items():
            metric_values[name][slot] = hook(x)

    record(0)
    next_slot = 1
    batch = config.batch_size
    friction = config.friction
    is_kinetic = algorithm.kinetic

    for k in range(k_total):
        if batch is None:
            grad = pot.gradient(x)
        else:
            grad = stochastic_gradient(pot, x, batch, batch_stream)
        if algorithm is Algorithm.LMC:
            x = lmc_step(x, grad, eta, noise_stream)
        elif algorithm is Algorithm.RSLMC:
            x = rslmc_step(x, regime_values[k], grad, eta, noise_stream)
        elif algorithm is Algorithm.KLMC:
            x, v = klmc_step(x, v, grad, eta, friction, noise_stream)
        elif algorithm is Algorithm.RSKLMC:
            x, v = klmc_step(x, v, grad, regime_values[k] * eta, friction,
                             noise_stream)
        else:  # FRSKLMC
            x, v = klmc_step(x, v, grad, eta, regime_values[k], noise_stream)
        if (x * x).sum() > DIVERGENCE_NORM ** 2:
            raise NonFiniteState(
                f"chain diverged at iteration {k + 1}: |x| > {DIVERGENCE_NORM:g}")
        if next_slot < n_rec and k + 1 == recorded[next_slot]:
            record(next_slot)
            next_slot += 1

    return Trace(
        algorithm, rec_iters, states,
        regime_path[rec_iters] if regime_path is not None else None,
        vels, metric_values, config.thinning, config.resolved_burn_in(),
        admissible, caps)
