"""Closed-form convergence bounds, constants, and iteration complexities.

Each evaluator mirrors one of the non-asymptotic guarantees for the
regime-switching samplers: the continuous-time contraction factors driven by
the exponential functional of the regime chain, the discrete-time recursions
with their explicit constants, and the resulting (stepsize, iteration-count)
recipes for a target accuracy. Stepsize caps are reported, never silently
applied to a bound evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ctmc import (
    RegimeSpec,
    spectral_rate,
    stationary_distribution,
    survival_functional,
)
from .errors import FrictionTooSmall, InvalidLambdaSplit

__all__ = [
    "BoundReport",
    "RslmcConstants",
    "RsklmcConstants",
    "FrsklmcConstants",
    "rsld_bound",
    "rslmc_constants",
    "rslmc_bound",
    "rslmc_complexity",
    "rskld_bound",
    "rsklmc_constants",
    "rsklmc_bound",
    "rsklmc_complexity",
    "frskld_bound",
    "frsklmc_constants",
    "frsklmc_bound",
    "frsklmc_complexity",
    "complexity_table",
]


@dataclass(frozen=True)
class BoundReport:
    bound_value: float
    constants: dict
    admissible: bool
    admissibility_limits: dict


def _admissible(eta: float, caps: dict) -> bool:
    return all(eta <= cap for cap in caps.values())


def _spectral_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def _frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


_NORMS = {"spectral": _spectral_norm, "frobenius": _frobenius_norm}


def _min_iterations(raw: float) -> int:
    return max(1, math.ceil(raw))


# --- overdamped -------------------------------------------------------------

def rsld_bound(spec: RegimeSpec, m: float, t: float, w0: float) -> float:
    """Continuous-time contraction of the overdamped regime-switching chain."""
    psi = stationary_distribution(spec.generator)
    return math.sqrt(
        survival_functional(spec.generator, spec.values, psi, 2.0 * m, t)) * w0


@dataclass(frozen=True)
class RslmcConstants:
    alpha: float
    c: float
    c_m: float
    eta_caps: dict

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "C": self.c, "C_M": self.c_m}


def rslmc_constants(spec: RegimeSpec, m: float, big_m: float, d: int,
                    matrix_norm: str = "spectral") -> RslmcConstants:
    """Rate alpha, noise constant C, quadratic remainder C_M, and stepsize caps.

    The matrix norms inside C_M default to the spectral norm; Frobenius is
    available since it only changes a sufficient cap.
    """
    if not big_m >= m > 0:
        raise ValueError(f"need M >= m > 0, got m={m}, M={big_m}")
    norm = _NORMS[matrix_norm]
    q = spec.generator.q
    lam_diag = np.diag(spec.values)
    b_max, b_min = spec.value_max, spec.value_min

    eigs = np.linalg.eigvals(q - m * lam_diag)
    alpha = float(-np.max(eigs.real))
    c = 2.0 * (1.65 * big_m * math.sqrt(d) * b_max ** 1.5 / (m * b_min)) ** 2
    c_m = (0.5 * float(np.max(np.abs(eigs) ** 2))
           + norm(q @ q) + 2.0 * m * norm(q @ lam_diag)
           + 0.5 * m ** 2 * norm(lam_diag @ lam_diag))
    caps = {
        "contraction": 2.0 / (b_max * (m + big_m)),
        "mean_rate": 1.0 / (m * b_max),
        "spectral": -1.0 / (2.0 * float(np.min(eigs.real))),
        "absorption": alpha / (2.0 * c_m),
    }
    return RslmcConstants(alpha, c, c_m, caps)


def rslmc_bound(constants: RslmcConstants, eta: float, k: int,
                w0: float) -> BoundReport:
    """Non-asymptotic W2 bound after k iterations at stepsize eta."""
    a, c = constants.alpha, constants.c
    value = (1.0 - 0.5 * a * eta) ** (k / 2.0) * w0 + math.sqrt(2.0 * c * eta / a)
    return BoundReport(value, constants.as_dict(),
                       _admissible(eta, constants.eta_caps), constants.eta_caps)


def rslmc_complexity(constants: RslmcConstants, eps: float,
                     w0: float) -> tuple[float, int]:
    """Stepsize and iteration count guaranteeing W2 error <= eps."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    a, c = constants.alpha, constants.c
    eta = min(eps ** 2 * a / (8.0 * c), *constants.eta_caps.values())
    k = _min_iterations(4.0 / (a * eta) * math.log(2.0 * w0 / eps))
    return eta, k


# --- kinetic, regime-switching stepsize --------------------------------------

def rskld_bound(spec: RegimeSpec, m: float, big_m: float, gamma: float,
                t: float, w0: float, lambda_minus: float | None = None) -> float:
    """Continuous-time kinetic contraction via a (lambda+, lambda-) split.

    Without an explicit split, gamma^2 >= 2(M + m) is required and the split
    lambda- = (gamma - sqrt(gamma^2 - 4m))/2 is used, for which the exponent
    matrix weakens to Q - (2m/gamma) * diag(values).
    """
    psi = stationary_distribution(spec.generator)
    if lambda_minus is None:
        if gamma ** 2 < 2.0 * (big_m + m):
            raise InvalidLambdaSplit(
                f"default split needs gamma^2 >= 2(M+m); got gamma={gamma}")
        lam_minus = (gamma - math.sqrt(gamma ** 2 - 4.0 * m)) / 2.0
        lam_plus = gamma - lam_minus
        decay = 2.0 * m / gamma
    else:
        lam_minus = float(lambda_minus)
        if not 0.0 < lam_minus < gamma / 2.0:
            raise InvalidLambdaSplit(
                f"need 0 < lambda- < gamma/2 = {gamma / 2}, got {lam_minus}")
        lam_plus = gamma - lam_minus
        growth = max(lam_minus ** 2 - m, big_m - lam_plus ** 2)
        decay = -2.0 * growth / (lam_plus - lam_minus)
    prefactor = math.sqrt(2.0 * (lam_plus ** 2 + lam_minus ** 2)) / (lam_plus - lam_minus)
    surv = survival_functional(spec.generator, spec.values, psi, decay, t)
    return prefactor * math.sqrt(surv) * w0


@dataclass(frozen=True)
class RsklmcConstants:
    alpha: float
    c: float
    gamma: float
    eta_caps: dict

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "C": self.c}


def rsklmc_constants(spec: RegimeSpec, m: float, big_m: float, gamma: float,
                     d: int) -> RsklmcConstants:
    if not big_m >= m > 0:
        raise ValueError(f"need M >= m > 0, got m={m}, M={big_m}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    b_max, b_min = spec.value_max, spec.value_min
    alpha = spectral_rate(spec.generator, m / gamma, spec.values)
    c = 18.0 * big_m ** 2 * b_max ** 4 * d / (m ** 2 * b_min ** 2)
    caps = {
        "gradient": m / (4.0 * b_max * gamma * big_m),
        "stability": m * gamma / ((m ** 2 + 1.5 * big_m * gamma ** 2) * b_max),
        "rate": 2.0 * gamma / (m * b_min),
    }
    return RsklmcConstants(alpha, c, gamma, caps)


def rsklmc_bound(constants: RsklmcConstants, gamma: float, eta: float, k: int,
                 w0: float) -> BoundReport:
    a, c = constants.alpha, constants.c
    value = (2.0 * (1.0 - 0.5 * a * eta) ** (k / 2.0) * w0
             + math.sqrt(2.0 * c / gamma ** 2) * eta)
    return BoundReport(value, constants.as_dict(),
                       _admissible(eta, constants.eta_caps), constants.eta_caps)


def rsklmc_complexity(constants: RsklmcConstants, eps: float,
                      w0: float) -> tuple[float, int]:
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    a, c = constants.alpha, constants.c
    eta = min(eps * constants.gamma / (2.0 * math.sqrt(2.0 * c)),
              *constants.eta_caps.values())
    k = _min_iterations(4.0 / (a * eta) * math.log(4.0 * w0 / eps))
    return eta, k


# --- kinetic, regime-switching friction --------------------------------------

def _check_friction_floor(spec: RegimeSpec, m: float, big_m: float) -> None:
    floor = max(math.sqrt(2.0), math.sqrt(m + big_m))
    if spec.value_min < floor:
        raise FrictionTooSmall(
            f"min friction {spec.value_min} below required floor {floor:g}")


def frskld_bound(spec_gamma: RegimeSpec, m: float, big_m: float, t: float,
                 w0: float) -> float:
    """Continuous-time contraction with switching friction (reciprocal rates)."""
    _check_friction_floor(spec_gamma, m, big_m)
    psi = stationary_distribution(spec_gamma.generator)
    surv = survival_functional(spec_gamma.generator, 1.0 / spec_gamma.values,
                               psi, 2.0 * m, t)
    return math.sqrt(surv) * w0


@dataclass(frozen=True)
class FrsklmcConstants:
    alpha: float
    c_b: float
    eta_caps: dict

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "C_B": self.c_b}


def frsklmc_constants(spec_gamma: RegimeSpec, m: float, big_m: float, d: int,
                      w0: float) -> FrsklmcConstants:
    """Rate, bias constant C_B (which absorbs the initial error), and caps."""
    if not big_m >= m > 0:
        raise ValueError(f"need M >= m > 0, got m={m}, M={big_m}")
    _check_friction_floor(spec_gamma, m, big_m)
    g_max, g_min = spec_gamma.value_max, spec_gamma.value_min
    psi = stationary_distribution(spec_gamma.generator)
    alpha = spectral_rate(spec_gamma.generator, 2.0 * m, 1.0 / spec_gamma.values)
    mean_sq = float(psi @ spec_gamma.values ** 2)
    c_b = (math.sqrt(2.0) * g_max * big_m / (3.0 * m)
           * (2.0 * math.sqrt(d) + math.sqrt(mean_sq) * w0))
    caps = {
        "sqrt_stability": math.sqrt(m / (1.5 * big_m * g_max)),
        "stability": m * g_min / (m ** 2 + 1.5 * big_m * g_max ** 2),
        "gradient": m / (4.0 * g_max * big_m),
    }
    return FrsklmcConstants(alpha, c_b, caps)


def frsklmc_bound(spec_gamma: RegimeSpec, m: float, big_m: float, d: int,
                  eta: float, k: int, w0: float) -> BoundReport:
    consts = frsklmc_constants(spec_gamma, m, big_m, d, w0)
    value = (math.sqrt(2.0) * (1.0 - 0.5 * consts.alpha * eta) ** (k / 2.0) * w0
             + consts.c_b * eta ** 2)
    return BoundReport(value, consts.as_dict(),
                       _admissible(eta, consts.eta_caps), consts.eta_caps)


def frsklmc_complexity(spec_gamma: RegimeSpec, m: float, big_m: float, d: int,
                       eps: float, w0: float) -> tuple[float, int]:
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    consts = frsklmc_constants(spec_gamma, m, big_m, d, w0)
    eta = min(math.sqrt(eps / (2.0 * consts.c_b)), *consts.eta_caps.values())
    k = _min_iterations(
        4.0 / (consts.alpha * eta) * math.log(2.0 * math.sqrt(2.0) * w0 / eps))
    return eta, k


# --- cross-algorithm complexity ladder ---------------------------------------

def complexity_table(m: float, big_m: float, d: int, eps_grid, w0: float,
                     lmc_spec: RegimeSpec, klmc_spec: RegimeSpec,
                     klmc_gamma: float, frs_spec: RegimeSpec) -> list[dict]:
    """(eta, K) per algorithm per accuracy, exposing the epsilon scaling ladder."""
    lmc_c = rslmc_constants(lmc_spec, m, big_m, d)
    klmc_c = rsklmc_constants(klmc_spec, m, big_m, klmc_gamma, d)
    frs_c = frsklmc_constants(frs_spec, m, big_m, d, w0)
    rows = []
    for eps in eps_grid:
        eta, k = rslmc_complexity(lmc_c, eps, w0)
        rows.append({"algorithm": "RSLMC", "epsilon": eps, "eta": eta, "K": k,
                     "alpha": lmc_c.alpha, "C": lmc_c.c, "C_M": lmc_c.c_m})
        eta, k = rsklmc_complexity(klmc_c, eps, w0)
        rows.append({"algorithm": "RSKLMC", "epsilon": eps, "eta": eta, "K": k,
                     "alpha": klmc_c.alpha, "C": klmc_c.c, "C_M": ""})
        eta, k = frsklmc_complexity(frs_spec, m, big_m, d, eps, w0)
        rows.append({"algorithm": "FRSKLMC", "epsilon": eps, "eta": eta, "K": k,
                     "alpha": frs_c.alpha, "C": frs_c.c_b, "C_M": ""})
    return rows
