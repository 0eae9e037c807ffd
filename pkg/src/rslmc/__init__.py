"""Regime-switching Langevin Monte Carlo toolkit.

Samplers whose stepsize or friction is modulated by a finite-state
continuous-time Markov chain, together with the chain machinery, convergence
bound evaluators, task metrics, and benchmark experiment harness.
"""

from .ctmc import (
    ContinuousPath,
    GeneratorMatrix,
    RegimeSpec,
    discrete_kernel,
    make_regime_spec,
    simulate_discrete_chain,
    simulate_exact_path,
    spectral_rate,
    stationary_distribution,
    survival_functional,
    validate_generator,
)
from .models import (
    LinRegProblem,
    LogRegProblem,
    Potential,
    linreg_potential,
    logreg_potential,
    quadratic_potential,
    stochastic_gradient,
)
from .numerics import RngStream, eigenvalues, matrix_exp, quadrature
from .samplers import (
    Algorithm,
    SamplerConfig,
    Trace,
    klmc_coefficients,
    klmc_noise_covariance,
    klmc_step,
    lmc_step,
    rslmc_step,
    run_chain,
)

__version__ = "0.1.0"
