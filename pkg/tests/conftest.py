"""Shared fixtures: the benchmark generators and regime value sets."""

import numpy as np
import pytest

from rslmc.ctmc import make_regime_spec, validate_generator
from rslmc.experiments import (
    FAST_GEN_4,
    FAST_GEN_5,
    FRICTION_SET_HIGH,
    FRICTION_SET_LOW,
    SLOW_GEN_A,
    SLOW_GEN_B,
    STEP_SET_NARROW,
    STEP_SET_UNIT,
    STEP_SET_WIDE,
)


@pytest.fixture(scope="session")
def slow_gen_a():
    return validate_generator(np.array(SLOW_GEN_A))


@pytest.fixture(scope="session")
def slow_gen_b():
    return validate_generator(np.array(SLOW_GEN_B))


@pytest.fixture(scope="session")
def fast_gen_5():
    return validate_generator(np.array(FAST_GEN_5))


@pytest.fixture(scope="session")
def fast_gen_4():
    return validate_generator(np.array(FAST_GEN_4))


@pytest.fixture(scope="session")
def wide_spec(slow_gen_a):
    return make_regime_spec(STEP_SET_WIDE, slow_gen_a)


@pytest.fixture(scope="session")
def narrow_spec(slow_gen_a):
    return make_regime_spec(STEP_SET_NARROW, slow_gen_a)


@pytest.fixture(scope="session")
def unit_spec(slow_gen_a):
    return make_regime_spec(STEP_SET_UNIT, slow_gen_a)


@pytest.fixture(scope="session")
def friction_high_spec(fast_gen_4):
    return make_regime_spec(FRICTION_SET_HIGH, fast_gen_4)


@pytest.fixture(scope="session")
def friction_low_spec(fast_gen_4):
    return make_regime_spec(FRICTION_SET_LOW, fast_gen_4)
