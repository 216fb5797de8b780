import numpy as np
import pytest
from hypothesis import strategies as st

from quartic_duality import MaterialParams, ScalarParams

CASE_A = dict(alpha=2.0, mu=1.0, nu=1.0, tau_theta=5.0, a=1.0, b=2.0)
CASE_B = dict(alpha=2.0, mu=1.0, nu=1.0, tau_theta=2.05, a=1.0, b=1.1)


@pytest.fixture
def base():
    return ScalarParams(alpha=2.0, mu=1.0, nu=1.0)


@pytest.fixture
def case_a():
    return MaterialParams(**CASE_A)


@pytest.fixture
def case_b():
    return MaterialParams(**CASE_B)


def log_uniform(rng, lo=0.1, hi=10.0):
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def random_double_well(rng):
    """Log-uniform (alpha, mu, nu) in [0.1, 10] conditioned on 2 mu < nu alpha**2."""
    while True:
        alpha, mu, nu = log_uniform(rng), log_uniform(rng), log_uniform(rng)
        if 2.0 * mu < nu * alpha**2:
            return ScalarParams(alpha, mu, nu)


positive = st.floats(min_value=0.1, max_value=10.0)


@st.composite
def double_wells(draw, tau=st.floats(min_value=-5.0, max_value=5.0, allow_subnormal=False)):
    alpha, mu, nu = draw(positive), draw(positive), draw(positive)
    # push alpha up until the double-well condition holds with some margin
    alpha = max(alpha, 1.05 * np.sqrt(2.0 * mu / nu))
    return ScalarParams(alpha, mu, nu, draw(tau))


REGIMES = ("SuperCritical", "Critical", "SubCritical", "ZeroLoad")


def draw_load(rng, params, regime):
    """Random load of the requested regime for fixed material constants."""
    root_eta = float(np.sqrt(params.eta))
    sign = 1.0 if rng.random() < 0.5 else -1.0
    if regime == "SuperCritical":
        tau = rng.uniform(root_eta * (1 + 1e-6), 3.0 * root_eta + 1.0)
    elif regime == "Critical":
        tau = root_eta
    elif regime == "SubCritical":
        tau = rng.uniform(0.0, root_eta)
        while tau == 0.0:
            tau = rng.uniform(0.0, root_eta)
    else:
        return params.with_tau(0.0)
    return params.with_tau(sign * tau)
