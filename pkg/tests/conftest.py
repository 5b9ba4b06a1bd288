import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from starlab import classify_expansion, solve_isentropic_profile, solve_thermo_profile

settings.register_profile(
    "starlab",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("starlab")

# The empirically solvable negative-delta window is narrow; this is the
# standard laboratory point for self-similar PDE runs.
SS_DELTA = -1e-3


@pytest.fixture(scope="session")
def iso0():
    return solve_isentropic_profile(0.0)


@pytest.fixture(scope="session")
def iso_ss():
    return solve_isentropic_profile(SS_DELTA)


@pytest.fixture(scope="session")
def pars_ss():
    return classify_expansion(SS_DELTA, 1.0, np.sqrt(2 * abs(SS_DELTA)))


@pytest.fixture(scope="session")
def thermo14():
    return solve_thermo_profile(1.0, 0.25)
