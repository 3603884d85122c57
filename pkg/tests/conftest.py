import numpy as np
import pytest

from necrobifurc.params import ModelParams
from necrobifurc.steady import build_steady_state

DEMO = ModelParams(beta=1.0, sigma_ul=0.5, R0=0.5, R=2.0, chi=1.0,
                   g_inv=1.0, prolif=1.0)


@pytest.fixture(scope="session")
def demo_params():
    return DEMO


@pytest.fixture(scope="session")
def demo_steady():
    return build_steady_state(DEMO)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def rel_err(got, want):
    want = np.asarray(want, dtype=float)
    got = np.asarray(got, dtype=float)
    scale = np.maximum(np.abs(want), 1e-300)
    return float(np.max(np.abs(got - want) / scale))
