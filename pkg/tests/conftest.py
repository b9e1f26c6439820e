import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hermitian_btp import catalog
from hermitian_btp.forms import transform_structure
from hermitian_btp.tensor_core import UnitaryMatrix

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile("default")


@st.composite
def rotated_structures(draw, dims=(2, 3, 4, 5)):
    """A random two-step structure written in a random unitary frame."""
    n = draw(st.sampled_from(dims))
    r = draw(st.integers(1, n - 1))
    seed = draw(st.integers(0, 2**31 - 1))
    density = draw(st.sampled_from([0.3, 1.0]))
    S = catalog.random_2step(seed, n, r, density)
    U = UnitaryMatrix.random(n, np.random.default_rng(seed + 1))
    return transform_structure(S, U)


@st.composite
def unitaries(draw, n):
    return UnitaryMatrix.random(n, np.random.default_rng(draw(st.integers(0, 2**31 - 1))))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def default_catalog():
    return catalog.default_catalog()


def non_nilpotent_structures():
    """Fixed structures outside the two-step class, for identities that should hold anyway."""
    rng = np.random.default_rng(7)
    out = [catalog.complexified_su2().S]
    out += [catalog.twisted_sasakian_model(1.0, 2.0, k).S for k in (1j, 1 + 1j, -0.5 + 2j)]
    out += [catalog.twisted_sasakian_model(1.0, 1.0, 1j, [[0, 0, 0.2j], [0, 0, 0]]).S]
    return [transform_structure(S, UnitaryMatrix.random(S.n, rng)) for S in out]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
