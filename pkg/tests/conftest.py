import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spinforge.spin_models import SpinRegister, heisenberg_ring, total_spin_operators

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def ring6():
    reg = SpinRegister.spin_half_chain(6)
    return reg, heisenberg_ring(6, 2.0), total_spin_operators(reg)


@pytest.fixture(scope="session")
def mn_ev():
    from spinforge.experiments import ENERGY_UNITS
    from spinforge.spin_models import mn_trimer

    H, reg = mn_trimer(energy_scale=ENERGY_UNITS["eV"])
    return reg, H, total_spin_operators(reg)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance report")
        for line in lines:
            terminalreporter.write_line(line)
