import numpy as np
import pytest
from hypothesis import settings

from orlicz import _kernels
from orlicz.core import exp_type, power, power_log

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # jit compilation happens once here, outside any timed block
    _kernels.warm_up()


@pytest.fixture(scope="session")
def p15():
    return power(1.5)


@pytest.fixture(scope="session")
def p2():
    return power(2)


@pytest.fixture(scope="session")
def p3():
    return power(3)


@pytest.fixture(scope="session")
def p4():
    return power(4)


@pytest.fixture(scope="session")
def plog2():
    return power_log(2)


@pytest.fixture(scope="session")
def expfn():
    return exp_type()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
