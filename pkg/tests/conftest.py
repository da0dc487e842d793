import numpy as np
import pytest

from minkaehler import kernels
from minkaehler.seeds import builtin_seed
from minkaehler.weierstrass import conjugate_fbar, immersion_f


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # JIT compile outside of any timed assertion
    kernels.warmup()


@pytest.fixture(scope="session")
def enneper_seed():
    return builtin_seed("enneper")


@pytest.fixture(scope="session")
def catenoid_seed():
    return builtin_seed("catenoid")


@pytest.fixture(scope="session")
def m4r5_seed():
    return builtin_seed("m4r5")


@pytest.fixture(scope="session")
def enneper_chart(enneper_seed):
    return immersion_f(enneper_seed)


@pytest.fixture(scope="session")
def enneper_fbar(enneper_seed):
    return conjugate_fbar(enneper_seed)


@pytest.fixture(scope="session")
def catenoid_chart(catenoid_seed):
    return immersion_f(catenoid_seed)


@pytest.fixture(scope="session")
def catenoid_fbar(catenoid_seed):
    return conjugate_fbar(catenoid_seed)


@pytest.fixture(scope="session")
def m4r5_chart(m4r5_seed):
    return immersion_f(m4r5_seed)


@pytest.fixture(scope="session")
def m4r5_fbar(m4r5_seed):
    return conjugate_fbar(m4r5_seed)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260816)
