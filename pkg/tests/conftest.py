import pytest

import entropy_lab as el
from entropy_lab.datasets import boeing


@pytest.fixture(scope="session")
def boeing_data():
    return boeing()


@pytest.fixture(scope="session")
def boeing_stats(boeing_data):
    return el.suff_stats(boeing_data)


@pytest.fixture(scope="session")
def l1():
    return el.Loss.squared_error()


@pytest.fixture(scope="session")
def linex_m3():
    return el.Loss.linex(-3.0)
