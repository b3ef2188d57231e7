import os

import pytest

from floerkit.complex import (
    box,
    direct_sum,
    figure_eight,
    mirror,
    staircase,
    tensor,
    trefoil,
)

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


@pytest.fixture
def golden():
    """Reads a file from tests/golden"""
    def read(name: str) -> str:
        with open(os.path.join(GOLDEN_DIR, name)) as fh:
            return fh.read()
    return read


@pytest.fixture
def t23():
    return trefoil()


@pytest.fixture
def t2m3():
    return mirror(trefoil())


@pytest.fixture
def t25():
    return staircase([1, 1, 1, 1])


@pytest.fixture
def fig8():
    return figure_eight()


@pytest.fixture
def t23_t23():
    return tensor(trefoil(), trefoil())


@pytest.fixture
def t25_plus_box():
    return direct_sum(staircase([1, 1, 1, 1]), box(1, 1))


@pytest.fixture
def write_complex(tmp_path):
    """Writes text to a .cfk file and returns its path"""
    def write(text: str, name: str = "c.cfk") -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write
