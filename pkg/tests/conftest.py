import glob
import os

import numpy as np
import pytest

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data",
                        "instances")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def uf20_files():
    files = sorted(glob.glob(os.path.join(DATA_DIR, "n020-*.cnf")))
    assert len(files) == 20, "expected 20 bundled n=20 instances"
    return files


@pytest.fixture(scope="session")
def uf50_files():
    files = sorted(glob.glob(os.path.join(DATA_DIR, "n050-*.cnf")))
    assert len(files) == 10
    return files


@pytest.fixture(scope="session")
def uf100_files():
    files = sorted(glob.glob(os.path.join(DATA_DIR, "n100-*.cnf")))
    assert len(files) == 10
    return files
