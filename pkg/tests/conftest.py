import math
import os

import numpy as np
import pytest

# parameter grids shared by the transcript tests
BETAS = (0.3, math.pi / 2, 2.5)
THETAS = (0.0, 1.0, math.pi, 5.0)


# common fixtures aimed to reduce the boilerplate in tests
@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def svg_path(tmpdir):
    return os.path.join(tmpdir, 'grid.svg')


@pytest.fixture
def csv_path(tmpdir):
    return os.path.join(tmpdir, 'grid.csv')


@pytest.fixture
def missing_dir_path(tmpdir):
    return os.path.join(tmpdir, 'missing', 'out.svg')


def disk_sample(rng, size, radius):
    """ Uniform points of the disk |z| <= radius. """
    r = radius * np.sqrt(rng.uniform(0, 1, size))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, size))
