import numpy as np
import pytest

from polyharm.decomposition import CutoffFamily
from polyharm.multiplier_lab import table_for


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fam():
    return CutoffFamily()


@pytest.fixture(scope="session")
def table1(fam):
    return table_for(fam, 1)


@pytest.fixture(scope="session")
def table2(fam):
    return table_for(fam, 2)


def random_field(rng, spec):
    from polyharm.field_core import SpatialField

    return SpatialField(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))
