import numpy as np
import pytest

from invlab.core.config import load_settings
from invlab.services.distributions import PointMassDistribution
from invlab.services.group_invariance import named_group, trivial_group
from invlab.services.rank_one import RadialDistribution, cosh_power_profile
from invlab.services.slow_decrease import SearchParams, super_decaying_symbol


@pytest.fixture
def settings():
    return load_settings(threads=1, seed=0x5EED)


@pytest.fixture
def search():
    return SearchParams(threads=1)


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


@pytest.fixture(params=["signs", "A2", "B2", "G2"])
def rank_two_group(request):
    return named_group(request.param, 2)


@pytest.fixture
def line_group():
    return trivial_group(1)


@pytest.fixture
def super_decaying():
    return super_decaying_symbol(1)


@pytest.fixture
def delta0_2d():
    return PointMassDistribution.delta((0.0, 0.0))


@pytest.fixture
def radial_bump():
    return RadialDistribution.bump(cosh_power_profile(1.0))


@pytest.fixture
def write_spec(tmp_path):
    """Writes a JSON document into tmp_path and returns its path."""
    import json

    def _write(name, doc):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return path

    return _write
