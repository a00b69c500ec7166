import pytest

from ddishift.simkit import pairwise_similarity
from ddishift.synth import SynthConfig, make_time_correlated


@pytest.fixture(scope="session")
def synthetic():
    return make_time_correlated(SynthConfig())


@pytest.fixture(scope="session")
def synthetic_matrix(synthetic):
    return pairwise_similarity(synthetic.fingerprints)
