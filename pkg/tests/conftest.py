import numpy as np
import pytest

from xrayforge import load_corpus, synth_corpus


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    synth_corpus(root, identities=5, frames_per_identity=4, size=96, seed=123)
    return root


@pytest.fixture(scope="session")
def corpus(corpus_dir):
    return load_corpus(corpus_dir)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def random_soft_mask(rng, h, w):
    """Mixture of flat regions and noise so both binary and fractional pixels occur."""
    mask = (rng.random((h, w)) < 0.5).astype(np.float64)
    band = rng.random((h, w))
    use_soft = rng.random((h, w)) < 0.3
    return np.where(use_soft, band, mask)
