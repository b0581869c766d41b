import numpy as np
import pytest

from hullspace.config import AemConfig, Config, RemConfig, SaemConfig, SurrogateConfig
from hullspace.surrogate import train_surrogate_pipeline


def small_config() -> Config:
    """Desk-test scale: quick sessions, same code paths as production."""
    return Config(
        surrogate=SurrogateConfig(train_samples=150, hyper_subset=150),
        rem=RemConfig(pool_size=150, tsne_iterations=500),
        saem=SaemConfig(),
        aem=AemConfig(steps_per_interaction=5),
    )


@pytest.fixture(scope="session")
def shared_surrogate():
    """One modest surrogate reused by mode tests (fit is the slow part)."""
    model, report = train_surrogate_pipeline(150, seed=11,
                                             config=SurrogateConfig(hyper_subset=150))
    assert report.r2 > 0.5
    return model


@pytest.fixture(scope="session")
def test_config():
    return small_config()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
