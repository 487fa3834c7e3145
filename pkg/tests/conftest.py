import numpy as np
import pytest

from witness_lab.ensemble import EnsembleConfig, WitnessSpec, run_w_ensemble
from witness_lab.qstate import BipartiteDims


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


@pytest.fixture(scope="session")
def gauss_ensemble():
    """Shared 1e5-sample w ensemble at (32, 32) with a Haar rank-one
    witness; used by the mean/width, tail and cumulant checks."""
    cfg = EnsembleConfig(
        dims=BipartiteDims(32, 32),
        samples=100_000,
        m=1,
        witness_spec=WitnessSpec("random_full_rank"),
        seed=0,
        workers=2,
    )
    return cfg, run_w_ensemble(cfg)


@pytest.fixture(scope="session")
def rank2_half_ensemble():
    cfg = EnsembleConfig(
        dims=BipartiteDims(32, 32),
        samples=100_000,
        m=1,
        witness_spec=WitnessSpec("rank2", lam=0.5),
        seed=0,
        workers=2,
    )
    return cfg, run_w_ensemble(cfg)
