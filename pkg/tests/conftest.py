import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pdse.generate import GenConfig, generate, make_synthetic_base


def tiny_grid(max_n: int = 3, seeds=(1, 2)):
    """The small-instance grid used by the oracle-backed suites: both
    families, 1..max_n requests, 1-2 regions, 1-2 machines."""
    out = []
    for family in ("island", "floor"):
        for n in range(1, max_n + 1):
            for z in (1, 2):
                for m in (1, 2):
                    if z == 1 and m == 2:
                        continue  # no machines exist without a second region
                    for seed in seeds:
                        out.append(GenConfig(family, n, z, m, seed))
    return out


def build(cfg: GenConfig):
    base = make_synthetic_base(max(cfg.n, 6), cfg.seed * 31 + cfg.n)
    return generate(base, cfg)


@pytest.fixture(scope="session")
def tiny_instances():
    """Generated tiny instances shared across oracle-backed tests."""
    return [build(cfg) for cfg in tiny_grid()]


@pytest.fixture(scope="session")
def small_instance():
    return build(GenConfig("island", 3, 2, 2, seed=5))
