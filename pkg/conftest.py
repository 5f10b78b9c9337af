import os
import sys

import pytest

# The modules live at the repository root
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from enumeration_cache import enumeration_cache  # noqa: E402
from partitions import from_diagonals  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: oracle sweeps and large enumerations")


@pytest.fixture(scope="session", autouse=True)
def isolated_enumeration_cache(tmp_path_factory):
    """Keep enumeration files out of the shared temp directory."""
    previous = enumeration_cache.cache_dir
    enumeration_cache.cache_dir = str(tmp_path_factory.mktemp("enumeration"))
    yield enumeration_cache
    enumeration_cache.cache_dir = previous


@pytest.fixture(scope="session")
def figure_spp():
    """Volume 35, alternation 7."""
    return from_diagonals({
        -3: (2,), -2: (3, 2), -1: (4, 3, 1), 0: (5, 3, 2),
        1: (3, 2), 2: (2, 1), 3: (1,), 4: (1,),
    })


@pytest.fixture(scope="session")
def records_to_12(isolated_enumeration_cache):
    return isolated_enumeration_cache.records(12)
