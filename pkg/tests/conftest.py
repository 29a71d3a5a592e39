import os

import pytest


@pytest.fixture(autouse=True, scope="session")
def _isolated_cache(tmp_path_factory):
    """Keep persistent caches away from the user's home during tests."""
    old = os.environ.get("TAUTRING_CACHE_DIR")
    os.environ["TAUTRING_CACHE_DIR"] = str(tmp_path_factory.mktemp("cache"))
    yield
    if old is None:
        os.environ.pop("TAUTRING_CACHE_DIR", None)
    else:
        os.environ["TAUTRING_CACHE_DIR"] = old
