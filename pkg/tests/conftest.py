import pytest

from credscore.core.config import ResourceConfig
from credscore.services.pipeline import load_resources


@pytest.fixture(scope="session")
def resources():
    return load_resources(ResourceConfig())
