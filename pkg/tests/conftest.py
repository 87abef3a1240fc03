import pytest

from cvqan.noise import CrosstalkFit
from cvqan.params import SystemParams


@pytest.fixture
def params():
    return SystemParams()


@pytest.fixture
def fit():
    return CrosstalkFit()
