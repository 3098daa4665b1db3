from pathlib import Path

import pytest

from extremal72.fixtures import load_fixture

DATA = Path(__file__).parent / "data"


@pytest.fixture(params=[1, 2, 3], ids=lambda j: f"j{j}")
def fixture(request):
    return load_fixture(request.param)


@pytest.fixture
def data_dir() -> Path:
    return DATA
