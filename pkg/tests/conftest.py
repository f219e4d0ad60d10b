import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent

sys.path.insert(0, str(REPO / "tests"))


@pytest.fixture
def repo_root() -> Path:
    return REPO


@pytest.fixture
def configs_dir() -> Path:
    return REPO / "configs"


@pytest.fixture
def traces_dir() -> Path:
    return REPO / "traces"
