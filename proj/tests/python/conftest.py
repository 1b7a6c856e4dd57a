import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture
def data_dir():
    return ROOT / "data"


@pytest.fixture
def fixtures_dir():
    return pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def cli():
    path = os.environ.get("MINDCHAT_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("mindchat CLI not built")
    return path
