from pathlib import Path

import numpy as np
import pytest

from filtspec import make_total_of_bicomplex
from filtspec.document import parse_document

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def load_fixture(name: str):
    return parse_document((FIXTURES / f"{name}.yaml").read_text()).to_complex()


@pytest.fixture
def x1():
    return load_fixture("x1")


@pytest.fixture
def exact_bicomplex():
    one = np.eye(1, dtype=np.int64)
    return make_total_of_bicomplex(
        [[1, 1], [1, 1]], {(1, 0): one, (1, 1): one}, {(0, 1): one, (1, 1): one}
    )


@pytest.fixture
def repo_root(monkeypatch):
    # golden files record paths relative to the repository root
    monkeypatch.chdir(ROOT)
    return ROOT
