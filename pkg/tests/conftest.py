from __future__ import annotations

from pathlib import Path

import pytest

from ctv.ast import Annotations
from ctv.elaborate import ElaboratedDesign
from ctv.fixtures import FIXTURES, load_fixture

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def designs() -> dict[str, tuple[ElaboratedDesign, Annotations]]:
    """Every bundled fixture, elaborated inline, keyed by name."""
    return {name: load_fixture(name) for name in FIXTURES}


@pytest.fixture(scope="session")
def pipeline(designs):
    return designs["pipeline"]


@pytest.fixture(scope="session")
def lookup(designs):
    return designs["lookup"]


@pytest.fixture(scope="session")
def mixer(designs):
    return designs["mixer"]


def golden(name: str) -> str:
    return (GOLDEN / name).read_text()
