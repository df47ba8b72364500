from __future__ import annotations

from pathlib import Path

import pytest

from sodkit.chowring import CONIFOLD, DivisorClass
from sodkit.sod import ExceptionalCollection, ObjectRef

FIXTURES = Path(__file__).parent / "fixtures"

SIX_TERM = [(-2, 0), (-2, 1), (-1, -1), (-1, 0), (0, -1), (0, 0)]


def line(e: int, h: int) -> ObjectRef:
    return ObjectRef.line_bundle(DivisorClass(e, h), CONIFOLD)


@pytest.fixture
def six_term() -> ExceptionalCollection:
    return ExceptionalCollection(tuple(line(e, h) for e, h in SIX_TERM))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
