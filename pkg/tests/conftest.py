from __future__ import annotations

import pytest

from cybugwar.bots import builtin_source
from cybugwar.config import RuleConfig


@pytest.fixture
def ghazu_source() -> str:
    return builtin_source("ghazu_corpus")


@pytest.fixture
def rules() -> RuleConfig:
    return RuleConfig()
