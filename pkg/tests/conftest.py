from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from model.validation.spms_params import SpmsParams  # noqa: E402
from src.dag.builder import ForkJoinBuilder  # noqa: E402
from src.memory.sim_memory import SimArray, SimMemory  # noqa: E402
from src.spms.context import SpmsContext  # noqa: E402


def make_context(block_words: int = 4, **params) -> SpmsContext:
    memory = SimMemory(block_words)
    return SpmsContext(fj=ForkJoinBuilder(memory), params=SpmsParams(**params))


def load(memory: SimMemory, values: list) -> SimArray:
    """Writes `values` into a fresh heap array."""
    array = memory.alloc(len(values))
    for index, value in enumerate(values):
        array.write(index, value)
    return array


@pytest.fixture
def memory() -> SimMemory:
    return SimMemory(64)


@pytest.fixture
def ctx() -> SpmsContext:
    return make_context()
