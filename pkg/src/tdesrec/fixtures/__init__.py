"""Bundled scenario files."""

from __future__ import annotations

from importlib import resources

from ..events import TICK
from ..modelfile import ModelFile, parse_model

# The manufacturing-cell warm-up run used by the bundled reconfiguration
# problem: one tick, start M1, one tick, M2 auto-starts, two more ticks.
# It leaves M1 working with its piece due, M2 working, and every command
# timer elapsed.
SMALL_FACTORY_WARMUP = (TICK, 11, TICK, 20, TICK, TICK)

# The reconfiguration route the scenario is built around: stop M2, flush M1,
# the piece lands stowed, wait out the commit bound, commit, wait out the
# trigger bound.  Its tick-erased image is the operational sequence
# 23, 33, 12, 31.
SMALL_FACTORY_EXPECTED_PATH = (23, 33, 12, TICK, TICK, 31, TICK, TICK)

SMALL_FACTORY_RECONFIG_EVENT = 91


def small_factory_text() -> str:
    return resources.files(__package__).joinpath("small_factory.tdes").read_text()


def small_factory() -> ModelFile:
    return parse_model(small_factory_text())
