"""Shared fixtures: the bundled process corpus and window helpers."""

from __future__ import annotations

from pathlib import Path

import pytest

from masstransport import make_process, parse_spec_file

SPEC_DIR = Path(__file__).parents[1] / "specs"

SPEC_NAMES = sorted(p.stem for p in SPEC_DIR.glob("*.json"))

# Finite-support processes whose window laws can be enumerated exactly.
# The rotation has a continuous phase, so it is excluded along with the
# Gaussian walk.
EXACT_NAMES = [
    "mixture",
    "moving_average",
    "markov_drift",
    "p06_walk",
    "two_point",
    "two_point_chain",
]

# Processes covered by the long-run average criterion (the deterministic
# mixture is excluded: its trajectories converge to component means, not
# to the global mean).
ERGODIC_NAMES = [n for n in SPEC_NAMES if n != "mixture"]


def spec_path(name: str) -> Path:
    return SPEC_DIR / f"{name}.json"


@pytest.fixture(scope="session")
def corpus():
    """Name -> built process for every bundled spec file."""
    return {name: make_process(parse_spec_file(spec_path(name))) for name in SPEC_NAMES}


@pytest.fixture(scope="session")
def specs():
    """Name -> parsed (unbuilt) spec for every bundled spec file."""
    return {name: parse_spec_file(spec_path(name)) for name in SPEC_NAMES}
