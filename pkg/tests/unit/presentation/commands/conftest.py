"""Fixtures for CLI command tests."""

from pathlib import Path

import pytest

_SCENARIO = """\
presentations:
  - name: sphere
    family: sphere_rotation
    n: 2
    r: 1
  - name: orbifold
    family: orbifold_interval
    length: pi
  - name: flipped
    reflection_of: sphere

comparisons:
  - source: sphere
    target: orbifold
  - source: sphere
    target: flipped
    map: {orientation: -1}

solver:
  grid_size: 64
  eigen_count: 4
"""


@pytest.fixture
def scenario_file(tmp_path: Path) -> Path:
    """小さな格子のシナリオファイル"""
    path = tmp_path / "small.scenario"
    path.write_text(_SCENARIO, encoding="utf-8")
    return path
