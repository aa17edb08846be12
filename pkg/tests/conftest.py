"""Pytest configuration."""
import sys
from pathlib import Path

import pytest

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from adiabatic_cover.instance import instance_from_triples  # noqa: E402


@pytest.fixture
def two_clause_instance():
    """n=4, clauses (0,1,2) and (0,1,3): d = (2,2,1,1), satisfying {1, 2, 12}."""
    return instance_from_triples(4, [(0, 1, 2), (0, 1, 3)])


@pytest.fixture
def unsatisfiable_instance():
    """All four triples over 4 bits: best assignments have one bit set, 1 violation."""
    return instance_from_triples(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


@pytest.fixture
def single_clause_instance():
    """n=3 with its only possible clause."""
    return instance_from_triples(3, [(0, 1, 2)])
