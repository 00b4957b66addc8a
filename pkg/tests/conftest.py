"""Shared pytest fixtures for Pincushion Lab tests."""

from pathlib import Path

import pytest

from pincushion_lab.config import SettingsManager
from pincushion_lab.graph_core import SimplicialGraph
from pincushion_lab.graph_core import new_graph
from pincushion_lab.graph_core import read_graph

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    """Directory holding graph files and golden outputs."""
    return DATA_DIR


@pytest.fixture
def k2() -> SimplicialGraph:
    """Single edge 1-2."""
    return read_graph(DATA_DIR / "k2.graph")


@pytest.fixture
def edgeless2() -> SimplicialGraph:
    """Two vertices, no edge."""
    return read_graph(DATA_DIR / "edgeless2.graph")


@pytest.fixture
def p3() -> SimplicialGraph:
    """Path 1-2-3."""
    return read_graph(DATA_DIR / "p3.graph")


@pytest.fixture
def path4() -> SimplicialGraph:
    """Path 1-2-3-4."""
    return read_graph(DATA_DIR / "path4.graph")


@pytest.fixture
def triangle() -> SimplicialGraph:
    """Triangle on a, b, c."""
    return new_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def pinned_triangle() -> SimplicialGraph:
    """Triangle with a three-vertex path pinned at a."""
    return read_graph(DATA_DIR / "pinned_triangle.graph")


@pytest.fixture
def fresh_settings():
    """Drop the cached Settings before and after the test."""
    SettingsManager.reset()
    yield
    SettingsManager.reset()
