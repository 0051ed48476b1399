"""Pytest fixtures for DetMax Lab tests."""

import tempfile
from pathlib import Path

import pytest

from detlab.config import LabConfig, LimitSettings
from detlab.generators import TABLE1_SOLUTION, fig1_vectors, table1_instance
from detlab.resources import ResourceGuard


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def fig1():
    """The four vectors of the worked 3-dimensional example."""
    return fig1_vectors()


@pytest.fixture
def fig1_gram_rows():
    return (
        (25, 10, 5, 15),
        (10, 13, 5, 9),
        (5, 5, 11, 7),
        (15, 9, 7, 11),
    )


@pytest.fixture
def table1():
    """The 3x3 Grid Tiling instance over [4] with a consistent solution."""
    return table1_instance()


@pytest.fixture
def table1_solution():
    return dict(TABLE1_SOLUTION)


@pytest.fixture
def config():
    return LabConfig()


@pytest.fixture
def guard(config):
    return ResourceGuard(config)


@pytest.fixture
def tight_guard():
    """Guard that refuses anything beyond ten subsets or assignments."""
    return ResourceGuard(
        LabConfig(limits=LimitSettings(max_subsets=10, max_assignments=10, max_bits=64))
    )
