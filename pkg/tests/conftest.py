"""Shared fixtures"""
import json
import logging

import pytest

from src.numerics.geometry import Circle, discretize, unit_square
from src.numerics.specfun import FracOrder


@pytest.fixture
def unit_circle():
    return Circle()


@pytest.fixture
def circle_mesh():
    def build(n_panels: int = 32, radius: float = 1.0):
        return discretize(Circle(radius=radius), n_panels)
    return build


@pytest.fixture
def square_mesh():
    def build(n_panels: int = 32):
        return discretize(unit_square(), n_panels)
    return build


@pytest.fixture
def order_075():
    return FracOrder(2, 0.75)


@pytest.fixture
def order_06():
    return FracOrder(2, 0.6)


@pytest.fixture
def write_run_config(tmp_path):
    """Write a run configuration dictionary as JSON and return its path"""
    def write(payload: dict, name: str = "run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding='utf-8')
        return path
    return write


@pytest.fixture
def isolated_logging():
    """Restore the root logger after tests that call setup_logging"""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)
