import numpy as np
import pytest

from qident import DesignMatrix, FactorModel


@pytest.fixture
def worked_design():
    """4-item, 2-factor design with row patterns {1}, {2}, {1,2}, {1,2}."""
    return DesignMatrix([[1, 0], [0, 1], [1, 1], [1, 1]])


@pytest.fixture
def worked_model(worked_design):
    """Hand-checkable valid model on the worked design.

    M has columns (1,0,1), (0,1,1), (1,1,2), (1,-1,0).
    """
    theta = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    a = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]])
    return FactorModel(theta, a, worked_design)


@pytest.fixture
def tiny_model():
    """2x2 instance where column 1 masks column 0 (violates the rank
    assumption on the {0,1} pattern, which is realized by a single item)."""
    theta = np.array([[1.0, 0.0], [0.0, 1.0]])
    a = np.array([[1.0, 0.0], [1.0, 1.0]])
    return FactorModel(theta, a, DesignMatrix([[1, 0], [1, 1]]), bound_c=2.0)
