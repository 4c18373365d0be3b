"""
Interfaces shared by the numerics modules.
Follows ISP - Interface Segregation Principle: one capability per protocol.
"""
from typing import List, Protocol

import numpy as np


class PointFunction(Protocol):
    """Interface for functions sampled at points, (M, d) -> (M,) - ISP: Interface segregation"""
    def __call__(self, points: np.ndarray) -> np.ndarray:
        ...


class Classifiable(Protocol):
    """Interface for boundaries points can be located against - ISP: Interface segregation"""
    def distance(self, points) -> np.ndarray:
        """Distance from each point to the boundary"""
        ...

    def classify_points(self, points) -> List:
        """Interior / exterior / boundary label per point"""
        ...
