import math
from dataclasses import dataclass, field

import numpy as np

from tomoclt.errors import InvalidParameterError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LineCoord:
    """Recta L_y = {x : <x, tau> = s}, con tau = (cos theta, sin theta)"""

    s: float
    theta: float

    def __post_init__(self):
        if not (0.0 < self.s <= 1.0):
            raise InvalidParameterError(f'offset s fuera de (0, 1]: {self.s}')
        if not (0.0 <= self.theta < TWO_PI):
            raise InvalidParameterError(f'ángulo theta fuera de [0, 2pi): {self.theta}')

    @classmethod
    def wrapped(cls, s, theta):
        """Construye la recta reduciendo theta módulo 2pi"""
        return cls(float(s), float(math.fmod(theta, TWO_PI)) % TWO_PI)

    def to_dict(self):
        return {'s': self.s, 'theta': self.theta}


@dataclass(frozen=True)
class Grid:
    """Partición (n, m) del espacio de rectas Z"""

    n: int
    m: int
    s_nodes: np.ndarray = field(repr=False, compare=False)
    theta_nodes: np.ndarray = field(repr=False, compare=False)

    @property
    def shape(self):
        return self.n, self.m

    @property
    def cell_measure(self):
        """nu(A_{j,k}) = pi^2 / nm, igual para todas las celdas"""
        return math.pi ** 2 / (self.n * self.m)

    @property
    def u_nodes(self):
        """Nodos en la coordenada u = arcsin(s), uniformes en [0, pi/2]"""
        return np.pi * np.arange(self.n + 1) / (2 * self.n)

    def corners(self):
        """Esquinas y_{j,k} = (s_j, theta_k), j = 1..n, k = 1..m, como mallas n x m"""
        return np.meshgrid(self.s_nodes[1:], self.theta_nodes[1:], indexing='ij')

    def same_as(self, other):
        return isinstance(other, Grid) and self.n == other.n and self.m == other.m

    def to_dict(self):
        return {
            'n': self.n,
            'm': self.m,
            'cell_measure': self.cell_measure,
        }
