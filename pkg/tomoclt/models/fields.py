from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from tomoclt.errors import GridMismatchError, InvalidParameterError
from tomoclt.models.geometry import Grid


@dataclass(frozen=True)
class StepField:
    """Función simple sobre Z, constante en cada celda A_{j,k}"""

    grid: Grid
    values: np.ndarray = field(repr=False)
    label: str = ''

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise InvalidParameterError(
                f'dimensiones {values.shape} no coinciden con la grilla {self.grid.shape}'
            )
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def _check(self, other):
        if not self.grid.same_as(other.grid):
            raise GridMismatchError(
                f'grillas distintas: {self.grid.shape} vs {other.grid.shape}'
            )

    def __add__(self, other):
        if isinstance(other, StepField):
            self._check(other)
            return StepField(self.grid, self.values + other.values)
        return StepField(self.grid, self.values + float(other))

    def __sub__(self, other):
        if isinstance(other, StepField):
            self._check(other)
            return StepField(self.grid, self.values - other.values)
        return StepField(self.grid, self.values - float(other))

    def __mul__(self, scalar):
        return StepField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return StepField(self.grid, -self.values)

    def map(self, func, label=''):
        """Aplica func celda a celda"""
        return StepField(self.grid, func(self.values), label=label or self.label)

    def to_dict(self):
        return {
            'label': self.label,
            'grid': self.grid.to_dict(),
            'values': self.values.tolist(),
        }


@dataclass(frozen=True)
class CountField:
    """Matriz de conteos de fotones S^{y_{j,k}}f con su dosis N"""

    grid: Grid
    N: int
    counts: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        p = np.asarray(self.p, dtype=float)
        if counts.shape != self.grid.shape or p.shape != self.grid.shape:
            raise InvalidParameterError('conteos o probabilidades con dimensiones incorrectas')
        if np.any(counts < 0):
            raise InvalidParameterError('los conteos deben ser no negativos')
        if self.N < 1:
            raise InvalidParameterError(f'la dosis N debe ser >= 1: {self.N}')
        counts.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, 'counts', counts)
        object.__setattr__(self, 'p', p)

    @property
    def means(self):
        """Medias N p_{j,k} de cada celda"""
        return self.N * self.p

    def to_dict(self):
        return {
            'grid': self.grid.to_dict(),
            'N': self.N,
            'counts': self.counts.tolist(),
        }


@dataclass(frozen=True)
class TestFunction:
    """Función de prueba g con soporte s en [s_lo, s_hi] y masas gamma(A_{j,k})"""

    __test__ = False  # evita que pytest la recolecte

    evaluate: Callable = field(repr=False)
    s_lo: float
    s_hi: float
    grid: Grid
    cell_masses: np.ndarray = field(repr=False)
    params: Optional[dict] = None

    def __post_init__(self):
        masses = np.asarray(self.cell_masses, dtype=float)
        if masses.shape != self.grid.shape:
            raise InvalidParameterError('masas de celda con dimensiones incorrectas')
        masses.setflags(write=False)
        object.__setattr__(self, 'cell_masses', masses)

    def scaled(self, factor):
        """g -> factor * g, con masas reescaladas"""
        base = self.evaluate
        return TestFunction(
            evaluate=lambda s, theta: factor * base(s, theta),
            s_lo=self.s_lo,
            s_hi=self.s_hi,
            grid=self.grid,
            cell_masses=factor * self.cell_masses,
            params=dict(self.params or {}, scale=factor * (self.params or {}).get('scale', 1.0)),
        )

    def to_dict(self):
        return {
            's_lo': self.s_lo,
            's_hi': self.s_hi,
            'grid': self.grid.to_dict(),
            'params': self.params or {},
            'total_mass': float(np.sum(self.cell_masses)),
        }
