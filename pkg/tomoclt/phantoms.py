"""
Funciones de atenuación f sobre el disco unitario y su transformada de rayos X
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from tomoclt.errors import ConfigError, InvalidParameterError
from tomoclt.models.geometry import LineCoord

logger = logging.getLogger(__name__)

DEFAULT_QUAD_ORDER = 32


@lru_cache(maxsize=None)
def gauss_legendre(order):
    """Nodos y pesos de Gauss-Legendre en [-1, 1]"""
    if order < 2:
        raise InvalidParameterError(f'el orden de cuadratura debe ser >= 2: {order}')
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@dataclass(frozen=True)
class TransformValue:
    """Integral de f a lo largo de la cuerda L_y ∩ D"""
    value: float


class Phantom:
    """Función de atenuación estrictamente positiva y Lipschitz en el disco"""

    kind = 'abstract'

    def __init__(self, name, lipschitz_bound, sup_bound, inf_bound):
        if not inf_bound > 0:
            raise InvalidParameterError(f'{name}: la atenuación debe ser estrictamente positiva')
        self.name = name
        self.lipschitz_bound = float(lipschitz_bound)
        self.sup_bound = float(sup_bound)
        self.inf_bound = float(inf_bound)

    def evaluate(self, x, y):
        raise NotImplementedError

    def closed_form(self, s, theta):
        """Transformada exacta; None si no existe forma cerrada"""
        return None

    @property
    def has_closed_form(self):
        return type(self).closed_form is not Phantom.closed_form

    @property
    def is_radial(self):
        return False

    def parameters(self):
        return {}

    def to_dict(self):
        return {
            'name': self.name,
            'kind': self.kind,
            'parameters': self.parameters(),
            'inf_bound': self.inf_bound,
            'sup_bound': self.sup_bound,
            'lipschitz_bound': self.lipschitz_bound,
            'closed_form': self.has_closed_form,
        }

    def __repr__(self):
        return f'<Phantom {self.name} {self.parameters()}>'


class ConstantPhantom(Phantom):
    """f = c en todo el disco"""

    kind = 'constant'

    def __init__(self, c=1.0, name='constant'):
        if not c > 0:
            raise InvalidParameterError(f'constante c debe ser > 0: {c}')
        super().__init__(name, lipschitz_bound=0.0, sup_bound=c, inf_bound=c)
        self.c = float(c)

    def evaluate(self, x, y):
        return np.full(np.broadcast(x, y).shape, self.c)

    def closed_form(self, s, theta):
        s = np.asarray(s, dtype=float)
        return 2.0 * self.c * np.sqrt(np.clip(1.0 - s * s, 0.0, None))

    @property
    def is_radial(self):
        return True

    def parameters(self):
        return {'c': self.c}


class ParabolaPhantom(Phantom):
    """f(x) = alpha + beta (1 - |x|^2)"""

    kind = 'parabola'

    def __init__(self, alpha=0.5, beta=0.5, name='parabola'):
        if not alpha > 0:
            raise InvalidParameterError(f'alpha debe ser > 0: {alpha}')
        if beta < 0:
            raise InvalidParameterError(f'beta debe ser >= 0: {beta}')
        super().__init__(name, lipschitz_bound=2.0 * beta, sup_bound=alpha + beta, inf_bound=alpha)
        self.alpha = float(alpha)
        self.beta = float(beta)

    def evaluate(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.alpha + self.beta * (1.0 - x * x - y * y)

    def closed_form(self, s, theta):
        s = np.asarray(s, dtype=float)
        h2 = np.clip(1.0 - s * s, 0.0, None)
        return 2.0 * self.alpha * np.sqrt(h2) + (4.0 * self.beta / 3.0) * h2 ** 1.5

    @property
    def is_radial(self):
        return True

    def parameters(self):
        return {'alpha': self.alpha, 'beta': self.beta}


class BumpPhantom(Phantom):
    """f(x) = alpha + beta exp(-|x - c|^2 / 2w^2), sin forma cerrada"""

    kind = 'bump'

    def __init__(self, alpha=0.4, beta=0.8, center=(0.3, -0.2), width=0.25, name='bump'):
        if not alpha > 0:
            raise InvalidParameterError(f'alpha debe ser > 0: {alpha}')
        if beta < 0:
            raise InvalidParameterError(f'beta debe ser >= 0: {beta}')
        if not width > 0:
            raise InvalidParameterError(f'width debe ser > 0: {width}')
        # |grad| alcanza su máximo beta e^{-1/2} / w en |x - c| = w
        super().__init__(
            name,
            lipschitz_bound=beta * math.exp(-0.5) / width,
            sup_bound=alpha + beta,
            inf_bound=alpha,
        )
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.center = (float(center[0]), float(center[1]))
        self.width = float(width)

    def evaluate(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2 = (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2
        return self.alpha + self.beta * np.exp(-r2 / (2.0 * self.width ** 2))

    def parameters(self):
        return {
            'alpha': self.alpha,
            'beta': self.beta,
            'center': list(self.center),
            'width': self.width,
        }


PHANTOM_KINDS = {
    'constant': ConstantPhantom,
    'parabola': ParabolaPhantom,
    'bump': BumpPhantom,
}


def chord_interval(line):
    """Parámetros (t_lo, t_hi) de L_y ∩ D con x = s tau + t tau_perp"""
    s = line.s if isinstance(line, LineCoord) else float(line[0])
    half = math.sqrt(max(0.0, 1.0 - s * s))
    return -half, half


def transform_values(phantom, s, theta, quad_order=DEFAULT_QUAD_ORDER, use_closed_form=True):
    """Versión vectorizada de xray_transform sobre arreglos de rectas"""
    s = np.asarray(s, dtype=float)
    theta = np.asarray(theta, dtype=float)
    s, theta = np.broadcast_arrays(s, theta)
    if use_closed_form and phantom.has_closed_form:
        values = phantom.closed_form(s, theta)
    else:
        nodes, weights = gauss_legendre(quad_order)
        half = np.sqrt(np.clip(1.0 - s * s, 0.0, None))
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        # t en la última dimensión
        t = half[..., None] * nodes
        x = s[..., None] * cos_t[..., None] - t * sin_t[..., None]
        y = s[..., None] * sin_t[..., None] + t * cos_t[..., None]
        values = half * np.sum(phantom.evaluate(x, y) * weights, axis=-1)
    return np.clip(values, 0.0, 2.0 * phantom.sup_bound)


def xray_transform(phantom, line, quad_order=DEFAULT_QUAD_ORDER, use_closed_form=True):
    """Xf(y): integral de f sobre la cuerda de la recta y"""
    if quad_order < 2:
        raise InvalidParameterError(f'el orden de cuadratura debe ser >= 2: {quad_order}')
    value = transform_values(phantom, line.s, line.theta, quad_order, use_closed_form)
    return TransformValue(float(value))


def builtin_phantoms():
    """Catálogo de fantomas incluidos"""
    return {
        'constant': ConstantPhantom(c=1.0),
        'parabola': ParabolaPhantom(alpha=0.5, beta=0.5),
        'bump': BumpPhantom(),
    }


def phantom_from_dict(record):
    """Construye un fantoma desde el registro {kind: ..., parámetros...}"""
    if not isinstance(record, dict) or 'kind' not in record:
        raise ConfigError('el fantoma debe ser un registro con la clave kind')
    params = {k: v for k, v in record.items() if k not in ('kind', 'id')}
    kind = record['kind']
    cls = PHANTOM_KINDS.get(kind)
    if cls is None:
        raise ConfigError(f'tipo de fantoma desconocido: {kind!r}')
    try:
        phantom = cls(**params)
    except TypeError as e:
        raise ConfigError(f'parámetros inválidos para {kind}: {e}') from e
    except InvalidParameterError as e:
        raise ConfigError(e.message) from e
    if 'id' in record:
        phantom.name = str(record['id'])
    logger.debug('Fantoma construido: %r', phantom)
    return phantom
