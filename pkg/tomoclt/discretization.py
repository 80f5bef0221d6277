"""
Grilla (n, m) sobre el espacio de rectas Z, campo escalonado X_{n,m}f,
normas y pareos contra funciones de prueba
"""

import logging
import math

import numpy as np
from scipy.stats import qmc

from tomoclt.errors import GridMismatchError, InvalidParameterError
from tomoclt.models.fields import StepField, TestFunction
from tomoclt.models.geometry import TWO_PI, Grid
from tomoclt.phantoms import DEFAULT_QUAD_ORDER, gauss_legendre, transform_values
from tomoclt.utils.decorators import requires_closed_form

logger = logging.getLogger(__name__)

DEFAULT_CELL_QUAD_ORDER = 8

# Tamaño máximo (en evaluaciones de g) de cada bloque de filas en cell_masses
_MASS_BLOCK = 2_000_000


def make_grid(n, m):
    """Grilla con s_j = sin(pi j / 2n) y theta_k = 2 pi k / m"""
    if int(n) != n or int(m) != m or n < 1 or m < 1:
        raise InvalidParameterError(f'n y m deben ser enteros >= 1 (recibido n={n}, m={m})')
    n, m = int(n), int(m)
    s_nodes = np.sin(np.pi * np.arange(n + 1) / (2 * n))
    s_nodes[0] = 0.0
    s_nodes[n] = 1.0
    theta_nodes = TWO_PI * np.arange(m + 1) / m
    s_nodes.setflags(write=False)
    theta_nodes.setflags(write=False)
    return Grid(n=n, m=m, s_nodes=s_nodes, theta_nodes=theta_nodes)


def field_from_values(grid, values, label=''):
    return StepField(grid, np.asarray(values, dtype=float), label=label)


def discretize_transform(phantom, grid, quad_order=DEFAULT_QUAD_ORDER):
    """X_{n,m}f: valor Xf(y_{j,k}) en la esquina de cada celda"""
    s, theta = grid.corners()
    values = transform_values(phantom, s, theta, quad_order)
    # s_n = 1: la cuerda es un punto
    values[-1, :] = 0.0
    return StepField(grid, values, label='X')


def locate_cells(grid, s, theta):
    """Índices (j, k) en base 1 con la convención (s_{j-1}, s_j] x (theta_{k-1}, theta_k]"""
    s = np.asarray(s, dtype=float)
    theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    u = np.arcsin(np.clip(s, 0.0, 1.0))
    j = np.ceil(u * 2 * grid.n / np.pi).astype(np.int64)
    j = np.clip(j, 1, grid.n)  # s = 0 va a la celda j = 1
    k = np.ceil(theta * grid.m / TWO_PI).astype(np.int64)
    k = np.where(k < 1, grid.m, k)  # theta = 0 coincide con theta_m = 2 pi
    k = np.clip(k, 1, grid.m)
    return j, k


def sample_lines(samples):
    """Muestra cuasi-aleatoria de rectas, uniforme para nu en coordenadas (u, theta)"""
    if samples < 1:
        raise InvalidParameterError(f'samples debe ser >= 1: {samples}')
    points = qmc.Halton(d=2, scramble=False).random(samples)
    u = 0.5 * np.pi * (1.0 - points[:, 0])
    return np.sin(u), TWO_PI * points[:, 1]


@requires_closed_form
def sup_error(phantom, grid, samples=10_000, quad_order=DEFAULT_QUAD_ORDER):
    """max |X_{n,m}f(y) - Xf(y)| sobre una muestra de rectas"""
    step = discretize_transform(phantom, grid, quad_order)
    s, theta = sample_lines(samples)
    j, k = locate_cells(grid, s, theta)
    exact = transform_values(phantom, s, theta, quad_order)
    approx = step.values[j - 1, k - 1]
    error = float(np.max(np.abs(approx - exact)))
    logger.debug('sup_error %s en %sx%s: %.3g (%s rectas)', phantom.name, grid.n, grid.m, error, samples)
    return error


def l2_norm(field):
    """||field||_2 en L^2(Z, nu), exacto porque nu(A_{j,k}) = pi^2/nm"""
    return math.sqrt(field.grid.cell_measure * float(np.sum(field.values ** 2)))


def cell_masses(g, grid, quad_order=DEFAULT_CELL_QUAD_ORDER):
    """gamma(A_{j,k}) = integral de g dnu sobre cada celda, con u = arcsin(s)"""
    if quad_order < 2:
        raise InvalidParameterError(f'el orden de cuadratura debe ser >= 2: {quad_order}')
    nodes, weights = gauss_legendre(quad_order)
    half_u = np.pi / (4 * grid.n)
    half_t = np.pi / grid.m
    u_mid = 0.5 * (grid.u_nodes[:-1] + grid.u_nodes[1:])
    t_mid = 0.5 * (grid.theta_nodes[:-1] + grid.theta_nodes[1:])
    s_pts = np.sin(u_mid[:, None] + half_u * nodes)          # (n, q)
    t_pts = t_mid[:, None] + half_t * nodes                  # (m, q)

    masses = np.empty(grid.shape)
    rows = max(1, _MASS_BLOCK // (quad_order * quad_order * grid.m))
    for start in range(0, grid.n, rows):
        stop = min(grid.n, start + rows)
        values = g(s_pts[start:stop, :, None, None], t_pts[None, None, :, :])
        values = np.broadcast_to(values, (stop - start, quad_order, grid.m, quad_order))
        masses[start:stop] = np.einsum('iajb,a,b->ij', values, weights, weights)
    return masses * (half_u * half_t)


class BumpProfile:
    """g(s, theta) = B(s) (c0 + c1 cos(q theta) + c2 sin(q theta))"""

    def __init__(self, s_lo=0.1, s_hi=0.9, q=2, c0=1.0, c1=0.5, c2=0.25, scale=1.0):
        if not 0.0 < s_lo < s_hi < 1.0:
            raise InvalidParameterError(f'soporte inválido: [{s_lo}, {s_hi}]')
        self.s_lo = float(s_lo)
        self.s_hi = float(s_hi)
        self.q = int(q)
        self.c0, self.c1, self.c2 = float(c0), float(c1), float(c2)
        self.scale = float(scale)

    def radial(self, s):
        s = np.asarray(s, dtype=float)
        v = (2.0 * s - self.s_lo - self.s_hi) / (self.s_hi - self.s_lo)
        inside = np.abs(v) < 1.0
        safe = np.where(inside, 1.0 - v * v, 1.0)
        return np.where(inside, np.exp(-1.0 / safe), 0.0)

    def angular(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.c0 + self.c1 * np.cos(self.q * theta) + self.c2 * np.sin(self.q * theta)

    def __call__(self, s, theta):
        return self.scale * self.radial(s) * self.angular(theta)

    def to_dict(self):
        return {
            's_lo': self.s_lo, 's_hi': self.s_hi, 'q': self.q,
            'c0': self.c0, 'c1': self.c1, 'c2': self.c2, 'scale': self.scale,
        }


def make_test_function(grid, s_lo=0.1, s_hi=0.9, q=2, c0=1.0, c1=0.5, c2=0.25,
                       scale=1.0, quad_order=DEFAULT_CELL_QUAD_ORDER):
    """Función de prueba de la familia bump con sus masas sobre la grilla"""
    profile = BumpProfile(s_lo, s_hi, q, c0, c1, c2, scale)
    return TestFunction(
        evaluate=profile,
        s_lo=profile.s_lo,
        s_hi=profile.s_hi,
        grid=grid,
        cell_masses=cell_masses(profile, grid, quad_order),
        params=profile.to_dict(),
    )


def pair(field, g):
    """<field, g> = sum_{j,k} field(j,k) gamma(A_{j,k})"""
    if not field.grid.same_as(g.grid):
        raise GridMismatchError(
            f'el campo ({field.grid.n}x{field.grid.m}) y g ({g.grid.n}x{g.grid.m}) usan grillas distintas'
        )
    return float(np.sum(field.values * g.cell_masses))


def integrate_over_z(func, panels=64, quad_order=DEFAULT_CELL_QUAD_ORDER, s_range=(0.0, 1.0)):
    """Integral de func(s, theta) dnu por cuadratura compuesta en (u, theta)"""
    u_lo, u_hi = math.asin(s_range[0]), math.asin(s_range[1])
    nodes, weights = gauss_legendre(quad_order)
    u_edges = np.linspace(u_lo, u_hi, panels + 1)
    t_edges = np.linspace(0.0, TWO_PI, panels + 1)
    hu = 0.5 * (u_edges[1] - u_edges[0])
    ht = 0.5 * (t_edges[1] - t_edges[0])
    u_pts = (0.5 * (u_edges[:-1] + u_edges[1:])[:, None] + hu * nodes).ravel()
    t_pts = (0.5 * (t_edges[:-1] + t_edges[1:])[:, None] + ht * nodes).ravel()
    wu = np.tile(weights, panels) * hu
    wt = np.tile(weights, panels) * ht
    values = func(np.sin(u_pts)[:, None], t_pts[None, :])
    values = np.broadcast_to(values, (u_pts.size, t_pts.size))
    return float(wu @ values @ wt)
