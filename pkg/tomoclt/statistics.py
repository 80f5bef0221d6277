"""
Estadístico corregido Z_{n,m,N}, campo linealizado W_{n,m,N}, parámetros de
Berry-Esseen sigma^2 y L, varianza asintótica y cota compuesta
"""

import logging
import math

import numpy as np
from scipy import stats

from tomoclt.discretization import integrate_over_z, pair
from tomoclt.errors import DegenerateVarianceError, GridMismatchError, InvalidParameterError
from tomoclt.models.fields import StepField
from tomoclt.models.specs import BerryEsseenReport, NormalizationMode
from tomoclt.phantoms import DEFAULT_QUAD_ORDER, transform_values
from tomoclt.poisson import abs_central_moment, central_moment_poly, evaluate_moment

logger = logging.getLogger(__name__)

# Constante de la desigualdad de Berry-Esseen para sumas independientes no idénticas
BERRY_ESSEEN_CONSTANT = 0.5583


def _check_grids(first, second):
    if not first.grid.same_as(second.grid):
        raise GridMismatchError(
            f'grillas distintas: {first.grid.shape} vs {second.grid.shape}'
        )


def _scale(grid, N):
    return math.sqrt(grid.n * grid.m * N)


def moment_ratio(r, lam, shift):
    """h_r(lambda) = mu_r(lambda) / (lambda + shift)^r"""
    lam = np.asarray(lam, dtype=float)
    return evaluate_moment(central_moment_poly(r), lam) / (lam + shift) ** r


def correction_field(xfield, N, spec):
    """Suma de correcciones que se resta a Y - X dentro de Z"""
    if spec.a < 1:
        raise InvalidParameterError(f'a debe ser >= 1: {spec.a}')
    X = xfield.values
    lam = N * np.exp(-X)
    total = np.zeros_like(X)
    if spec.mode.uses_shifted_denominator:
        # MaxOne/Resample: sin suma en b
        shift = np.exp(-lam)
    else:
        for r in range(1, spec.b + 1):
            total += (-1) ** r / (r * float(N) ** r) * np.exp(r * X)
        shift = 1.0
    for r in range(2, spec.a + 1):
        total += (-1) ** r * moment_ratio(r, lam, shift) / r
    return StepField(xfield.grid, total, label=f'corr[{spec.a},{spec.b},{spec.mode.value}]')


def simplified_correction(xfield, N, mode, order=3):
    """Correcciones en forma cerrada equivalentes a kappa = 3 y kappa = 5"""
    mode = NormalizationMode.parse(mode)
    if order not in (1, 3, 5):
        raise InvalidParameterError(f'orden de corrección simplificada no soportado: {order}')
    X = xfield.values
    total = np.zeros_like(X)
    sign = -1.0 if mode is NormalizationMode.ADD_ONE else 1.0
    if order >= 3:
        total += sign * np.exp(X) / (2.0 * N)
    if order >= 5:
        second = 1.0 / 12.0 if mode is NormalizationMode.ADD_ONE else 5.0 / 12.0
        total += sign * second * np.exp(2.0 * X) / float(N) ** 2
    return StepField(xfield.grid, total, label=f'corr_simple[{order},{mode.value}]')


def corrected_z(yfield, xfield, N, correction):
    """sqrt(nmN) (Y - X - corrección)"""
    _check_grids(yfield, xfield)
    _check_grids(xfield, correction)
    scale = _scale(xfield.grid, N)
    return StepField(xfield.grid, scale * (yfield.values - xfield.values - correction.values), label='Z')


def z_statistic(yfield, xfield, N, spec):
    """Z_{n,m,N}f con las correcciones (a, b) del modo indicado"""
    _check_grids(yfield, xfield)
    if yfield.label.startswith('Y[') and yfield.label != f'Y[{spec.mode.value}]':
        raise InvalidParameterError(
            f'el campo {yfield.label} no corresponde al modo {spec.mode.value}'
        )
    return corrected_z(yfield, xfield, N, correction_field(xfield, N, spec))


def w_field(counts):
    """W_{n,m,N}f = sqrt(nmN) (Np - S) / (Np + 1) celda a celda"""
    means = counts.means
    values = _scale(counts.grid, counts.N) * (means - counts.counts) / (means + 1.0)
    return StepField(counts.grid, values, label='W')


def sigma_squared(xfield, N, g):
    """Varianza de <W_{n,m,N}f, g>"""
    _check_grids(xfield, g)
    nm = xfield.grid.n * xfield.grid.m
    p = np.exp(-xfield.values)
    weights = nm * float(N) ** 2 * p / (N * p + 1.0) ** 2
    return float(np.sum(weights * g.cell_masses ** 2))


def _third_abs_moments(lam):
    unique, inverse = np.unique(lam, return_inverse=True)
    moments = np.array([abs_central_moment(3, float(v)) for v in unique])
    return moments[inverse].reshape(lam.shape)


def lyapunov_L(xfield, N, g):
    """Cociente de Lyapunov L_{n,m,N} de <W_{n,m,N}f, g>"""
    sigma2 = sigma_squared(xfield, N, g)
    if not sigma2 > 0.0:
        logger.warning('sigma^2 = %s en %sx%s N=%s', sigma2, xfield.grid.n, xfield.grid.m, N)
        raise DegenerateVarianceError('sigma^2 = 0: la función de prueba se anula en la grilla')
    nm = xfield.grid.n * xfield.grid.m
    lam = N * np.exp(-xfield.values)
    third = _third_abs_moments(lam)
    terms = (nm * N) ** 1.5 * third / (lam + 1.0) ** 3 * np.abs(g.cell_masses) ** 3
    return float(np.sum(terms)) / sigma2 ** 1.5


def asymptotic_variance(phantom, g, quad_order=DEFAULT_QUAD_ORDER, panels=48):
    """||pi e^{Xf/2} g||_2^2 = pi^2 integral de e^{Xf} g^2 dnu"""
    profile = g.evaluate

    def integrand(s, theta):
        s, theta = np.broadcast_arrays(s, theta)
        weight = np.exp(transform_values(phantom, s, theta, quad_order))
        return weight * profile(s, theta) ** 2

    integral = integrate_over_z(integrand, panels=panels, s_range=(g.s_lo, g.s_hi))
    return math.pi ** 2 * integral


def plugin_variance(xfield, g):
    """Versión escalonada de la varianza asintótica, con X_{n,m}f y gamma"""
    _check_grids(xfield, g)
    weights = np.exp(xfield.values) / xfield.grid.cell_measure
    return math.pi ** 2 * float(np.sum(weights * g.cell_masses ** 2))


def composite_terms(n, m, N, kappa):
    return {
        'inv_sqrt_nm': 1.0 / math.sqrt(n * m),
        'inv_n': 1.0 / n,
        'inv_m': 1.0 / m,
        'inv_cbrt_N': float(N) ** (-1.0 / 3.0),
        'nm_over_N_kappa': (n * m / float(N) ** kappa) ** (1.0 / 3.0),
    }


def be_bounds(xfield, N, g, spec, phantom=None, constant=1.0, asymptotic=None):
    """
    sigma^2, L, cota cruda 0.5583 L y cota compuesta con constante configurable.

    La varianza asintótica se toma de `asymptotic` si viene calculada, si no
    por cuadratura con `phantom`, y sin fantoma por la versión escalonada.
    """
    sigma2 = sigma_squared(xfield, N, g)
    L = lyapunov_L(xfield, N, g)
    kappa = spec.kappa()
    terms = composite_terms(xfield.grid.n, xfield.grid.m, N, kappa)
    if asymptotic is not None:
        variance = float(asymptotic)
    elif phantom is not None:
        variance = asymptotic_variance(phantom, g)
    else:
        variance = plugin_variance(xfield, g)
    return BerryEsseenReport(
        sigma2=sigma2,
        L=L,
        raw_bound=BERRY_ESSEEN_CONSTANT * L,
        composite_bound=constant * math.fsum(terms.values()),
        asymptotic_variance=variance,
        kappa=kappa,
        constant=constant,
        composite_terms=terms,
    )


def bias_oracle(xfield, N, g, mode):
    """Media predicha de <Z, g> sin correcciones, spec (1, 0)"""
    mode = NormalizationMode.parse(mode)
    sign = -1.0 if mode is NormalizationMode.ADD_ONE else 1.0
    weight = xfield.map(np.exp)
    return sign * _scale(xfield.grid, N) / (2.0 * N) * pair(weight, g)


def dkw_margin(M, alpha=0.01):
    """Semiancho de la banda de Dvoretzky-Kiefer-Wolfowitz"""
    if M < 1:
        raise InvalidParameterError(f'M debe ser >= 1: {M}')
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f'alpha debe estar en (0, 1): {alpha}')
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * M))


def ks_distance(samples, variance=1.0):
    """Distancia de Kolmogorov-Smirnov a N(0, variance)"""
    if not variance > 0:
        raise DegenerateVarianceError('la varianza de referencia debe ser positiva')
    result = stats.kstest(np.asarray(samples, dtype=float), 'norm', args=(0.0, math.sqrt(variance)))
    return float(result.statistic)
