"""
Simulación de los conteos de fotones sobre la grilla y campo de observación Y
bajo las tres normalizaciones de los conteos nulos
"""

import logging
import math

import numpy as np

from tomoclt.errors import InvalidParameterError
from tomoclt.models.fields import CountField, StepField
from tomoclt.models.specs import NormalizationMode
from tomoclt.poisson import check_rate, sample_field

logger = logging.getLogger(__name__)

# Por debajo de esta media el rechazo necesitaría ~1/lambda intentos
INVERSE_CDF_THRESHOLD = 1e-8


def survival_probabilities(xfield):
    """p_{j,k} = exp(-X_{n,m}f(j,k))"""
    return np.exp(-xfield.values)


def simulate_counts(xfield, N, rng, sampler='direct'):
    """S^{y_{j,k}}f ~ Pois(N p_{j,k}), independientes por celda"""
    if int(N) != N or N < 1:
        raise InvalidParameterError(f'la dosis N debe ser un entero >= 1: {N}')
    p = survival_probabilities(xfield)
    counts = sample_field(int(N), p, rng, sampler=sampler)
    return CountField(grid=xfield.grid, N=int(N), counts=counts, p=p)


def conditioned_positive_sample(lam, rng):
    """Pois(lambda) condicionado a ser positivo"""
    lam = check_rate(lam)
    if lam < INVERSE_CDF_THRESHOLD:
        # inversa de la distribución condicionada, P(K = k | K > 0)
        logger.debug('lambda=%.3g: muestreo por inversa condicionada', lam)
        u = rng.random()
        term = lam * math.exp(-lam) / -math.expm1(-lam)
        cumulative = term
        k = 1
        while u > cumulative and term > 0.0:
            k += 1
            term *= lam / k
            cumulative += term
        return k
    while True:
        k = int(rng.poisson(lam))
        if k > 0:
            return k


def zero_count_cells(counts):
    """Número de celdas con S = 0"""
    return int(np.count_nonzero(counts.counts == 0))


def coupled_positive_counts(counts, rng):
    """S~ acoplado: S cuando S > 0, nuevo sorteo condicionado cuando S = 0"""
    result = np.array(counts.counts, dtype=np.int64)
    zeros = np.argwhere(result == 0)
    if zeros.size and rng is None:
        raise InvalidParameterError('la normalización resample requiere un generador aleatorio')
    means = counts.means
    # orden fila por fila para que el consumo del flujo sea determinista
    for j, k in zeros:
        result[j, k] = conditioned_positive_sample(float(means[j, k]), rng)
    return result


def observe(counts, mode, rng=None):
    """Campo Y_{n,m,N}f con la normalización indicada"""
    mode = NormalizationMode.parse(mode)
    S = counts.counts.astype(float)
    N = float(counts.N)
    if mode is NormalizationMode.ADD_ONE:
        values = -np.log((S + 1.0) / N)
    elif mode is NormalizationMode.MAX_ONE:
        values = -np.log(np.maximum(S, 1.0) / N)
    else:
        values = -np.log(coupled_positive_counts(counts, rng).astype(float) / N)
    return StepField(counts.grid, values, label=f'Y[{mode.value}]')


def observe_all(counts, rng=None):
    """Los tres campos de observación a partir del mismo sorteo de conteos"""
    return {mode: observe(counts, mode, rng) for mode in NormalizationMode}
