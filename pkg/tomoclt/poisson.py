"""
Muestreo de Poisson (directo y por adelgazamiento), momentos centrales mu_r,
momentos centrales absolutos y cota de grandes desvíos
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats

from tomoclt.errors import InvalidParameterError

MAX_MOMENT_ORDER = 20
MAX_ABS_MOMENT_ORDER = 10

# Criterio de corte de la serie de momentos absolutos
SERIES_TOLERANCE = 1e-16


@dataclass(frozen=True)
class CentralMomentPoly:
    """mu_r(lambda) como polinomio con coeficientes enteros, término constante primero"""
    r: int
    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, lam):
        return evaluate_moment(self, lam)

    def to_dict(self):
        return {'r': self.r, 'coeffs': list(self.coeffs)}


@dataclass(frozen=True)
class CountSample:
    value: int
    mean: float


def check_rate(lam):
    if not (isinstance(lam, (int, float, np.floating, np.integer)) and math.isfinite(lam) and lam > 0):
        raise InvalidParameterError(f'la media lambda debe ser finita y positiva: {lam!r}')
    return float(lam)


@lru_cache(maxsize=None)
def _moment_coeffs(r):
    if r == 0:
        return (1,)
    if r == 1:
        return (0,)
    # mu_{r} = lambda (mu_{r-1}' + (r-1) mu_{r-2})
    prev, prev2 = _moment_coeffs(r - 1), _moment_coeffs(r - 2)
    deriv = [i * c for i, c in enumerate(prev)][1:]
    size = max(len(deriv), len(prev2))
    inner = [0] * size
    for i, c in enumerate(deriv):
        inner[i] += c
    for i, c in enumerate(prev2):
        inner[i] += (r - 1) * c
    coeffs = [0] + inner
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def central_moment_poly(r):
    """mu_r(lambda) = E[(S - lambda)^r] para S ~ Pois(lambda)"""
    if int(r) != r or r < 0:
        raise InvalidParameterError(f'el orden r debe ser un entero >= 0: {r}')
    if r > MAX_MOMENT_ORDER:
        raise InvalidParameterError(f'orden r > {MAX_MOMENT_ORDER} no soportado: {r}')
    return CentralMomentPoly(r=int(r), coeffs=_moment_coeffs(int(r)))


def evaluate_moment(poly, lam):
    """Evalúa mu_r en lambda (escalar o arreglo)"""
    coeffs = np.array([float(c) for c in poly.coeffs])
    return np.polynomial.polynomial.polyval(lam, coeffs)


def sample_direct(lam, rng):
    """Una realización exacta de Pois(lambda)"""
    lam = check_rate(lam)
    return CountSample(value=int(rng.poisson(lam)), mean=lam)


def sample_thinned(N, p, rng):
    """V ~ Pois(N) fotones, cada uno sobrevive con probabilidad p"""
    if int(N) != N or N < 1:
        raise InvalidParameterError(f'N debe ser un entero >= 1: {N}')
    if not (0.0 < p <= 1.0):
        raise InvalidParameterError(f'p debe estar en (0, 1]: {p}')
    emitted = rng.poisson(N)
    return CountSample(value=int(rng.binomial(emitted, p)), mean=float(N * p))


def sample_field(N, p, rng, sampler='direct'):
    """Conteos independientes por celda con media N p (p puede ser una matriz)"""
    p = np.asarray(p, dtype=float)
    if sampler == 'direct':
        return rng.poisson(N * p)
    if sampler == 'thinned':
        emitted = rng.poisson(float(N), size=p.shape)
        return rng.binomial(emitted, p)
    raise InvalidParameterError(f"sampler debe ser 'direct' o 'thinned': {sampler!r}")


def _series_block(r, lam, ks):
    ks = ks.astype(float)
    log_pmf = stats.poisson.logpmf(ks, lam)
    dist = np.abs(ks - lam)
    with np.errstate(divide='ignore'):
        terms = np.exp(log_pmf + r * np.log(dist))
    return terms


@lru_cache(maxsize=65536)
def abs_central_moment(r, lam):
    """E|S - lambda|^r sumando la serie desde el centro hacia afuera"""
    if int(r) != r or r < 1 or r > MAX_ABS_MOMENT_ORDER:
        raise InvalidParameterError(f'r debe ser un entero en [1, {MAX_ABS_MOMENT_ORDER}]: {r}')
    lam = check_rate(lam)
    block = max(16, int(4 * math.sqrt(lam)))
    center = int(math.floor(lam))

    parts = []
    partial = 0.0
    hi = center + 1
    lo = center
    up_done = down_done = False
    while not (up_done and down_done):
        if not up_done:
            terms = _series_block(r, lam, np.arange(hi, hi + block))
            hi += block
            block_sum = math.fsum(terms)
            parts.append(block_sum)
            partial += block_sum
            up_done = block_sum <= SERIES_TOLERANCE * partial
        if not down_done:
            start = max(0, lo - block + 1)
            terms = _series_block(r, lam, np.arange(lo, start - 1, -1))
            lo = start - 1
            block_sum = math.fsum(terms)
            parts.append(block_sum)
            partial += block_sum
            down_done = lo < 0 or block_sum <= SERIES_TOLERANCE * partial
    return math.fsum(parts)


def moment_bound_ratio(r, lam):
    """E|S - lambda|^r / lambda^{r/2}, acotado uniformemente en lambda >= lambda_min"""
    return abs_central_moment(r, lam) / float(lam) ** (r / 2.0)


def lower_tail_bound(lam, a):
    """Cota de Chernoff P(S <= a lambda) <= exp(-lambda (a log a - a + 1))"""
    lam = check_rate(lam)
    if not (0.0 < a < 1.0):
        raise InvalidParameterError(f'a debe estar en (0, 1): {a}')
    return math.exp(-lam * (a * math.log(a) - a + 1.0))


def _pooled_bins(values, min_count):
    """Agrupa los valores enteros en intervalos con al menos min_count observaciones"""
    uniq, counts = np.unique(values, return_counts=True)
    edges = []
    acc = 0
    for value, count in zip(uniq, counts):
        acc += count
        if acc >= min_count:
            edges.append(value)
            acc = 0
    if not edges:
        return np.array([uniq[-1]])
    edges[-1] = uniq[-1]
    return np.array(edges)


def equivalence_pvalue(first, second, min_count=10):
    """p-valor de la prueba chi-cuadrado de dos muestras de conteos"""
    first = np.asarray(first)
    second = np.asarray(second)
    edges = _pooled_bins(np.concatenate([first, second]), 2 * min_count)
    if edges.size < 2:
        return 1.0
    # bin i contiene los valores en (edges[i-1], edges[i]]
    idx_a = np.searchsorted(edges, first, side='left')
    idx_b = np.searchsorted(edges, second, side='left')
    table = np.vstack([
        np.bincount(idx_a, minlength=edges.size),
        np.bincount(idx_b, minlength=edges.size),
    ])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        return 1.0
    _, pvalue, _, _ = stats.chi2_contingency(table)
    return float(pvalue)
