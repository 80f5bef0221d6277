"""
Experimentos Monte Carlo reproducibles: ley de grandes números, TCL con
correcciones, Berry-Esseen, convergencia de la varianza y comparación de
normalizaciones
"""

import logging
import math
import os
import time

import numpy as np

from tomoclt.discretization import (
    DEFAULT_CELL_QUAD_ORDER,
    discretize_transform,
    l2_norm,
    make_grid,
    make_test_function,
    pair,
)
from tomoclt.errors import ConfigError, InvalidParameterError
from tomoclt.models.fields import StepField
from tomoclt.models.specs import SCHEDULE, ExperimentResult, NormalizationMode, standard_error
from tomoclt.observation import observe_all, simulate_counts, zero_count_cells
from tomoclt.phantoms import DEFAULT_QUAD_ORDER, phantom_from_dict
from tomoclt.statistics import (
    asymptotic_variance,
    be_bounds,
    bias_oracle,
    corrected_z,
    correction_field,
    dkw_margin,
    ks_distance,
    sigma_squared,
    simplified_correction,
    w_field,
)
from tomoclt.utils.helpers import csv_text, json_text, package_versions, write_files
from tomoclt.utils.parallel import ordered_map, replicate_batches, tree_mean
from tomoclt.utils.rng import replicate_stream

logger = logging.getLogger(__name__)

MODES = tuple(NormalizationMode)

# Primer elemento de la clave de cada flujo aleatorio
EXPERIMENT_CODES = {
    'lln': 1,
    'clt': 2,
    'be': 3,
    'modes': 5,
    'sinogram': 6,
}

MIN_KS_REPLICATES = 500
MIN_BE_REPLICATES = 2000


def dose_schedule(grid_sizes, kappa, kappa_offset=0.5):
    """N = ceil((nm)^{1/(kappa - kappa_offset)}), de modo que nm/N^kappa -> 0"""
    exponent = kappa - kappa_offset
    if not exponent > 0 or kappa_offset < 0:
        raise InvalidParameterError(
            f'kappa_offset debe estar en [0, kappa): kappa={kappa}, offset={kappa_offset}'
        )
    return [int(math.ceil((n * m) ** (1.0 / exponent))) for n, m in grid_sizes]


def doses_for(config, n, m):
    if config.doses == SCHEDULE:
        return dose_schedule([(n, m)], config.spec.kappa(), config.kappa_offset)
    return list(config.doses)


def loglog_slope(xs, ys):
    """Ajuste por mínimos cuadrados de log y = slope log x + intercept"""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2 or xs.size != ys.size:
        raise InvalidParameterError('se necesitan al menos dos puntos (x, y)')
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise InvalidParameterError('el ajuste log-log requiere valores positivos')
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(intercept)


def _stream_label(context):
    return '.'.join(str(k) for k in context)


def _summarize(samples):
    samples = np.asarray(samples, dtype=float)
    values = samples.tolist()
    mean = tree_mean(values)
    variance = float(np.var(samples, ddof=1)) if samples.size > 1 else None
    return mean, standard_error(values), variance


def run_replicates(worker, payload, replicates, workers=1):
    """Reparte las réplicas en bloques contiguos y las reúne en orden"""
    return ordered_map(worker, replicate_batches(replicates, workers), payload, workers)


def _lln_batch(batch, payload):
    xfield = payload['xfield']
    out = np.empty((len(batch), len(MODES)))
    for i, r in enumerate(batch):
        rng = replicate_stream(payload['seed'], r, *payload['context'])
        counts = simulate_counts(xfield, payload['N'], rng, payload['sampler'])
        fields = observe_all(counts, rng)
        out[i] = [l2_norm(fields[mode] - xfield) for mode in MODES]
    return out


def _probe_batch(batch, payload):
    """<Z, g> para cada par (modo, corrección) y número de celdas con S = 0"""
    xfield, g, N = payload['xfield'], payload['g'], payload['N']
    probes = payload['probes']
    out = np.empty((len(batch), len(probes) + 1))
    for i, r in enumerate(batch):
        rng = replicate_stream(payload['seed'], r, *payload['context'])
        counts = simulate_counts(xfield, N, rng, payload['sampler'])
        fields = observe_all(counts, rng)
        for p, (mode, correction) in enumerate(probes):
            out[i, p] = pair(corrected_z(fields[mode], xfield, N, correction), g)
        out[i, -1] = zero_count_cells(counts)
    return out


def _w_batch(batch, payload):
    xfield, g, N = payload['xfield'], payload['g'], payload['N']
    out = np.empty(len(batch))
    for i, r in enumerate(batch):
        rng = replicate_stream(payload['seed'], r, *payload['context'])
        counts = simulate_counts(xfield, N, rng, payload['sampler'])
        out[i] = pair(w_field(counts), g) / payload['sigma']
    return out


def _prepare(config, n, m, phantom, quad_order, cell_quad_order, with_g=True):
    grid = make_grid(n, m)
    xfield = discretize_transform(phantom, grid, quad_order)
    g = make_test_function(grid, **config.test_function, quad_order=cell_quad_order) if with_g else None
    return grid, xfield, g


LLN_COLUMNS = [
    'n', 'm', 'N', 'mode', 'mean_norm', 'se', 'sqrt_N_mean', 'slope', 'slope_ok',
    'replicates', 'seed', 'stream',
]


def run_lln(config, workers=1, quad_order=DEFAULT_QUAD_ORDER, cell_quad_order=DEFAULT_CELL_QUAD_ORDER):
    """E||Y - X_{n,m}f||_2 en función de N y pendiente log-log por modo"""
    start = time.perf_counter()
    if config.doses == SCHEDULE:
        raise ConfigError("lln necesita una lista explícita de dosis, no 'schedule'")
    doses = list(config.doses)
    if len(doses) < 3 or max(doses) < 100 * min(doses):
        raise ConfigError('lln necesita al menos 3 dosis que abarquen 2 décadas')
    phantom = phantom_from_dict(config.phantom)
    slope_lo, slope_hi = config.thresholds['lln_slope']
    result = ExperimentResult('lln', LLN_COLUMNS, config=config)
    slopes = {}
    logger.info('LLN: %s, grillas %s, dosis %s, M=%s', phantom.name, list(config.grids), doses, config.replicates)

    for gi, (n, m) in enumerate(config.grids):
        _, xfield, _ = _prepare(config, n, m, phantom, quad_order, cell_quad_order, with_g=False)
        per_dose = []
        for di, N in enumerate(doses):
            context = (EXPERIMENT_CODES['lln'], gi, di)
            payload = {
                'xfield': xfield, 'N': N, 'seed': config.seed,
                'context': context, 'sampler': config.sampler,
            }
            samples = run_replicates(_lln_batch, payload, config.replicates, workers)
            per_dose.append((N, context, [_summarize(samples[:, c]) for c in range(len(MODES))]))
            logger.debug('LLN %sx%s N=%s listo', n, m, N)

        for c, mode in enumerate(MODES):
            means = [stats[c][0] for _, _, stats in per_dose]
            slope, _ = loglog_slope(doses, means)
            ok = slope_lo <= slope <= slope_hi
            slopes[f'{n}x{m}:{mode.value}'] = slope
            if not ok:
                logger.warning('LLN %sx%s %s: pendiente %.4f fuera de [%s, %s]',
                               n, m, mode.value, slope, slope_lo, slope_hi)
            for N, context, stats in per_dose:
                mean, se, _ = stats[c]
                result.add_row(
                    n=n, m=m, N=N, mode=mode.value, mean_norm=mean, se=se,
                    sqrt_N_mean=math.sqrt(N) * mean, slope=slope, slope_ok=ok,
                    replicates=config.replicates, seed=config.seed, stream=_stream_label(context),
                )

    result.summary = {
        'slopes': slopes,
        'slope_range': [slope_lo, slope_hi],
        'all_slopes_ok': all(slope_lo <= s <= slope_hi for s in slopes.values()),
        'wall_time': time.perf_counter() - start,
    }
    logger.info('LLN terminado en %.1f s', result.summary['wall_time'])
    return result


CLT_COLUMNS = [
    'n', 'm', 'N', 'mode', 'a', 'b', 'kappa', 'mean', 'se', 'sample_variance',
    'sigma2', 'asymptotic_variance', 'ks', 'ks_threshold', 'dkw_margin', 'ks_pass',
    'mean_uncorrected', 'se_uncorrected', 'bias_oracle', 'bias_reduction',
    'replicates', 'seed', 'stream',
]


def run_clt(config, workers=1, quad_order=DEFAULT_QUAD_ORDER, cell_quad_order=DEFAULT_CELL_QUAD_ORDER):
    """Distribución de <Z, g> frente a N(0, ||pi e^{Xf/2} g||^2) y sesgo sin corregir"""
    start = time.perf_counter()
    spec = config.spec
    phantom = phantom_from_dict(config.phantom)
    threshold = config.thresholds['ks']
    margin = dkw_margin(config.replicates, config.thresholds['dkw_alpha'])
    if config.replicates < MIN_KS_REPLICATES:
        logger.warning('CLT con M=%s < %s: la prueba KS tiene poca potencia', config.replicates, MIN_KS_REPLICATES)
    result = ExperimentResult('clt', CLT_COLUMNS, config=config)
    logger.info('CLT: %s, spec %s, M=%s', phantom.name, spec.to_dict(), config.replicates)

    for gi, (n, m) in enumerate(config.grids):
        grid, xfield, g = _prepare(config, n, m, phantom, quad_order, cell_quad_order)
        variance = asymptotic_variance(phantom, g, quad_order)
        for di, N in enumerate(doses_for(config, n, m)):
            context = (EXPERIMENT_CODES['clt'], gi, di)
            zero = StepField(grid, np.zeros(grid.shape))
            payload = {
                'xfield': xfield, 'g': g, 'N': N, 'seed': config.seed,
                'context': context, 'sampler': config.sampler,
                'probes': [(spec.mode, correction_field(xfield, N, spec)), (spec.mode, zero)],
            }
            samples = run_replicates(_probe_batch, payload, config.replicates, workers)
            mean, se, sample_var = _summarize(samples[:, 0])
            raw_mean, raw_se, _ = _summarize(samples[:, 1])
            ks = ks_distance(samples[:, 0], variance)
            ks_pass = ks < threshold + margin
            if not ks_pass:
                logger.warning('CLT %sx%s N=%s: KS %.4f >= %s + %.4f', n, m, N, ks, threshold, margin)
            result.add_row(
                n=n, m=m, N=N, mode=spec.mode.value, a=spec.a, b=spec.b, kappa=spec.kappa(),
                mean=mean, se=se, sample_variance=sample_var,
                sigma2=sigma_squared(xfield, N, g), asymptotic_variance=variance,
                ks=ks, ks_threshold=threshold, dkw_margin=margin, ks_pass=ks_pass,
                mean_uncorrected=raw_mean, se_uncorrected=raw_se,
                bias_oracle=bias_oracle(xfield, N, g, spec.mode),
                bias_reduction=abs(raw_mean) / abs(mean) if mean != 0 else None,
                replicates=config.replicates, seed=config.seed, stream=_stream_label(context),
            )
            logger.debug('CLT %sx%s N=%s: KS=%.4f media=%.4g', n, m, N, ks, mean)

    result.summary = {
        'all_ks_pass': all(result.column('ks_pass')),
        'max_ks': max(result.column('ks')),
        'wall_time': time.perf_counter() - start,
    }
    logger.info('CLT terminado en %.1f s', result.summary['wall_time'])
    return result


BE_COLUMNS = [
    'n', 'm', 'N', 'kappa', 'sigma2', 'L', 'L_sqrt_nm', 'raw_bound', 'composite_bound',
    'be_constant', 'empirical_distance', 'dkw_margin', 'within_bound', 'asymptotic_variance',
    'replicates', 'seed', 'stream',
]


def run_be(config, workers=1, quad_order=DEFAULT_QUAD_ORDER,
           cell_quad_order=DEFAULT_CELL_QUAD_ORDER, constant=1.0):
    """Distancia de Kolmogorov de sigma^{-1}<W, g> a Phi frente a 0.5583 L"""
    start = time.perf_counter()
    spec = config.spec
    phantom = phantom_from_dict(config.phantom)
    margin = dkw_margin(config.replicates, config.thresholds['dkw_alpha'])
    if config.replicates < MIN_BE_REPLICATES:
        logger.warning('BE con M=%s < %s réplicas', config.replicates, MIN_BE_REPLICATES)
    result = ExperimentResult('be', BE_COLUMNS, config=config)
    logger.info('BE: %s, M=%s', phantom.name, config.replicates)

    for gi, (n, m) in enumerate(config.grids):
        _, xfield, g = _prepare(config, n, m, phantom, quad_order, cell_quad_order)
        variance = asymptotic_variance(phantom, g, quad_order)
        for di, N in enumerate(doses_for(config, n, m)):
            report = be_bounds(xfield, N, g, spec, constant=constant, asymptotic=variance)
            context = (EXPERIMENT_CODES['be'], gi, di)
            payload = {
                'xfield': xfield, 'g': g, 'N': N, 'seed': config.seed,
                'context': context, 'sampler': config.sampler,
                'sigma': math.sqrt(report.sigma2),
            }
            samples = run_replicates(_w_batch, payload, config.replicates, workers)
            distance = ks_distance(samples, 1.0)
            within = distance <= report.raw_bound + margin
            if not within:
                logger.warning('BE %sx%s N=%s: distancia %.4f > %.4f + %.4f',
                               n, m, N, distance, report.raw_bound, margin)
            result.add_row(
                n=n, m=m, N=N, kappa=report.kappa, sigma2=report.sigma2, L=report.L,
                L_sqrt_nm=report.L * math.sqrt(n * m), raw_bound=report.raw_bound,
                composite_bound=report.composite_bound, be_constant=constant,
                empirical_distance=distance, dkw_margin=margin, within_bound=within,
                asymptotic_variance=report.asymptotic_variance,
                replicates=config.replicates, seed=config.seed, stream=_stream_label(context),
            )

    result.summary = {
        'all_within_bound': all(result.column('within_bound')),
        'wall_time': time.perf_counter() - start,
    }
    logger.info('BE terminado en %.1f s', result.summary['wall_time'])
    return result


VARIANCE_COLUMNS = ['n', 'm', 'N', 'sigma2', 'asymptotic_variance', 'error', 'ratio']


def run_variance_convergence(config, workers=1, quad_order=DEFAULT_QUAD_ORDER,
                             cell_quad_order=DEFAULT_CELL_QUAD_ORDER):
    """|sigma^2_{n,m,N} - ||pi e^{Xf/2} g||^2| bajo refinamiento; no usa azar"""
    start = time.perf_counter()
    if len(config.grids) < 3:
        raise ConfigError('variance necesita al menos 3 grillas')
    phantom = phantom_from_dict(config.phantom)
    result = ExperimentResult('variance', VARIANCE_COLUMNS, config=config)
    variance = None
    previous = {}

    # la razón compara la k-ésima dosis de cada grilla con la de la grilla anterior
    for n, m in config.grids:
        _, xfield, g = _prepare(config, n, m, phantom, quad_order, cell_quad_order)
        if variance is None:
            variance = asymptotic_variance(phantom, g, quad_order)
        for di, N in enumerate(doses_for(config, n, m)):
            sigma2 = sigma_squared(xfield, N, g)
            error = abs(sigma2 - variance)
            before = previous.get(di)
            ratio = error / before if before else None
            previous[di] = error
            result.add_row(n=n, m=m, N=N, sigma2=sigma2, asymptotic_variance=variance,
                           error=error, ratio=ratio)

    result.summary = {
        'asymptotic_variance': variance,
        'ratios': [r for r in result.column('ratio') if r is not None],
        'wall_time': time.perf_counter() - start,
    }
    return result


MODES_COLUMNS = [
    'n', 'm', 'N', 'mode', 'correction', 'order', 'mean', 'se', 'predicted_mean',
    'ks', 'dkw_margin', 'ks_pass', 'zero_cells_mean', 'expected_zero_cells',
    'replicates', 'seed', 'stream',
]


def run_mode_comparison(config, workers=1, quad_order=DEFAULT_QUAD_ORDER,
                        cell_quad_order=DEFAULT_CELL_QUAD_ORDER):
    """
    <Z, g> bajo las tres normalizaciones con sus correcciones simplificadas,
    más MaxOne con el signo de AddOne y MaxOne sin corrección.
    """
    start = time.perf_counter()
    order = 5 if config.spec.kappa() >= 5 else 3
    phantom = phantom_from_dict(config.phantom)
    threshold = config.thresholds['ks']
    margin = dkw_margin(config.replicates, config.thresholds['dkw_alpha'])
    if config.replicates < MIN_KS_REPLICATES:
        logger.warning('modes con M=%s < %s: la prueba KS tiene poca potencia', config.replicates, MIN_KS_REPLICATES)
    result = ExperimentResult('modes', MODES_COLUMNS, config=config)
    ratios = {}

    for gi, (n, m) in enumerate(config.grids):
        grid, xfield, g = _prepare(config, n, m, phantom, quad_order, cell_quad_order)
        variance = asymptotic_variance(phantom, g, quad_order)
        for di, N in enumerate(doses_for(config, n, m)):
            oracle = bias_oracle(xfield, N, g, NormalizationMode.MAX_ONE)
            labels = [(mode, 'correct', 0.0) for mode in MODES]
            probes = [(mode, simplified_correction(xfield, N, mode, order)) for mode in MODES]
            labels.append((NormalizationMode.MAX_ONE, 'wrong_sign', 2.0 * oracle))
            probes.append((NormalizationMode.MAX_ONE,
                           simplified_correction(xfield, N, NormalizationMode.ADD_ONE, order)))
            labels.append((NormalizationMode.MAX_ONE, 'none', oracle))
            probes.append((NormalizationMode.MAX_ONE, StepField(grid, np.zeros(grid.shape))))

            context = (EXPERIMENT_CODES['modes'], gi, di)
            payload = {
                'xfield': xfield, 'g': g, 'N': N, 'seed': config.seed,
                'context': context, 'sampler': config.sampler, 'probes': probes,
            }
            samples = run_replicates(_probe_batch, payload, config.replicates, workers)
            zero_mean = tree_mean(samples[:, -1].tolist())
            expected_zero = float(np.sum(np.exp(-N * np.exp(-xfield.values))))

            means = {}
            for p, (mode, kind, predicted) in enumerate(labels):
                mean, se, _ = _summarize(samples[:, p])
                means[(mode, kind)] = mean
                ks = ks_distance(samples[:, p], variance)
                result.add_row(
                    n=n, m=m, N=N, mode=mode.value, correction=kind, order=order,
                    mean=mean, se=se, predicted_mean=predicted, ks=ks,
                    dkw_margin=margin, ks_pass=ks < threshold + margin,
                    zero_cells_mean=zero_mean, expected_zero_cells=expected_zero,
                    replicates=config.replicates, seed=config.seed, stream=_stream_label(context),
                )
            correct = abs(means[(NormalizationMode.MAX_ONE, 'correct')])
            wrong = abs(means[(NormalizationMode.MAX_ONE, 'wrong_sign')])
            ratios[f'{n}x{m}:{N}'] = wrong / correct if correct > 0 else None

    correct_rows = [r for r in result.rows if r['correction'] == 'correct']
    result.summary = {
        'wrong_sign_bias_ratio': ratios,
        'all_correct_ks_pass': all(r['ks_pass'] for r in correct_rows),
        'wall_time': time.perf_counter() - start,
    }
    return result


EXPERIMENTS = {
    'lln': run_lln,
    'clt': run_clt,
    'be': run_be,
    'variance': run_variance_convergence,
    'modes': run_mode_comparison,
}


def write_result(result, out_dir, name=None, wall_time=None):
    """CSV (una fila por configuración) y manifiesto JSON, escritos juntos o ninguno"""
    name = name or result.name
    csv_path = os.path.join(out_dir, f'{name}.csv')
    manifest_path = os.path.join(out_dir, f'{name}.json')
    if wall_time is None:
        wall_time = result.summary.get('wall_time')
    summary = {k: v for k, v in result.summary.items() if k != 'wall_time'}
    manifest = {
        'name': result.name,
        'csv': os.path.basename(csv_path),
        'columns': list(result.columns),
        'rows': len(result.rows),
        'summary': summary,
        'config': result.config.to_dict() if result.config else None,
        'seed': result.config.seed if result.config else None,
        'versions': package_versions(),
        'wall_time': wall_time,
    }
    write_files(out_dir, {
        os.path.basename(csv_path): csv_text(result.columns, result.rows),
        os.path.basename(manifest_path): json_text(manifest),
    })
    logger.info('Resultados escritos en %s', csv_path)
    return csv_path, manifest_path
