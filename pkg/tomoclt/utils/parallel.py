"""Reparto de réplicas entre procesos y reducción determinista"""

import concurrent.futures as cf
import logging

import numpy as np

logger = logging.getLogger(__name__)


def replicate_batches(total, workers):
    """Bloques contiguos de índices de réplica, uno o más por worker"""
    workers = max(1, int(workers))
    base, extra = divmod(total, workers)
    sizes = [base + (1 if i < extra else 0) for i in range(workers)]
    batches = []
    start = 0
    for size in sizes:
        if size > 0:
            batches.append(range(start, start + size))
        start += size
    return batches


def ordered_map(worker, batches, payload, workers=1):
    """
    Ejecuta worker(batch, payload) sobre cada bloque y concatena los
    resultados en el orden de los bloques, sin importar cuál termina primero
    """
    if workers <= 1 or len(batches) <= 1:
        parts = [worker(batch, payload) for batch in batches]
    else:
        logger.debug('Repartiendo %s bloques en %s procesos', len(batches), workers)
        with cf.ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(worker, batch, payload) for batch in batches]
            parts = [f.result() for f in futs]
    if not parts:
        return np.empty((0,))
    return np.concatenate([np.asarray(p) for p in parts], axis=0)


def tree_sum(values):
    """Suma por pares en orden fijo: el resultado no depende del reparto"""
    values = [float(v) for v in values]
    if not values:
        return 0.0
    while len(values) > 1:
        paired = [values[i] + values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]


def tree_mean(values):
    values = list(values)
    return tree_sum(values) / len(values) if values else float('nan')
