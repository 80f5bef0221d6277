"""Flujos aleatorios con clave: misma semilla y clave, misma secuencia"""

import numpy as np


def keyed_stream(seed, *key):
    """Generador Philox cuyo estado depende solo de (seed, key)"""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def replicate_stream(seed, replicate, *context):
    """Flujo de la réplica `replicate` dentro de la configuración `context`"""
    return keyed_stream(seed, *context, replicate)
