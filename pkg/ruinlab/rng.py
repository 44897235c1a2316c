"""
Flujos aleatorios independientes por (semilla, flujo, índice)

Se usa el generador Philox (basado en contador): cada ensayo recibe su propio
flujo derivado de la semilla maestra, así el resultado no depende del orden ni
del número de hilos.
"""

import numpy as np

# Etiquetas de flujo
STREAM_TRIALS = 0
STREAM_YINF = 1
STREAM_MOMENTS = 2
STREAM_FIXED_POINT_A = 3
STREAM_FIXED_POINT_B = 4
STREAM_IDENTITY = 5
STREAM_CLAIM_BOUND = 6
STREAM_BLOCKS = 7
STREAM_PATHS = 8


def stream_rng(seed: int, stream: int, *index: int) -> np.random.Generator:
    """Generador del ensayo `index` dentro del flujo `stream`; `index` puede ser anidado"""
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(stream), *(int(i) for i in index)))
    return np.random.Generator(np.random.Philox(seq))
