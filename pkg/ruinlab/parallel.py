"""
Ejecución paralela de ensayos indexados
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

T = TypeVar("T")

logger = logging.getLogger(__name__)


def map_indexed(fn: Callable[[int], T], n: int, threads: int = 1) -> List[T]:
    """Aplicar fn a 0..n-1 y devolver los resultados en orden de índice"""
    if threads <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    logger.debug("Repartiendo %d tareas en %d hilos", n, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))
