"""
Comando runs: listar las corridas del registro de un directorio de salida
"""

import logging
import os
from typing import Any, Dict, List, Optional

from ..config import LEDGER_FILENAME, LEDGER_URL
from ..errors import LedgerNotFoundError
from ..ledger import init_ledger, list_runs

logger = logging.getLogger(__name__)


def list_ledger(out: str, command: Optional[str] = None) -> List[Dict[str, Any]]:
    path = os.path.join(out, LEDGER_FILENAME)
    if not LEDGER_URL and not os.path.exists(path):
        raise LedgerNotFoundError(f"No hay registro de corridas en {path}", path=path)
    engine = init_ledger(out)
    if engine is None:
        raise LedgerNotFoundError(f"No se pudo abrir el registro de corridas de {out}", path=path)
    try:
        runs = list_runs(engine, command)
    finally:
        engine.dispose()
    logger.debug("%d corridas en %s", len(runs), path)
    return runs


def format_run(row: Dict[str, Any]) -> str:
    return (
        f"{row['id']:>4} {row['command']:<14} {row['scenario'] or '-':<28} "
        f"{row['status']:<13} {row['exit_code']:>2} {row['n_estimates']:>3}"
    )
