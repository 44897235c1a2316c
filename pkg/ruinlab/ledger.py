"""
Registro de corridas en SQLite (SQLAlchemy)

Cada comando deja una fila en `runs` y, si produjo estimaciones de ruina,
una fila por u en `estimates`. Los cálculos nunca leen el registro.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Iterable, List, Mapping, Optional

from sqlalchemy.engine import Engine

from .models import Base, Corrida, Estimacion, get_db, ledger_url, make_engine

logger = logging.getLogger(__name__)


def init_ledger(out_dir: str, url: Optional[str] = None) -> Optional[Engine]:
    """Crear las tablas del registro; devuelve None si no se pudo"""
    try:
        engine = make_engine(url or ledger_url(out_dir))
        Base.metadata.create_all(bind=engine)
        return engine
    except Exception as e:
        logger.error("No se pudo inicializar el registro de corridas: %s", e)
        return None


def record_run(
    engine: Engine,
    command: str,
    seed: int,
    threads: int,
    status: str,
    exit_code: int,
    summary: Optional[Mapping[str, Any]] = None,
    scenario: Optional[str] = None,
    estimates: Iterable[Mapping[str, Any]] = (),
) -> Optional[int]:
    """Guardar una corrida con sus estimaciones; un fallo del registro no aborta el comando"""
    with get_db(engine) as db:
        try:
            corrida = Corrida(
                command=command,
                scenario=scenario,
                seed=seed,
                threads=threads,
                status=status,
                exit_code=exit_code,
                summary=dict(summary) if summary is not None else None,
            )
            for row in estimates:
                corrida.estimaciones.append(
                    Estimacion(
                        u=row["u"],
                        r=row.get("r", 0.0),
                        n=row["n"],
                        k_ruin=row["k_ruin"],
                        k_cens=row.get("k_cens", 0),
                        p_low=row["p_low"],
                        p_high=row["p_high"],
                    )
                )
            db.add(corrida)
            db.commit()
            logger.debug("Corrida registrada: %r", corrida)
            return corrida.id
        except Exception as e:
            db.rollback()
            logger.error("Error al registrar la corrida: %s", e)
            return None


def list_runs(engine: Engine, command: Optional[str] = None) -> List[Dict[str, Any]]:
    """Corridas registradas, en orden de creación"""
    with get_db(engine) as db:
        query = db.query(Corrida)
        if command is not None:
            query = query.filter(Corrida.command == command)
        return [
            {
                "id": c.id,
                "command": c.command,
                "scenario": c.scenario,
                "seed": c.seed,
                "threads": c.threads,
                "status": c.status,
                "exit_code": c.exit_code,
                "n_estimates": len(c.estimaciones),
                "created_at": c.created_at.isoformat() if c.created_at is not None else None,
            }
            for c in query.order_by(Corrida.id).all()
        ]
