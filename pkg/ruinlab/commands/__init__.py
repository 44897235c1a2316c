"""
Comandos de la CLI: uno por módulo, con la misma firma run(config, options)
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from ..errors import EXIT_INCONCLUSIVE, EXIT_OK
from ..ledger import init_ledger, record_run
from ..reports import ensure_out_dir, json_safe, write_summary
from ..schemas import BuiltExperiment, ExperimentConfig, build_experiment

logger = logging.getLogger(__name__)

STATUS_BY_EXIT = {0: "ok", 1: "error", 2: "invalid", 3: "inconclusive"}
TAG_BY_EXIT = {0: "[OK]", 3: "[INCONCLUSO]"}


@dataclass
class RunOptions:
    out: str
    seed: Optional[int] = None
    threads: Optional[int] = None
    timestamp: bool = True
    ledger: bool = True
    scenario: Optional[str] = None
    input: Optional[str] = None
    samples: Optional[str] = None
    ledger_dir: Optional[str] = None

    def path(self, name: str) -> str:
        return os.path.join(ensure_out_dir(self.out), name)

    def nested(self, sub: str) -> "RunOptions":
        return replace(self, out=os.path.join(self.out, sub), ledger_dir=self.ledger_dir or self.out)


@dataclass
class CommandResult:
    command: str
    exit_code: int
    headline: str
    facts: List[Tuple[str, Any]] = field(default_factory=list)
    tables: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    estimates: List[Dict[str, Any]] = field(default_factory=list)
    seed: int = 0
    threads: int = 1

    @property
    def status(self) -> str:
        return STATUS_BY_EXIT.get(self.exit_code, "error")

    @property
    def line(self) -> str:
        """Línea única de resumen para stdout"""
        return f"{TAG_BY_EXIT.get(self.exit_code, '[ERROR]')} {self.command}: {self.headline}"


def exit_for(ok: bool) -> int:
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


def prepare(config: ExperimentConfig, options: RunOptions) -> Tuple[BuiltExperiment, int, int]:
    """Construir el modelo y resolver semilla e hilos (la línea de comandos manda sobre el JSON)"""
    built = build_experiment(config)
    seed = options.seed if options.seed is not None else config.run.seed
    threads = options.threads if options.threads is not None else config.run.threads
    return built, seed, threads


def finalize(result: CommandResult, options: RunOptions) -> CommandResult:
    """Escribir summary.md y dejar la corrida en el registro"""
    write_summary(
        ensure_out_dir(options.out),
        {
            "command": result.command,
            "scenario": options.scenario,
            "status": result.status,
            "headline": result.headline,
            "facts": result.facts,
            "tables": result.tables,
            "notes": result.notes,
        },
        timestamp=options.timestamp,
    )
    if options.ledger:
        engine = init_ledger(ensure_out_dir(options.ledger_dir or options.out))
        if engine is not None:
            record_run(
                engine,
                command=result.command,
                seed=result.seed,
                threads=result.threads,
                status=result.status,
                exit_code=result.exit_code,
                summary=json_safe({"headline": result.headline, **{k: v for k, v in result.facts}}),
                scenario=options.scenario,
                estimates=result.estimates,
            )
            engine.dispose()
    return result
