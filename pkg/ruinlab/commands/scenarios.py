"""
Comando scenarios: listar el catálogo o ejecutar un escenario completo
"""

import logging
import os
from dataclasses import replace
from typing import List, Optional

from ..reports import ensure_out_dir, write_csv
from ..scenarios import get_scenario, scenario_catalog
from ..schemas import serialize_config
from . import CommandResult, RunOptions, finalize
from . import beta as beta_cmd
from . import ruin as ruin_cmd
from . import yinf as yinf_cmd

logger = logging.getLogger(__name__)

CATALOG_COLUMNS = ("name", "tag", "approximate", "description")


def catalog_rows() -> List[dict]:
    return [
        {"name": s.name, "tag": s.tag or "", "approximate": s.approximate, "description": s.description}
        for s in scenario_catalog()
    ]


def list_catalog(options: Optional[RunOptions] = None) -> List[dict]:
    """Filas del catálogo; con --out también escribe scenarios.csv"""
    rows = catalog_rows()
    if options is not None and options.out:
        write_csv(options.path("scenarios.csv"), CATALOG_COLUMNS, rows, options.timestamp)
    return rows


def run_scenario(name: str, options: RunOptions) -> CommandResult:
    """beta (si β existe), ruin e yinf, cada uno en su subdirectorio"""
    scenario = get_scenario(name)
    options = replace(options, scenario=scenario.name)
    with open(os.path.join(ensure_out_dir(options.out), "config.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_config(scenario.config))
        fh.write("\n")

    results: List[CommandResult] = []
    if scenario.config.investment.sigma2 > 0.0 or scenario.config.investment.jumps or scenario.approximate:
        results.append(beta_cmd.run(scenario.config, options.nested("beta")))
    else:
        logger.info("Escenario %s: inversión determinista, se omite beta", scenario.name)
    results.append(ruin_cmd.run(scenario.config, options.nested("ruin")))
    results.append(yinf_cmd.run(scenario.config, options.nested("yinf")))

    exit_code = max(r.exit_code for r in results)
    return finalize(
        CommandResult(
            command="scenarios run",
            exit_code=exit_code,
            headline=f"{scenario.name} [{scenario.tag or 'oráculo'}]: " + "; ".join(
                f"{r.command} {r.status}" for r in results
            ),
            facts=[("escenario", scenario.name), ("etiqueta", scenario.tag), ("aproximado", scenario.approximate)],
            tables=[{
                "title": "Subcomandos",
                "columns": ["command", "status", "headline"],
                "rows": [{"command": r.command, "status": r.status, "headline": r.headline} for r in results],
            }],
            notes=[scenario.description],
            seed=results[-1].seed,
            threads=results[-1].threads,
        ),
        options,
    )
