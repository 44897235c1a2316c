"""
Comando tail: decaimiento u^{−β} de Ψ̂ y Hill sobre muestras de Y∞

Lee la tabla de ruin (--input) o la calcula con la rejilla del JSON; las
muestras de Y∞ (--samples) son opcionales.
"""

import logging
from typing import List, Optional, Tuple

from ..beta_solver import solve_beta
from ..errors import DegenerateInputError
from ..reports import read_csv, write_csv, write_json
from ..ruin_mc import estimate_ruin
from ..schemas import ExperimentConfig
from ..tail_stats import tail_report
from . import CommandResult, RunOptions, exit_for, finalize, prepare

logger = logging.getLogger(__name__)

TAIL_COLUMNS = ("u", "p_low", "p_high", "scaled_low", "scaled_high")


def _series_from_csv(path: str, r: float) -> Tuple[List[float], List[float], List[float]]:
    rows = read_csv(path)
    if not rows:
        raise DegenerateInputError(f"La tabla {path} no tiene filas")
    selected = [row for row in rows if float(row.get("r") or 0.0) == r] or rows
    selected.sort(key=lambda row: float(row["u"]))
    return (
        [float(row["u"]) for row in selected],
        [float(row["p_low"]) for row in selected],
        [float(row["p_high"]) for row in selected],
    )


def _samples_from_csv(path: str) -> List[float]:
    return [float(row["y"]) for row in read_csv(path) if row.get("y")]


def run(config: ExperimentConfig, options: RunOptions) -> CommandResult:
    built, seed, threads = prepare(config, options)
    model = built.model
    beta = solve_beta(model).beta

    if options.input:
        u_grid, p_low, p_high = _series_from_csv(options.input, model.business.r)
        logger.info("Ψ̂ leído de %s (%d puntos)", options.input, len(u_grid))
    else:
        estimates = [
            estimate_ruin(model, u, built.policy, config.run.n_trials, seed, threads) for u in config.run.u_grid
        ]
        u_grid = [e.u for e in estimates]
        p_low = [e.p_low for e in estimates]
        p_high = [e.p_high for e in estimates]

    samples: Optional[List[float]] = _samples_from_csv(options.samples) if options.samples else None
    report = tail_report(u_grid, p_low, p_high, beta, samples=samples)

    rows = [
        {"u": u, "p_low": lo, "p_high": hi, "scaled_low": u**beta * lo, "scaled_high": u**beta * hi}
        for u, lo, hi in zip(report.u_grid, report.p_low, report.p_high)
    ]
    write_csv(options.path("tail.csv"), TAIL_COLUMNS, rows, options.timestamp)
    write_json(
        options.path("tail.json"),
        {"command": "tail", "approximate": model.investment.approximate, **report.to_dict()},
        options.timestamp,
    )

    facts = [
        ("beta", beta),
        ("pendiente p_low", report.low.slope),
        ("pendiente p_high", report.high.slope),
        ("planitud p_low", report.low.flatness),
        ("planitud p_high", report.high.flatness),
    ]
    if report.hill is not None:
        facts.append(("Hill α̂", report.hill))
        facts.append(("Hill k", report.hill_k))
    notes = [] if report.passed else ["la rejilla no muestra el decaimiento u^{−β} con las tolerancias fijadas"]
    return finalize(
        CommandResult(
            command="tail",
            exit_code=exit_for(report.passed),
            headline=(
                f"pendientes {report.low.slope:.3f} / {report.high.slope:.3f} frente a −β = {-beta:.3f}, "
                f"planitud {max(report.low.flatness, report.high.flatness):.3g}"
            ),
            facts=facts,
            tables=[{"title": "u^β·Ψ̂(u)", "columns": list(TAIL_COLUMNS), "rows": rows}],
            notes=notes,
            seed=seed,
            threads=threads,
        ),
        options,
    )
