"""
Comando ruin: Ψ̂(u, r) bilateral sobre la rejilla de u
"""

import logging

from ..reports import write_csv, write_json
from ..ruin_mc import estimate_ruin
from ..schemas import ExperimentConfig
from . import CommandResult, RunOptions, exit_for, finalize, prepare

logger = logging.getLogger(__name__)

RUIN_COLUMNS = (
    "u",
    "r",
    "n",
    "k_ruin",
    "k_cens",
    "p_low",
    "p_low_ci_lo",
    "p_low_ci_hi",
    "p_high",
    "p_high_ci_lo",
    "p_high_ci_hi",
    "seed",
)


def run(config: ExperimentConfig, options: RunOptions) -> CommandResult:
    built, seed, threads = prepare(config, options)
    estimates = [
        estimate_ruin(built.model, u, built.policy, config.run.n_trials, seed, threads) for u in config.run.u_grid
    ]
    rows = [e.to_row() for e in estimates]
    write_csv(options.path("ruin.csv"), RUIN_COLUMNS, rows, options.timestamp)
    write_json(
        options.path("ruin.json"),
        {
            "command": "ruin",
            "approximate": built.model.investment.approximate,
            "sign_class": built.model.business.sign_class,
            "model": built.model.to_dict(),
            "estimates": [e.to_dict(with_time=options.timestamp) for e in estimates],
        },
        options.timestamp,
    )

    notes = [f"u = {e.u!r}: todos los ensayos censurados" for e in estimates if e.all_censored]
    notes += [
        f"u = {e.u!r}: {e.k_censored} ensayos censurados (> 1 %)"
        for e in estimates
        if e.censored_flag and not e.all_censored
    ]
    if built.model.investment.approximate:
        notes.append("saltos pequeños aproximados por difusión")
    span = ", ".join(f"Ψ({e.u:g}) ∈ [{e.p_low:.4g}, {e.p_high:.4g}]" for e in estimates)
    return finalize(
        CommandResult(
            command="ruin",
            exit_code=exit_for(not any(e.all_censored for e in estimates)),
            headline=span,
            facts=[("n_trials", config.run.n_trials), ("r", built.model.business.r), ("seed", seed)],
            tables=[{"title": "Probabilidad de ruina", "columns": list(RUIN_COLUMNS), "rows": rows}],
            notes=notes,
            estimates=rows,
            seed=seed,
            threads=threads,
        ),
        options,
    )
