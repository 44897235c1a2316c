"""
Comando yinf: supervivencia Ḡ(u, r) de Y∞ y Ḡ* sobre la rejilla de r
"""

import logging
import math

from ..reports import write_csv, write_json
from ..ruin_mc import estimate_Gbar
from ..schemas import ExperimentConfig
from . import CommandResult, RunOptions, exit_for, finalize, prepare

logger = logging.getLogger(__name__)

GBAR_COLUMNS = ("u", "n", "k", "k_cens", "p_low", "p_low_ci_lo", "p_low_ci_hi", "p_high", "p_high_ci_lo", "p_high_ci_hi")
GSTAR_COLUMNS = ("r",) + GBAR_COLUMNS[1:]


def run(config: ExperimentConfig, options: RunOptions) -> CommandResult:
    built, seed, threads = prepare(config, options)
    model = built.model
    r = model.business.r
    gbar = estimate_Gbar(
        model, config.run.u_grid, r, built.policy, config.run.n_yinf, seed, threads, config.run.r_grid
    )
    gstar = gbar.gstar

    gbar_rows = [p.to_dict() for p in gbar.points]
    gstar_rows = [{"r": rr, **p.to_dict()} for rr, p in gstar.points]
    write_csv(options.path("gbar.csv"), GBAR_COLUMNS, gbar_rows, options.timestamp)
    write_csv(options.path("gstar.csv"), GSTAR_COLUMNS, gstar_rows, options.timestamp)
    write_csv(
        options.path("yinf_samples.csv"),
        ("y",),
        ({"y": None if math.isnan(y) else float(y)} for y in gbar.samples),
        options.timestamp,
    )
    write_json(
        options.path("yinf.json"),
        {"command": "yinf", "approximate": model.investment.approximate, "model": model.to_dict(), **gbar.to_dict()},
        options.timestamp,
    )

    notes = []
    if gbar.censored_flag:
        notes.append(f"{gbar.k_censored} de {gbar.n} muestras de Y∞ censuradas (> 1 %)")
    if gstar.skipped_r:
        notes.append(f"r fuera del soporte de F, omitidos en Ḡ*: {list(gstar.skipped_r)}")
    if gstar.ci_lower <= 0.0:
        notes.append("el intervalo de Ḡ* alcanza 0")
    if gbar.positive_range is not None:
        notes.append(f"Ḡ̂ > 0 verificado solo hasta u = {gbar.positive_range:g}")

    all_censored = gbar.n > 0 and gbar.k_censored == gbar.n
    return finalize(
        CommandResult(
            command="yinf",
            exit_code=exit_for(not all_censored),
            headline=f"Ḡ* ≈ {gstar.value:.4g} (IC inferior {gstar.ci_lower:.4g}), n = {gbar.n}",
            facts=[
                ("r", r),
                ("n", gbar.n),
                ("censuradas", gbar.k_censored),
                ("Ḡ*", gstar.value),
                ("Ḡ* IC inferior", gstar.ci_lower),
                ("argmin r", gstar.argmin_r),
            ],
            tables=[
                {"title": "Ḡ(u, r)", "columns": list(GBAR_COLUMNS), "rows": gbar_rows},
                {"title": "Ḡ(0, r) por r", "columns": list(GSTAR_COLUMNS), "rows": gstar_rows},
            ],
            notes=notes,
            seed=seed,
            threads=threads,
        ),
        options,
    )
