"""
Comando beta: raíz β de ψ, hipótesis estructural y tabla de ψ y H
"""

import logging
import math

import numpy as np

from ..beta_solver import check_standing_assumption, solve_beta
from ..errors import DomainError
from ..levy_models import cumulant_H, levy_exponent
from ..reports import write_csv, write_json
from ..schemas import ExperimentConfig
from . import CommandResult, RunOptions, exit_for, finalize, prepare

logger = logging.getLogger(__name__)

CURVE_POINTS = 41
CURVE_COLUMNS = ("q", "psi", "H")


def _curve(model, beta: float):
    law = model.investment
    q_hi = law.domain[1]
    top = min(2.0 * beta, q_hi * (1.0 - 1e-6)) if math.isfinite(q_hi) else 2.0 * beta
    rows = []
    for q in np.linspace(0.0, top, CURVE_POINTS):
        q = float(q)
        try:
            H = cumulant_H(law, model.business.interarrival, q)
        except DomainError:
            H = None
        rows.append({"q": q, "psi": levy_exponent(law, q), "H": H})
    return rows


def run(config: ExperimentConfig, options: RunOptions) -> CommandResult:
    built, seed, threads = prepare(config, options)
    model = built.model
    result = solve_beta(model)
    standing = check_standing_assumption(model)

    payload = {
        "command": "beta",
        **result.to_dict(),
        "psi_slope_at_zero": model.investment.psi_slope_at_zero,
        "approximate": model.investment.approximate,
        "model": model.to_dict(),
        "standing": standing.to_dict(),
    }
    write_json(options.path("beta.json"), payload, options.timestamp)
    curve = _curve(model, result.beta)
    write_csv(options.path("psi.csv"), CURVE_COLUMNS, curve, options.timestamp)

    failed = [c.name for c in standing.checks if not c.passed]
    notes = [f"condición no satisfecha: {name}" for name in failed]
    if model.investment.approximate:
        notes.append("saltos pequeños aproximados por difusión: β es el de la ley aproximada")
    return finalize(
        CommandResult(
            command="beta",
            exit_code=exit_for(standing.passed),
            headline=f"β = {result.beta:.12g} (dominio ({result.domain[0]:.6g}, {result.domain[1]:.6g}))",
            facts=[
                ("beta", result.beta),
                ("q̄", result.domain[1]),
                ("margen", result.margin),
                ("iteraciones", result.iterations),
                ("|ψ(β)|", result.residual),
                ("hipótesis estructural", standing.passed),
            ],
            tables=[{"title": "Hipótesis estructural", "columns": ["name", "passed"], "rows": [
                {"name": c.name, "passed": c.passed} for c in standing.checks
            ]}],
            notes=notes,
            seed=seed,
            threads=threads,
        ),
        options,
    )
