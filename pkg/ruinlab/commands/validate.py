"""
Comando validate: baterías de invariantes sobre un modelo

Cada batería termina en pass / fail / inconclusive / skipped; el comando sale
con 0 solo si ninguna falla ni queda inconclusa.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

import numpy as np

from ..beta_solver import check_standing_assumption, verify_unit_mean
from ..errors import DegenerateInvestmentError, RuinLabError
from ..levy_models import residual_law, validate_delay_dominance
from ..path_engine import RiskModel, SimPolicy, run_trial, trace_path
from ..reports import write_csv, write_json
from ..rng import STREAM_PATHS, stream_rng
from ..config import UNIT_MEAN_MIN_N
from ..ruin_mc import (
    audit_censoring,
    default_r_grid,
    estimate_ruin,
    fixed_point_check,
    ruin_identity_check,
    sandwich_check,
)
from ..schemas import ExperimentConfig
from ..tail_stats import ks_two_sample
from . import CommandResult, RunOptions, exit_for, finalize, prepare

logger = logging.getLogger(__name__)

N_PATHS = 20
PATH_BLOCKS = 10
IDENTITY_RTOL = 1e-9
MEMORY_R = 3.0
MEMORY_N = 10_000
IDENTITY_MAX_OUTER = 2000
IDENTITY_INNER = 20
VALIDATE_COLUMNS = ("name", "status")


@dataclass
class Suite:
    name: str
    status: str
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "status": self.status, **self.detail}


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


@dataclass
class _Context:
    model: RiskModel
    policy: SimPolicy
    config: ExperimentConfig
    seed: int
    threads: int
    beta: Any = None


def _standing(ctx: _Context) -> Suite:
    if not ctx.model.investment.nondegenerate:
        return Suite("standing_assumption", "skipped", {"reason": "inversión determinista"})
    report = check_standing_assumption(ctx.model)
    if report.beta is not None:
        ctx.beta = report.beta.beta
    return Suite("standing_assumption", _status(report.passed), report.to_dict())


def _unit_mean(ctx: _Context) -> Suite:
    if ctx.beta is None:
        return Suite("unit_mean", "skipped", {"reason": "β no disponible"})
    report = verify_unit_mean(ctx.model, ctx.beta, max(ctx.config.run.n_yinf, UNIT_MEAN_MIN_N), ctx.seed, ctx.threads)
    return Suite("unit_mean", _status(report.within_4se), report.to_dict())


def _delay_dominance(ctx: _Context) -> Suite:
    law = ctx.model.business.interarrival
    t_grid = [law.mean * f for f in np.linspace(0.05, 5.0, 40)]
    report = validate_delay_dominance(law, default_r_grid(ctx.model), t_grid)
    return Suite("delay_dominance", _status(report.passed), report.to_dict())


def _memorylessness(ctx: _Context) -> Suite:
    law = ctx.model.business.interarrival
    if law.family != "exponential":
        return Suite("memorylessness", "skipped", {"reason": f"ley entre siniestros '{law.family}'"})
    a = law.sample(stream_rng(ctx.seed, STREAM_PATHS, 0, 0), MEMORY_N)
    b = residual_law(law, MEMORY_R * law.mean).sample(stream_rng(ctx.seed, STREAM_PATHS, 0, 1), MEMORY_N)
    statistic, p_value = ks_two_sample(a, b)
    return Suite("memorylessness", _status(p_value > 0.01), {"statistic": statistic, "p_value": p_value})


def _pathwise_identity(ctx: _Context) -> Suite:
    u = ctx.config.run.u_grid[-1]
    worst = 0.0
    for i in range(N_PATHS):
        trace = trace_path(ctx.model, u, ctx.policy, stream_rng(ctx.seed, STREAM_PATHS, 1, i), PATH_BLOCKS)
        scale = np.maximum(np.abs(trace.X_cauchy), 1.0)
        worst = max(worst, float(np.max(np.abs(trace.X_cauchy - trace.X_recursive) / scale)))
    return Suite("pathwise_identity", _status(worst <= IDENTITY_RTOL), {"max_rel_error": worst, "paths": N_PATHS})


def _u_nesting(ctx: _Context) -> Suite:
    grid = ctx.config.run.u_grid
    violations = 0
    for i in range(N_PATHS):
        results = [run_trial(ctx.model, u, ctx.policy, stream_rng(ctx.seed, STREAM_PATHS, 2, i)) for u in grid]
        ruined = [res.ruined for res in results]
        taus = [res.outcome.tau for res in results if res.ruined]
        if any(later and not earlier for earlier, later in zip(ruined, ruined[1:])):
            violations += 1
        elif any(b < a for a, b in zip(taus, taus[1:])):
            violations += 1
    return Suite("u_nesting", _status(violations == 0), {"violations": violations, "paths": N_PATHS})


def _sandwich(ctx: _Context) -> Suite:
    if ctx.model.business.sign_class == "non-life":
        return Suite("sandwich", "skipped", {"reason": "modelo no-vida"})
    run = ctx.config.run
    report = sandwich_check(
        ctx.model, run.u_grid, ctx.model.business.r, ctx.policy, run.n_yinf, ctx.seed, ctx.threads, run.r_grid
    )
    detail = report.to_dict(with_time=False)
    return Suite("sandwich", report.status, {"gstar_lower": detail["gstar_lower"], "points": detail["points"]})


def _ruin_identity(ctx: _Context) -> Suite:
    if ctx.model.business.sign_class == "non-life":
        return Suite("ruin_identity", "skipped", {"reason": "modelo no-vida"})
    run = ctx.config.run
    report = ruin_identity_check(
        ctx.model,
        run.u_grid[0],
        ctx.policy,
        min(run.n_trials, IDENTITY_MAX_OUTER),
        IDENTITY_INNER,
        ctx.seed,
        ctx.threads,
    )
    consistent = report.consistent
    status = "inconclusive" if consistent is None else _status(consistent)
    return Suite("ruin_identity", status, report.to_dict())


def _fixed_point(ctx: _Context) -> Suite:
    report = fixed_point_check(ctx.model, ctx.policy, ctx.config.run.n_yinf, ctx.seed, ctx.threads)
    return Suite("fixed_point", _status(report.passed), report.to_dict())


def _censoring(ctx: _Context) -> Suite:
    u = ctx.config.run.u_grid[0]
    estimate = estimate_ruin(ctx.model, u, ctx.policy, ctx.config.run.n_trials, ctx.seed, ctx.threads)
    if estimate.k_censored == 0:
        return Suite("censoring_audit", "pass", {"u": u, "k_censored": 0})
    report = audit_censoring(ctx.model, u, ctx.policy, estimate, threads=ctx.threads)
    return Suite("censoring_audit", _status(report.consistent), {"u": u, **report.to_dict()})


SUITES: List[Callable[[_Context], Suite]] = [
    _standing,
    _unit_mean,
    _delay_dominance,
    _memorylessness,
    _pathwise_identity,
    _u_nesting,
    _sandwich,
    _ruin_identity,
    _fixed_point,
    _censoring,
]


def _run_suite(fn: Callable[[_Context], Suite], ctx: _Context) -> Suite:
    name = fn.__name__.lstrip("_")
    try:
        suite = fn(ctx)
    except DegenerateInvestmentError as exc:
        return Suite(name, "skipped", {"reason": exc.message})
    except RuinLabError as exc:
        logger.warning("Batería %s: %s", name, exc.message)
        return Suite(name, "inconclusive", exc.detail)
    logger.info("Batería %s: %s", suite.name, suite.status)
    return suite


def run(config: ExperimentConfig, options: RunOptions) -> CommandResult:
    built, seed, threads = prepare(config, options)
    ctx = _Context(model=built.model, policy=built.policy, config=config, seed=seed, threads=threads)
    suites = [_run_suite(fn, ctx) for fn in SUITES]

    rows = [{"name": s.name, "status": s.status} for s in suites]
    write_csv(options.path("validate.csv"), VALIDATE_COLUMNS, rows, options.timestamp)
    write_json(
        options.path("validate.json"),
        {
            "command": "validate",
            "approximate": built.model.investment.approximate,
            "model": built.model.to_dict(),
            "suites": [s.to_dict() for s in suites],
        },
        options.timestamp,
    )

    counts = {k: sum(1 for s in suites if s.status == k) for k in ("pass", "fail", "inconclusive", "skipped")}
    ok = counts["fail"] == 0 and counts["inconclusive"] == 0
    notes = [f"{s.name}: {s.status}" for s in suites if s.status in ("fail", "inconclusive")]
    return finalize(
        CommandResult(
            command="validate",
            exit_code=exit_for(ok),
            headline=", ".join(f"{v} {k}" for k, v in counts.items()),
            facts=[("beta", ctx.beta), *counts.items()],
            tables=[{"title": "Baterías", "columns": list(VALIDATE_COLUMNS), "rows": rows}],
            notes=notes,
            seed=seed,
            threads=threads,
        ),
        options,
    )
