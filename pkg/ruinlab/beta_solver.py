"""
Exponente de cola β: raíz positiva de ψ (equivalentemente de H)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy import optimize

from .config import (
    BETA_MAX_ITER,
    BETA_Q_CAP,
    BETA_Q_START,
    BETA_TOL,
    INTERIOR_MARGIN,
    UNIT_MEAN_MIN_N,
)
from .errors import (
    BetaConvergenceError,
    DegenerateInvestmentError,
    DomainError,
    InvalidModelError,
    NoPositiveRootError,
    RootAtBoundaryError,
    RuinLabError,
)
from .levy_models import InterarrivalLaw, LogPriceLaw, cumulant_H, levy_exponent, mgf_interarrival, sample_log_price
from .parallel import map_indexed
from .path_engine import RiskModel, simulate_block
from .rng import STREAM_BLOCKS, STREAM_MOMENTS, stream_rng

logger = logging.getLogger(__name__)

MOMENT_CHUNK = 65536
Q1_SUBSAMPLE = 10_000
TAIL_STABILITY_SHARE = 0.01
INF = math.inf


@dataclass(frozen=True)
class BetaResult:
    beta: float
    domain: Tuple[float, float]
    margin: float
    iterations: int
    bracket: Tuple[float, float]
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "beta": self.beta,
            "domain": list(self.domain),
            "margin": self.margin,
            "diagnostics": {
                "iterations": self.iterations,
                "bracket": list(self.bracket),
                "residual": self.residual,
            },
        }


def _investment(model: Union[RiskModel, LogPriceLaw]) -> LogPriceLaw:
    return model.investment if isinstance(model, RiskModel) else model


def solve_beta(model: Union[RiskModel, LogPriceLaw]) -> BetaResult:
    """Raíz positiva única de ψ en el interior de su dominio"""
    law = _investment(model)
    if not law.nondegenerate:
        raise DegenerateInvestmentError("R es determinista (σ² = 0 y sin saltos): β no existe")

    slope = law.psi_slope_at_zero
    if slope >= 0.0:
        raise NoPositiveRootError(f"ψ'(0) = {slope:.6g} >= 0: ψ no se anula en (0, q̄)", psi_slope=slope)

    q_lo, q_hi = law.domain
    cap = min(q_hi * (1.0 - 1e-9), BETA_Q_CAP)
    capped_by_domain = q_hi * (1.0 - 1e-9) < BETA_Q_CAP

    def psi(q: float) -> float:
        return levy_exponent(law, q)

    lo, hi = 0.0, BETA_Q_START
    if psi(hi) >= 0.0:
        raise NoPositiveRootError(f"ψ cambia de signo antes de q = {BETA_Q_START}", psi_slope=slope)
    while psi(hi) < 0.0:
        if hi >= cap:
            if capped_by_domain:
                raise RootAtBoundaryError(
                    f"ψ < 0 hasta el borde del dominio q̄ = {q_hi}: la raíz no es interior", q_hi=q_hi
                )
            raise NoPositiveRootError(f"ψ < 0 en todo (0, {cap}]", cap=cap)
        lo, hi = hi, min(2.0 * hi, cap)

    logger.debug("Intervalo de β: [%g, %g]", lo, hi)
    beta, info = optimize.brentq(psi, lo, hi, xtol=1e-15, maxiter=BETA_MAX_ITER, full_output=True, disp=False)
    residual = abs(psi(beta))
    if not info.converged or residual > BETA_TOL:
        raise BetaConvergenceError(
            f"brentq no alcanzó |ψ(β)| <= {BETA_TOL} ({info.iterations} iteraciones, residuo {residual:.3e})",
            iterations=info.iterations,
            residual=residual,
        )
    if beta * (1.0 + INTERIOR_MARGIN) >= q_hi:
        raise RootAtBoundaryError(
            f"β = {beta:.12g} a menos de {INTERIOR_MARGIN:g}·β del borde q̄ = {q_hi}", beta=beta, q_hi=q_hi
        )
    return BetaResult(
        beta=beta,
        domain=(q_lo, q_hi),
        margin=q_hi - beta,
        iterations=info.iterations,
        bracket=(lo, hi),
        residual=residual,
    )


# ==============================================================================
# Hipótesis estructural
# ==============================================================================


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class StandingReport:
    checks: Tuple[ConditionCheck, ...]
    beta: Optional[BetaResult] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "beta": None if self.beta is None else self.beta.to_dict(),
            "checks": [{"name": c.name, "passed": c.passed, **c.detail} for c in self.checks],
        }


def _interarrival_moment(law: InterarrivalLaw) -> ConditionCheck:
    """E[e^{εT_1}] < ∞ para algún ε > 0, evaluado en ε = min(s̄/2, 1)"""
    eps = min(0.5 * law.mgf_upper, 1.0)
    detail: Dict[str, Any] = {"mgf_upper": law.mgf_upper, "eps": eps}
    if not eps > 0.0:
        return ConditionCheck("interarrival_exponential_moment", False, detail)
    try:
        value = mgf_interarrival(law, eps)
    except DomainError:
        value = INF
    detail["mgf"] = value
    return ConditionCheck("interarrival_exponential_moment", math.isfinite(value), detail)


def check_standing_assumption(model: RiskModel) -> StandingReport:
    """Comprobar no degeneración, existencia e interioridad de β y el momento exponencial de T_1"""
    law = model.investment
    interarrival = model.business.interarrival
    checks: List[ConditionCheck] = [ConditionCheck("nondegenerate", law.nondegenerate)]

    checks.append(_interarrival_moment(interarrival))

    result: Optional[BetaResult] = None
    try:
        result = solve_beta(law)
        checks.append(ConditionCheck("positive_root", True, {"beta": result.beta}))
    except RuinLabError as exc:
        checks.append(ConditionCheck("positive_root", False, {"error": type(exc).__name__, "message": exc.message}))

    if result is not None:
        q_beyond = result.beta * (1.0 + INTERIOR_MARGIN)
        try:
            h_beyond = cumulant_H(law, interarrival, q_beyond)
            checks.append(ConditionCheck("interior_root", math.isfinite(h_beyond), {"q": q_beyond, "H": h_beyond}))
        except DomainError as exc:
            checks.append(
                ConditionCheck("interior_root", False, {"q": q_beyond, "error": "RootAtBoundaryError", "stage": exc.stage})
            )
        claims = model.business.claims
        checks.append(
            ConditionCheck("claims_abs_moment", claims.abs_moment_finite(result.beta), {"family": claims.family})
        )
    return StandingReport(checks=tuple(checks), beta=result)


# ==============================================================================
# E[M^β] = 1
# ==============================================================================


@dataclass(frozen=True)
class UnitMeanReport:
    n: int
    beta: float
    mean: float
    stderr: float
    within_4se: bool
    log_moment: float
    log_moment_stable: bool
    q1_abs_moment: float
    q1_stable: bool
    q1_n: int

    def to_dict(self) -> Dict[str, Any]:
        return dict(vars(self))


def _moment_chunk(law: LogPriceLaw, model: RiskModel, beta: float, seed: int, n: int, index: int):
    size = min(MOMENT_CHUNK, n - index * MOMENT_CHUNK)
    rng = stream_rng(seed, STREAM_MOMENTS, index)
    T = model.business.interarrival.sample(rng, size)
    V = sample_log_price(law, T, rng)
    w = np.exp(-beta * V) if beta != 0.0 else np.ones(size)
    lw = w * np.maximum(-V, 0.0)
    return math.fsum(w), math.fsum(w * w), math.fsum(lw), float(lw.max())


def verify_unit_mean(model: RiskModel, beta: float, n: int, seed: int, threads: int = 1) -> UnitMeanReport:
    """Media empírica de M_1^β = e^{−βV_{T_1}} y proxies de finitud de momentos"""
    if n < UNIT_MEAN_MIN_N:
        raise InvalidModelError(f"verify_unit_mean requiere n >= {UNIT_MEAN_MIN_N}", n=n)
    law = model.investment
    n_chunks = -(-n // MOMENT_CHUNK)
    parts = map_indexed(lambda i: _moment_chunk(law, model, beta, seed, n, i), n_chunks, threads)
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    sl = math.fsum(p[2] for p in parts)
    max_l = max(p[3] for p in parts)

    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    stderr = math.sqrt(var / n) if n > 1 else 0.0

    q1_n = min(n, Q1_SUBSAMPLE)
    q_abs = map_indexed(
        lambda i: abs(simulate_block(law, model.business, False, stream_rng(seed, STREAM_BLOCKS, i)).qm.Q) ** beta,
        q1_n,
        threads,
    )
    q_total = math.fsum(q_abs)

    report = UnitMeanReport(
        n=n,
        beta=beta,
        mean=mean,
        stderr=stderr,
        within_4se=abs(mean - 1.0) <= 4.0 * stderr,
        log_moment=sl / n,
        log_moment_stable=max_l <= TAIL_STABILITY_SHARE * sl if sl > 0.0 else True,
        q1_abs_moment=q_total / q1_n,
        q1_stable=max(q_abs) <= TAIL_STABILITY_SHARE * q_total if q_total > 0.0 else True,
        q1_n=q1_n,
    )
    logger.info("E[M^β] = %.6f ± %.2e (n = %d)", report.mean, report.stderr, n)
    return report
