"""
Estimación Monte Carlo de Ψ(u,r), Ḡ(u,r) y Ḡ*, y verificación de las cotas

Las estimaciones de ruina son bilaterales: p_low cuenta los ensayos censurados
como no arruinados y p_high como arruinados. Todos los intervalos son de
Wilson al 95 %.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .config import CENSORED_FLAG_FRACTION, CONFIDENCE, DEFAULT_R_GRID_FACTORS, KS_LEVEL
from .errors import CensoredSampleError, DegenerateResidualError, InvalidModelError
from .parallel import map_indexed
from .path_engine import Ruined, RiskModel, SimPolicy, run_trial, sample_Yinf, simulate_block
from .rng import (
    STREAM_CLAIM_BOUND,
    STREAM_FIXED_POINT_A,
    STREAM_FIXED_POINT_B,
    STREAM_IDENTITY,
    STREAM_TRIALS,
    STREAM_YINF,
    stream_rng,
)
from .tail_stats import ks_two_sample

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


def wilson_interval(k: int, n: int, confidence: float = CONFIDENCE) -> Interval:
    """Intervalo de Wilson para una proporción binomial"""
    if n <= 0:
        return (0.0, 1.0)
    z = float(stats.norm.ppf(0.5 + 0.5 * confidence))
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z / denom * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
    return (max(0.0, center - half), min(1.0, center + half))


# ==============================================================================
# Ψ(u, r)
# ==============================================================================


@dataclass(frozen=True)
class RuinEstimate:
    u: float
    r: float
    n_trials: int
    k_ruined: int
    k_censored: int
    seed: int
    n_continuous: int = 0
    n_jump: int = 0
    mean_overshoot: Optional[float] = None
    mean_clock: Optional[float] = None
    censored_indices: Tuple[int, ...] = ()
    wall_time: float = field(default=0.0, compare=False)

    @property
    def p_low(self) -> float:
        return self.k_ruined / self.n_trials

    @property
    def p_high(self) -> float:
        return (self.k_ruined + self.k_censored) / self.n_trials

    @property
    def ci_low(self) -> Interval:
        return wilson_interval(self.k_ruined, self.n_trials)

    @property
    def ci_high(self) -> Interval:
        return wilson_interval(self.k_ruined + self.k_censored, self.n_trials)

    @property
    def all_censored(self) -> bool:
        return self.k_censored == self.n_trials

    @property
    def censored_flag(self) -> bool:
        return self.k_censored > CENSORED_FLAG_FRACTION * self.n_trials

    def to_row(self) -> Dict[str, Any]:
        return {
            "u": self.u,
            "r": self.r,
            "n": self.n_trials,
            "k_ruin": self.k_ruined,
            "k_cens": self.k_censored,
            "p_low": self.p_low,
            "p_low_ci_lo": self.ci_low[0],
            "p_low_ci_hi": self.ci_low[1],
            "p_high": self.p_high,
            "p_high_ci_lo": self.ci_high[0],
            "p_high_ci_hi": self.ci_high[1],
            "seed": self.seed,
        }

    def to_dict(self, with_time: bool = True) -> Dict[str, Any]:
        out = {
            **self.to_row(),
            "crossings": {"continuous": self.n_continuous, "jump": self.n_jump},
            "mean_overshoot": self.mean_overshoot,
            "mean_clock": self.mean_clock,
            "all_censored": self.all_censored,
            "censored_flag": self.censored_flag,
        }
        if with_time:
            out["wall_time"] = self.wall_time
        return out


def estimate_ruin(
    model: RiskModel, u: float, policy: SimPolicy, n_trials: int, seed: int, threads: int = 1
) -> RuinEstimate:
    """n_trials ensayos independientes de run_trial, un flujo aleatorio por ensayo"""
    if n_trials < 1:
        raise InvalidModelError("n_trials debe ser >= 1", n_trials=n_trials)
    started = time.perf_counter()
    results = map_indexed(lambda i: run_trial(model, u, policy, stream_rng(seed, STREAM_TRIALS, i)), n_trials, threads)

    ruined = [res.outcome for res in results if isinstance(res.outcome, Ruined)]
    censored = tuple(i for i, res in enumerate(results) if res.censored)
    estimate = RuinEstimate(
        u=u,
        r=model.business.r,
        n_trials=n_trials,
        k_ruined=len(ruined),
        k_censored=len(censored),
        seed=seed,
        n_continuous=sum(1 for o in ruined if o.crossing == "continuous"),
        n_jump=sum(1 for o in ruined if o.crossing == "jump"),
        mean_overshoot=math.fsum(abs(o.x_at_tau) for o in ruined) / len(ruined) if ruined else None,
        mean_clock=math.fsum(o.clock_at_tau for o in ruined) / len(ruined) if ruined else None,
        censored_indices=censored,
        wall_time=time.perf_counter() - started,
    )
    if estimate.all_censored:
        logger.warning("u = %g: todos los ensayos censurados, la estimación degenera a [0, 1]", u)
    elif estimate.censored_flag:
        logger.warning("u = %g: %d ensayos censurados de %d", u, estimate.k_censored, n_trials)
    logger.debug("u = %g: Ψ̂ en [%.6f, %.6f]", u, estimate.p_low, estimate.p_high)
    return estimate


# ==============================================================================
# Ḡ(u, r) y Ḡ*
# ==============================================================================


def _yinf_values(
    model: RiskModel,
    policy: SimPolicy,
    n: int,
    seed: int,
    stream: int,
    threads: int,
    prefix: Tuple[int, ...] = (),
) -> np.ndarray:
    """n realizaciones de Y∞; las censuradas quedan como NaN"""

    def draw(i: int) -> float:
        try:
            return sample_Yinf(model, policy, stream_rng(seed, stream, *prefix, i)).value
        except CensoredSampleError:
            return math.nan

    return np.asarray(map_indexed(draw, n, threads), dtype=float)


@dataclass(frozen=True)
class GbarPoint:
    u: float
    k: int
    k_censored: int
    n: int

    @property
    def p_low(self) -> float:
        return self.k / self.n

    @property
    def p_high(self) -> float:
        return (self.k + self.k_censored) / self.n

    @property
    def ci_low(self) -> Interval:
        return wilson_interval(self.k, self.n)

    @property
    def ci_high(self) -> Interval:
        return wilson_interval(self.k + self.k_censored, self.n)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "u": self.u,
            "n": self.n,
            "k": self.k,
            "k_cens": self.k_censored,
            "p_low": self.p_low,
            "p_low_ci_lo": self.ci_low[0],
            "p_low_ci_hi": self.ci_low[1],
            "p_high": self.p_high,
            "p_high_ci_lo": self.ci_high[0],
            "p_high_ci_hi": self.ci_high[1],
        }


def _survival(values: np.ndarray, u_grid: Sequence[float]) -> List[GbarPoint]:
    n = values.size
    n_cens = int(np.isnan(values).sum())
    return [GbarPoint(u=float(u), k=int((values > u).sum()), k_censored=n_cens, n=n) for u in u_grid]


@dataclass(frozen=True)
class GstarEstimate:
    points: Tuple[Tuple[float, GbarPoint], ...]
    skipped_r: Tuple[float, ...] = ()
    claim_bound: Optional[GbarPoint] = None

    @property
    def value(self) -> float:
        return min(p.p_low for _, p in self.points) if self.points else 0.0

    @property
    def ci_lower(self) -> float:
        """Extremo conservador: mínimo sobre r del límite inferior de Wilson"""
        return min(p.ci_low[0] for _, p in self.points) if self.points else 0.0

    @property
    def argmin_r(self) -> Optional[float]:
        if not self.points:
            return None
        return min(self.points, key=lambda rp: rp[1].p_low)[0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "ci_lower": self.ci_lower,
            "argmin_r": self.argmin_r,
            "r_grid": [r for r, _ in self.points],
            "per_r": [{"r": r, **p.to_dict()} for r, p in self.points],
            "skipped_r": list(self.skipped_r),
            "claim_bound": None
            if self.claim_bound is None
            else {k: v for k, v in self.claim_bound.to_dict().items() if k != "u"},
        }


@dataclass(frozen=True)
class GbarEstimate:
    r: float
    seed: int
    points: Tuple[GbarPoint, ...]
    gstar: Optional[GstarEstimate] = None
    samples: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.points[0].n if self.points else 0

    @property
    def k_censored(self) -> int:
        return self.points[0].k_censored if self.points else 0

    @property
    def censored_flag(self) -> bool:
        return self.k_censored > CENSORED_FLAG_FRACTION * self.n

    @property
    def positive_range(self) -> Optional[float]:
        """Mayor u de la rejilla con Ḡ̂ > 0"""
        positive = [p.u for p in self.points if p.k > 0]
        return max(positive) if positive else None

    def point(self, u: float) -> GbarPoint:
        for p in self.points:
            if p.u == u:
                return p
        raise KeyError(u)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "seed": self.seed,
            "n": self.n,
            "k_cens": self.k_censored,
            "censored_flag": self.censored_flag,
            "positive_range": self.positive_range,
            "points": [p.to_dict() for p in self.points],
            "gstar": None if self.gstar is None else self.gstar.to_dict(),
        }


def default_r_grid(model: RiskModel) -> Tuple[float, ...]:
    mean = model.business.interarrival.mean
    return tuple(f * mean for f in DEFAULT_R_GRID_FACTORS)


def estimate_Gstar(
    model: RiskModel,
    policy: SimPolicy,
    n: int,
    seed: int,
    r_grid: Optional[Sequence[float]] = None,
    threads: int = 1,
) -> GstarEstimate:
    """Ḡ* ≈ min sobre la rejilla de r de Ḡ(0, r); con c < 0 añade la cota E[Ḡ(ξ, 0)]"""
    grid = tuple(r_grid) if r_grid is not None else default_r_grid(model)
    points: List[Tuple[float, GbarPoint]] = []
    skipped: List[float] = []
    for r in grid:
        try:
            model_r = model.with_clock(r)
        except DegenerateResidualError:
            logger.warning("r = %g fuera del soporte de F: se omite en Ḡ*", r)
            skipped.append(r)
            continue
        values = _yinf_values(model_r, policy, n, seed, STREAM_YINF, threads)
        points.append((r, _survival(values, [0.0])[0]))

    claim_bound = None
    if model.business.c < 0.0:
        base = model.with_clock(0.0)

        def exceeds(i: int) -> float:
            rng = stream_rng(seed, STREAM_CLAIM_BOUND, i)
            try:
                y = sample_Yinf(base, policy, rng).value
            except CensoredSampleError:
                return math.nan
            return 1.0 if y > base.business.claims.sample(rng) else 0.0

        flags = np.asarray(map_indexed(exceeds, n, threads), dtype=float)
        claim_bound = GbarPoint(
            u=0.0, k=int((flags == 1.0).sum()), k_censored=int(np.isnan(flags).sum()), n=n
        )
    return GstarEstimate(points=tuple(points), skipped_r=tuple(skipped), claim_bound=claim_bound)


def estimate_Gbar(
    model: RiskModel,
    u_grid: Sequence[float],
    r: float,
    policy: SimPolicy,
    n: int,
    seed: int,
    threads: int = 1,
    r_grid: Optional[Sequence[float]] = None,
    with_gstar: bool = True,
) -> GbarEstimate:
    """Supervivencia empírica de Y∞^r en la rejilla de u, con Ḡ*"""
    model_r = model.with_clock(r)
    values = _yinf_values(model_r, policy, n, seed, STREAM_YINF, threads)
    estimate = GbarEstimate(
        r=r,
        seed=seed,
        points=tuple(_survival(values, u_grid)),
        gstar=estimate_Gstar(model, policy, n, seed, r_grid, threads) if with_gstar else None,
        samples=values,
    )
    if estimate.censored_flag:
        logger.warning("Ḡ̂: %d de %d muestras de Y∞ censuradas", estimate.k_censored, n)
    return estimate


# ==============================================================================
# Cotas Ḡ <= Ψ <= Ḡ/Ḡ*
# ==============================================================================


@dataclass(frozen=True)
class SandwichPoint:
    u: float
    gbar_lower: float
    psi_upper: float
    lower_ok: bool
    psi_lower: float
    upper_bound: Optional[float]
    upper_status: str

    @property
    def lower_margin(self) -> float:
        return self.psi_upper - self.gbar_lower

    @property
    def upper_margin(self) -> Optional[float]:
        return None if self.upper_bound is None else self.upper_bound - self.psi_lower


@dataclass(frozen=True)
class SandwichReport:
    points: Tuple[SandwichPoint, ...]
    gstar_lower: float
    ruin: Tuple[RuinEstimate, ...]
    gbar: GbarEstimate

    @property
    def status(self) -> str:
        if any(not p.lower_ok or p.upper_status == "fail" for p in self.points):
            return "fail"
        if any(p.upper_status == "inconclusive" for p in self.points):
            return "inconclusive"
        return "pass"

    def to_dict(self, with_time: bool = True) -> Dict[str, Any]:
        return {
            "status": self.status,
            "gstar_lower": self.gstar_lower,
            "points": [
                {**vars(p), "lower_margin": p.lower_margin, "upper_margin": p.upper_margin} for p in self.points
            ],
            "ruin": [e.to_dict(with_time) for e in self.ruin],
            "gbar": self.gbar.to_dict(),
        }


def sandwich_check(
    model: RiskModel,
    u_grid: Sequence[float],
    r: float,
    policy: SimPolicy,
    n: int,
    seed: int,
    threads: int = 1,
    r_grid: Optional[Sequence[float]] = None,
) -> SandwichReport:
    """Contrastar Ḡ̂(u) <= Ψ̂(u) <= Ḡ̂(u)/Ḡ̂* con los extremos conservadores"""
    if model.business.sign_class == "non-life":
        logger.warning("Las cotas se formulan para modelos de renta o mixtos; el modelo es no-vida")
    model_r = model.with_clock(r)
    gbar = estimate_Gbar(model_r, u_grid, r, policy, n, seed, threads, r_grid)
    gstar_lower = gbar.gstar.ci_lower
    if gstar_lower <= 0.0:
        logger.warning("El intervalo de Ḡ* alcanza 0: la cota superior es inconclusa")

    points: List[SandwichPoint] = []
    ruin: List[RuinEstimate] = []
    for gp in gbar.points:
        est = estimate_ruin(model_r, gp.u, policy, n, seed, threads)
        ruin.append(est)
        lower_ok = gp.ci_low[0] <= est.ci_high[1]
        if gp.p_high == 0.0 or gstar_lower <= 0.0:
            bound, status = None, "inconclusive"
        else:
            bound = gp.ci_high[1] / gstar_lower
            status = "pass" if est.ci_low[0] <= bound else "fail"
        points.append(
            SandwichPoint(
                u=gp.u,
                gbar_lower=gp.ci_low[0],
                psi_upper=est.ci_high[1],
                lower_ok=lower_ok,
                psi_lower=est.ci_low[0],
                upper_bound=bound,
                upper_status=status,
            )
        )
    return SandwichReport(points=tuple(points), gstar_lower=gstar_lower, ruin=tuple(ruin), gbar=gbar)


# ==============================================================================
# Punto fijo Y∞ = Q + M·Ỹ∞
# ==============================================================================


@dataclass(frozen=True)
class FixedPointReport:
    statistic: float
    p_value: float
    n_a: int
    n_b: int
    censored_a: int
    censored_b: int
    tilde_from_residual: bool = False

    @property
    def passed(self) -> bool:
        return self.p_value > KS_LEVEL

    @property
    def censored_flag(self) -> bool:
        total = self.n_a + self.n_b + self.censored_a + self.censored_b
        return self.censored_a + self.censored_b > CENSORED_FLAG_FRACTION * total

    def to_dict(self) -> Dict[str, Any]:
        return {**vars(self), "passed": self.passed, "censored_flag": self.censored_flag}


def fixed_point_check(
    model: RiskModel,
    policy: SimPolicy,
    n: int,
    seed: int,
    threads: int = 1,
    tilde_from_residual: bool = False,
) -> FixedPointReport:
    """KS entre Y∞ directo y Q_1^r + M_1^r·Ỹ∞, con Ỹ∞ independiente y primer bloque de F"""
    a = _yinf_values(model, policy, n, seed, STREAM_FIXED_POINT_A, threads)

    def composed(i: int) -> float:
        rng = stream_rng(seed, STREAM_FIXED_POINT_B, i)
        first = simulate_block(model.investment, model.business, True, rng, n_sub=policy.n_sub).qm
        try:
            return sample_Yinf(model, policy, rng, residual_first=tilde_from_residual, start=first).value
        except CensoredSampleError:
            return math.nan

    b = np.asarray(map_indexed(composed, n, threads), dtype=float)
    a_ok, b_ok = a[~np.isnan(a)], b[~np.isnan(b)]
    statistic, p_value = ks_two_sample(a_ok, b_ok)
    report = FixedPointReport(
        statistic=statistic,
        p_value=p_value,
        n_a=int(a_ok.size),
        n_b=int(b_ok.size),
        censored_a=int(a.size - a_ok.size),
        censored_b=int(b.size - b_ok.size),
        tilde_from_residual=tilde_from_residual,
    )
    if report.censored_flag:
        logger.warning("Punto fijo: más del 1 %% de muestras censuradas")
    return report


# ==============================================================================
# Identidad exacta Ψ = Ḡ(u) / E[Ḡ(X_τ, D_τ) | τ < ∞]
# ==============================================================================


@dataclass(frozen=True)
class IdentityReport:
    u: float
    n_outer: int
    n_inner: int
    k_ruined: int
    k_censored: int
    psi_hat: float
    gbar_u: float
    denominator: Optional[float]
    ratio: Optional[float]
    stderr: Optional[float]

    @property
    def consistent(self) -> Optional[bool]:
        if self.ratio is None or self.stderr is None:
            return None
        return abs(self.psi_hat - self.ratio) <= 4.0 * self.stderr

    def to_dict(self) -> Dict[str, Any]:
        return {**vars(self), "consistent": self.consistent}


def ruin_identity_check(
    model: RiskModel,
    u: float,
    policy: SimPolicy,
    n_outer: int,
    n_inner: int,
    seed: int,
    threads: int = 1,
) -> IdentityReport:
    """Simulación anidada: Ḡ(X_τ, D_τ) con Y∞ de reloj inicial D_τ en cada estado de ruina"""
    trials = map_indexed(
        lambda i: run_trial(model, u, policy, stream_rng(seed, STREAM_IDENTITY, 0, i)), n_outer, threads
    )
    states = [(t.outcome.x_at_tau, t.outcome.clock_at_tau) for t in trials if isinstance(t.outcome, Ruined)]
    k_cens = sum(1 for t in trials if t.censored)

    def inner(j: int) -> float:
        x, d = states[j]
        model_d = model.with_clock(d)
        hits = total = 0
        for k in range(n_inner):
            try:
                y = sample_Yinf(model_d, policy, stream_rng(seed, STREAM_IDENTITY, 1, j, k)).value
            except CensoredSampleError:
                continue
            total += 1
            hits += y > x
        return hits / total if total else math.nan

    inner_means = np.asarray(map_indexed(inner, len(states), threads), dtype=float)
    inner_means = inner_means[~np.isnan(inner_means)]

    gvals = _yinf_values(model, policy, n_outer, seed, STREAM_IDENTITY, threads, prefix=(2,))
    gvals = gvals[~np.isnan(gvals)]
    g = float((gvals > u).mean()) if gvals.size else math.nan
    psi = len(states) / n_outer

    denominator = ratio = stderr = None
    if inner_means.size >= 2 and float(inner_means.mean()) > 0.0 and g > 0.0:
        denominator = float(inner_means.mean())
        ratio = g / denominator
        se_g = math.sqrt(g * (1.0 - g) / gvals.size)
        se_d = float(inner_means.std(ddof=1)) / math.sqrt(inner_means.size)
        se_ratio = ratio * math.hypot(se_g / g, se_d / denominator)
        se_psi = math.sqrt(psi * (1.0 - psi) / n_outer)
        stderr = math.hypot(se_psi, se_ratio)
    else:
        logger.warning("Identidad de ruina inconclusa: pocos estados de ruina o Ḡ̂(u) = 0")

    return IdentityReport(
        u=u,
        n_outer=n_outer,
        n_inner=n_inner,
        k_ruined=len(states),
        k_censored=k_cens,
        psi_hat=psi,
        gbar_u=g,
        denominator=denominator,
        ratio=ratio,
        stderr=stderr,
    )


# ==============================================================================
# Auditoría de censura
# ==============================================================================


@dataclass(frozen=True)
class AuditReport:
    n_audited: int
    newly_ruined: int
    still_censored: int
    resolved_low: float
    resolved_high: float
    p_low: float
    p_high: float

    @property
    def consistent(self) -> bool:
        return self.p_low <= self.resolved_low and self.resolved_high <= self.p_high

    def to_dict(self) -> Dict[str, Any]:
        return {**vars(self), "consistent": self.consistent}


def audit_censoring(
    model: RiskModel,
    u: float,
    policy: SimPolicy,
    estimate: RuinEstimate,
    factor: int = 10,
    max_audit: int = 1000,
    threads: int = 1,
) -> AuditReport:
    """Repetir ensayos censurados con presupuesto factor× sobre los mismos flujos aleatorios"""
    indices = estimate.censored_indices[:max_audit]
    wider = replace(
        policy,
        n_max_claims=policy.n_max_claims * factor,
        t_max=None if policy.t_max is None else policy.t_max * factor,
    )
    reruns = map_indexed(
        lambda j: run_trial(model, u, wider, stream_rng(estimate.seed, STREAM_TRIALS, indices[j])), len(indices), threads
    )
    newly = sum(1 for t in reruns if t.ruined)
    still = sum(1 for t in reruns if t.censored)
    unaudited = estimate.k_censored - len(indices)
    n = estimate.n_trials
    return AuditReport(
        n_audited=len(indices),
        newly_ruined=newly,
        still_censored=still,
        resolved_low=(estimate.k_ruined + newly) / n,
        resolved_high=(estimate.k_ruined + newly + still + unaudited) / n,
        p_low=estimate.p_low,
        p_high=estimate.p_high,
    )
