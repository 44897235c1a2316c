"""
Motor de trayectorias del modelo de riesgo con inversión

Entre dos siniestros el capital evoluciona como X_t = e^{V_t}(u − Y_t) con
Y_t = −∫ e^{−V_{s−}} dP_s. Cada bloque entre siniestros produce el par
(Q_k, M_k); Y en los instantes de siniestro es Y_{T_n} = Σ A_{k−1}Q_k con
A_n = M_1···M_n.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from functools import cached_property
from typing import ClassVar, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from .config import DEFAULT_EPS_A, DEFAULT_N_MAX_CLAIMS, DEFAULT_N_SUB, DEFAULT_U_MARGIN
from .errors import CensoredSampleError, InvalidModelError
from .levy_models import (
    INF,
    InterarrivalLaw,
    LevyTriplet,
    LogPriceLaw,
    check_family_params,
    residual_law,
)

logger = logging.getLogger(__name__)

BISECTION_STEPS = 20

SIGN_CLASSES = ("annuity", "non-life", "mixed")


# ==============================================================================
# Leyes de los siniestros ξ
# ==============================================================================


class ClaimLaw(ABC):
    """Ley F_ξ de las marcas del proceso de negocio, con F_ξ({0}) = 0"""

    family: ClassVar[str]

    @property
    @abstractmethod
    def lower(self) -> float:
        ...

    @property
    @abstractmethod
    def upper(self) -> float:
        ...

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        ...

    @property
    @abstractmethod
    def charges_near_zero_plus(self) -> bool:
        """F_ξ((0, ε)) > 0 para todo ε > 0"""

    def abs_moment_finite(self, beta: float) -> bool:
        """E|ξ|^β < ∞"""
        return True

    @abstractmethod
    def params(self) -> Dict[str, float]:
        ...

    def describe(self) -> Dict[str, object]:
        return {"family": self.family, "params": self.params(), "sign_class": self.sign_class}

    @property
    def sign_class(self) -> str:
        if self.lower > 0.0:
            return "annuity"
        if self.upper < 0.0:
            return "non-life"
        return "mixed"

    @property
    def unbounded_below(self) -> bool:
        return self.lower == -INF

    @property
    def unbounded_above(self) -> bool:
        return self.upper == INF

    @property
    def can_be_negative(self) -> bool:
        return self.lower < 0.0


def _draw(values: np.ndarray, size: Optional[int]):
    return float(values[0]) if size is None else values


@dataclass(frozen=True)
class PointClaim(ClaimLaw):
    value: float
    family: ClassVar[str] = "point"

    def __post_init__(self):
        if self.value == 0.0:
            raise InvalidModelError("F_ξ({0}) debe ser 0: siniestro puntual nulo")

    @property
    def lower(self):
        return self.value

    @property
    def upper(self):
        return self.value

    def sample(self, rng, size=None):
        return _draw(np.full(1 if size is None else size, self.value), size)

    charges_near_zero_plus = False

    def params(self):
        return {"value": self.value}


@dataclass(frozen=True)
class ExponentialClaim(ClaimLaw):
    mean: float
    sign: float = 1.0
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        if self.mean <= 0.0 or self.sign not in (1.0, -1.0):
            raise InvalidModelError("Siniestro exponencial requiere mean > 0 y sign ±1", mean=self.mean, sign=self.sign)

    @property
    def lower(self):
        return 0.0 if self.sign > 0 else -INF

    @property
    def upper(self):
        return INF if self.sign > 0 else 0.0

    @property
    def sign_class(self):
        return "annuity" if self.sign > 0 else "non-life"

    def sample(self, rng, size=None):
        return _draw((self.sign * self.mean) * rng.standard_exponential(1 if size is None else size), size)

    @property
    def charges_near_zero_plus(self):
        return self.sign > 0

    def params(self):
        return {"mean": self.mean, "sign": self.sign}


@dataclass(frozen=True)
class GammaClaim(ClaimLaw):
    shape: float
    scale: float
    sign: float = 1.0
    family: ClassVar[str] = "gamma"

    def __post_init__(self):
        if self.shape <= 0.0 or self.scale <= 0.0 or self.sign not in (1.0, -1.0):
            raise InvalidModelError("Siniestro gamma requiere shape, scale > 0 y sign ±1")

    @property
    def lower(self):
        return 0.0 if self.sign > 0 else -INF

    @property
    def upper(self):
        return INF if self.sign > 0 else 0.0

    @property
    def sign_class(self):
        return "annuity" if self.sign > 0 else "non-life"

    def sample(self, rng, size=None):
        return _draw((self.sign * self.scale) * rng.standard_gamma(self.shape, 1 if size is None else size), size)

    @property
    def charges_near_zero_plus(self):
        return self.sign > 0

    def params(self):
        return {"shape": self.shape, "scale": self.scale, "sign": self.sign}


@dataclass(frozen=True)
class UniformClaim(ClaimLaw):
    lo: float
    hi: float
    family: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidModelError("Siniestro uniforme con lo >= hi", lo=self.lo, hi=self.hi)

    @property
    def lower(self):
        return self.lo

    @property
    def upper(self):
        return self.hi

    @property
    def sign_class(self):
        if self.lo >= 0.0:
            return "annuity"
        if self.hi <= 0.0:
            return "non-life"
        return "mixed"

    @property
    def can_be_negative(self):
        return self.lo < 0.0

    def sample(self, rng, size=None):
        return _draw(self.lo + (self.hi - self.lo) * rng.random(1 if size is None else size), size)

    @property
    def charges_near_zero_plus(self):
        return self.lo <= 0.0 < self.hi

    def params(self):
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class TwoPointClaim(ClaimLaw):
    v1: float
    v2: float
    p: float
    family: ClassVar[str] = "two-point"

    def __post_init__(self):
        if not 0.0 < self.p < 1.0 or self.v1 == 0.0 or self.v2 == 0.0:
            raise InvalidModelError("Siniestro de dos puntos requiere p en (0, 1) y átomos no nulos")

    @property
    def lower(self):
        return min(self.v1, self.v2)

    @property
    def upper(self):
        return max(self.v1, self.v2)

    def sample(self, rng, size=None):
        return _draw(np.where(rng.random(1 if size is None else size) < self.p, self.v1, self.v2), size)

    charges_near_zero_plus = False

    def params(self):
        return {"v1": self.v1, "v2": self.v2, "p": self.p}


@dataclass(frozen=True)
class TwoSidedExponentialClaim(ClaimLaw):
    """ξ = +Exp(media mean_pos) con probabilidad p_pos, −Exp(media mean_neg) si no"""

    p_pos: float
    mean_pos: float
    mean_neg: float
    family: ClassVar[str] = "two-sided-exponential"

    def __post_init__(self):
        if not 0.0 < self.p_pos < 1.0 or self.mean_pos <= 0.0 or self.mean_neg <= 0.0:
            raise InvalidModelError("Siniestro exponencial bilateral con parámetros inválidos")

    lower = -INF
    upper = INF
    charges_near_zero_plus = True

    def sample(self, rng, size=None):
        n = 1 if size is None else size
        positive = rng.random(n) < self.p_pos
        e = rng.standard_exponential(n)
        return _draw(np.where(positive, self.mean_pos * e, -self.mean_neg * e), size)

    def params(self):
        return {"p_pos": self.p_pos, "mean_pos": self.mean_pos, "mean_neg": self.mean_neg}


@dataclass(frozen=True)
class ParetoClaim(ClaimLaw):
    """|ξ| Pareto: P[|ξ| > x] = (scale/x)^alpha para x >= scale"""

    alpha: float
    scale: float
    sign: float = 1.0
    family: ClassVar[str] = "pareto"

    def __post_init__(self):
        if self.alpha <= 0.0 or self.scale <= 0.0 or self.sign not in (1.0, -1.0):
            raise InvalidModelError("Siniestro Pareto requiere alpha, scale > 0 y sign ±1")

    @property
    def lower(self):
        return self.scale if self.sign > 0 else -INF

    @property
    def upper(self):
        return INF if self.sign > 0 else -self.scale

    def sample(self, rng, size=None):
        e = rng.standard_exponential(1 if size is None else size)
        return _draw((self.sign * self.scale) * np.exp(e / self.alpha), size)

    charges_near_zero_plus = False

    def abs_moment_finite(self, beta):
        return beta < self.alpha

    def params(self):
        return {"alpha": self.alpha, "scale": self.scale, "sign": self.sign}


_CLAIM_PARAMS: Dict[str, Tuple[str, ...]] = {
    "point": ("value",),
    "exponential": ("mean", "sign"),
    "gamma": ("shape", "scale", "sign"),
    "uniform": ("lo", "hi"),
    "two-point": ("v1", "v2", "p"),
    "two-sided-exponential": ("p_pos", "mean_pos", "mean_neg"),
    "pareto": ("alpha", "scale", "sign"),
}


def claim_law_from_spec(family: str, params: Mapping[str, float]) -> ClaimLaw:
    check_family_params("siniestros", family, params, _CLAIM_PARAMS)
    if family == "point":
        return PointClaim(params["value"])
    if family == "exponential":
        return ExponentialClaim(params["mean"], params["sign"])
    if family == "gamma":
        return GammaClaim(params["shape"], params["scale"], params["sign"])
    if family == "uniform":
        return UniformClaim(params["lo"], params["hi"])
    if family == "two-point":
        return TwoPointClaim(params["v1"], params["v2"], params["p"])
    if family == "two-sided-exponential":
        return TwoSidedExponentialClaim(params["p_pos"], params["mean_pos"], params["mean_neg"])
    return ParetoClaim(params["alpha"], params["scale"], params["sign"])


# ==============================================================================
# Modelo y política de simulación
# ==============================================================================


@dataclass(frozen=True)
class BusinessSpec:
    """Proceso de negocio P_t = ct + Σ ξ_i con reloj inicial r"""

    c: float
    interarrival: InterarrivalLaw
    claims: ClaimLaw
    r: float = 0.0
    sign_class: Optional[str] = None

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise InvalidModelError("c debe ser finito", c=self.c)
        declared = self.sign_class or self.claims.sign_class
        if declared not in SIGN_CLASSES:
            raise InvalidModelError(f"Clase de signo desconocida: '{declared}'")
        if declared != self.claims.sign_class:
            raise InvalidModelError(
                f"La clase de signo '{declared}' no coincide con el soporte de la ley ({self.claims.sign_class})",
                declared=declared,
                support=self.claims.sign_class,
            )
        object.__setattr__(self, "sign_class", declared)
        if self.c >= 0.0 and self.claims.lower >= 0.0:
            raise InvalidModelError(
                "c >= 0 con ξ > 0 c.s.: la ruina nunca ocurre", c=self.c
            )
        # existencia de F^r
        self.first_law

    @cached_property
    def first_law(self) -> InterarrivalLaw:
        """Ley del primer tiempo entre siniestros, F^r"""
        return residual_law(self.interarrival, self.r)

    def to_dict(self) -> Dict[str, object]:
        return {
            "c": self.c,
            "r": self.r,
            "interarrival": self.interarrival.describe(),
            "claims": self.claims.describe(),
        }

    def with_clock(self, r: float) -> "BusinessSpec":
        return replace(self, r=r)

    def scaled(self, k: float) -> "BusinessSpec":
        """(c, ξ) -> (kc, kξ) con la misma aleatoriedad"""
        return replace(self, c=k * self.c, claims=_scale_claims(self.claims, k))


def _scale_claims(claims: ClaimLaw, k: float) -> ClaimLaw:
    if k <= 0.0:
        raise InvalidModelError("El factor de escala debe ser positivo", k=k)
    if isinstance(claims, PointClaim):
        return PointClaim(k * claims.value)
    if isinstance(claims, ExponentialClaim):
        return ExponentialClaim(k * claims.mean, claims.sign)
    if isinstance(claims, GammaClaim):
        return GammaClaim(claims.shape, k * claims.scale, claims.sign)
    if isinstance(claims, UniformClaim):
        return UniformClaim(k * claims.lo, k * claims.hi)
    if isinstance(claims, TwoPointClaim):
        return TwoPointClaim(k * claims.v1, k * claims.v2, claims.p)
    if isinstance(claims, TwoSidedExponentialClaim):
        return TwoSidedExponentialClaim(claims.p_pos, k * claims.mean_pos, k * claims.mean_neg)
    return ParetoClaim(claims.alpha, k * claims.scale, claims.sign)


@dataclass(frozen=True)
class RiskModel:
    investment: LogPriceLaw
    business: BusinessSpec
    triplet: Optional[LevyTriplet] = None

    @property
    def continuous_crossing(self) -> bool:
        """Con c < 0, Y crece de forma continua entre siniestros"""
        return self.business.c < 0.0

    @property
    def jump_crossing(self) -> bool:
        """Si ξ puede ser negativo, Y salta hacia arriba en los siniestros"""
        return self.business.claims.can_be_negative

    def with_clock(self, r: float) -> "RiskModel":
        return replace(self, business=self.business.with_clock(r))

    def to_dict(self) -> Dict[str, object]:
        """Descripción del modelo para los reportes"""
        return {"investment": self.investment.to_dict(), "business": self.business.to_dict()}


@dataclass(frozen=True)
class SimPolicy:
    n_sub: int = DEFAULT_N_SUB
    eps_A: float = DEFAULT_EPS_A
    n_max_claims: int = DEFAULT_N_MAX_CLAIMS
    t_max: Optional[float] = None
    u_margin: float = DEFAULT_U_MARGIN

    def __post_init__(self):
        if self.n_sub < 1:
            raise InvalidModelError("n_sub debe ser >= 1", n_sub=self.n_sub)
        if not 0.0 < self.eps_A < 1.0:
            raise InvalidModelError("eps_A debe estar en (0, 1)", eps_A=self.eps_A)
        if self.n_max_claims < 1:
            raise InvalidModelError("n_max_claims debe ser >= 1", n_max_claims=self.n_max_claims)
        if self.t_max is not None and self.t_max <= 0.0:
            raise InvalidModelError("t_max debe ser positivo", t_max=self.t_max)
        if self.u_margin < 0.0:
            raise InvalidModelError("u_margin no puede ser negativo", u_margin=self.u_margin)


# ==============================================================================
# Bloques entre siniestros
# ==============================================================================


@dataclass(frozen=True)
class QMPair:
    Q: float
    M: float


def _exp(x: float) -> float:
    """e^x; +inf en lugar de OverflowError"""
    with np.errstate(over="ignore"):
        return float(np.exp(x))


def _phi(d: np.ndarray) -> np.ndarray:
    """(1 − e^{−d})/d, con valor 1 en d = 0"""
    d = np.asarray(d, dtype=float)
    small = np.abs(d) < 1e-8
    safe = np.where(small, 1.0, d)
    return np.where(small, 1.0 - 0.5 * d, -np.expm1(-safe) / safe)


@dataclass(frozen=True)
class BlockDraw:
    """Un bloque (T_{k−1}, T_k] simulado, con V relativo al inicio del bloque

    times incluye la rejilla de n_sub subpasos y los instantes exactos de salto;
    v_pre/v_post son V antes y después del salto en cada nodo; integral es
    ∫_0^{t_j} e^{−V_s} ds acumulada en los nodos.
    """

    T: float
    times: np.ndarray
    v_pre: np.ndarray
    v_post: np.ndarray
    integral: np.ndarray
    xi: float
    c: float

    @property
    def v_end(self) -> float:
        return float(self.v_pre[-1])

    @property
    def qm(self) -> QMPair:
        q = -self.c * float(self.integral[-1]) - _exp(-self.v_end) * self.xi
        return QMPair(Q=q, M=_exp(-float(self.v_post[-1])))

    @property
    def drift_accumulation(self) -> np.ndarray:
        """−c·∫_0^{t_j} e^{−V_s} ds en los nodos (picos dentro del bloque)"""
        return -self.c * self.integral


def _jump_nodes(law: LogPriceLaw, T: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    total = law.total_rate
    if total <= 0.0:
        return np.empty(0), np.empty(0)
    times: List[float] = []
    t = rng.exponential(1.0 / total)
    while t < T:
        times.append(t)
        t += rng.exponential(1.0 / total)
    n = len(times)
    if n == 0:
        return np.empty(0), np.empty(0)
    sizes = np.empty(n)
    comps = law.jumps
    if len(comps) == 1:
        sizes[:] = comps[0].law.sample(rng, n)
    else:
        weights = np.array([c.rate for c in comps]) / total
        which = rng.choice(len(comps), size=n, p=weights)
        for i, comp in enumerate(comps):
            mask = which == i
            count = int(mask.sum())
            if count:
                sizes[mask] = comp.law.sample(rng, count)
    return np.asarray(times), sizes


def simulate_block(
    law: LogPriceLaw,
    business: BusinessSpec,
    first: bool,
    rng: np.random.Generator,
    n_sub: int = DEFAULT_N_SUB,
) -> BlockDraw:
    """Simular un bloque entre siniestros

    Orden de consumo del generador: longitud T, instantes y tamaños de salto,
    normales de los subpasos (solo si σ > 0) y por último el siniestro ξ.
    """
    T = (business.first_law if first else business.interarrival).sample(rng)
    jump_times, jump_sizes = _jump_nodes(law, T, rng)

    grid = np.linspace(0.0, T, n_sub + 1)
    if jump_times.size:
        times = np.concatenate([grid, jump_times])
        marks = np.concatenate([np.zeros(grid.size), jump_sizes])
        order = np.argsort(times, kind="stable")
        times, marks = times[order], marks[order]
    else:
        times, marks = grid, np.zeros(grid.size)

    dt = np.diff(times)
    increments = law.drift * dt
    if law.sigma2 > 0.0:
        increments = increments + math.sqrt(law.sigma2) * np.sqrt(dt) * rng.standard_normal(dt.size)
    v_post = np.concatenate([[0.0], np.cumsum(increments + marks[1:])])
    v_pre = v_post - marks

    segment = dt * np.exp(-v_post[:-1]) * _phi(v_pre[1:] - v_post[:-1])
    integral = np.concatenate([[0.0], np.cumsum(segment)])

    xi = business.claims.sample(rng)
    return BlockDraw(T=T, times=times, v_pre=v_pre, v_post=v_post, integral=integral, xi=xi, c=business.c)


# ==============================================================================
# Reloj D^r
# ==============================================================================


@dataclass(frozen=True)
class ClockState:
    value: float


def advance_clock(state: ClockState, dt: float, claim: bool) -> ClockState:
    """El reloj avanza dt y vuelve a cero en cada siniestro"""
    if dt < 0.0:
        raise InvalidModelError("dt debe ser no negativo", dt=dt)
    if claim:
        return ClockState(0.0)
    return ClockState(state.value + dt)


# ==============================================================================
# Ensayos de ruina
# ==============================================================================


@dataclass(frozen=True)
class Ruined:
    tau: float
    x_at_tau: float
    clock_at_tau: float
    crossing: str
    x_before: float
    x_tolerance: float = 0.0
    kind: ClassVar[str] = "ruined"


@dataclass(frozen=True)
class Survived:
    y_final: float
    a_final: float
    kind: ClassVar[str] = "survived"


@dataclass(frozen=True)
class Censored:
    reason: str
    kind: ClassVar[str] = "censored"


Outcome = Union[Ruined, Survived, Censored]


@dataclass(frozen=True)
class TrialResult:
    outcome: Outcome
    n_claims: int
    sup_y: float

    @property
    def ruined(self) -> bool:
        return isinstance(self.outcome, Ruined)

    @property
    def censored(self) -> bool:
        return isinstance(self.outcome, Censored)


def _continuous_crossing(block: BlockDraw, y0: float, A: float, u: float) -> Optional[Tuple[int, float]]:
    """Primer cruce de u por y0 + A·(−c)·∫e^{−V} dentro del bloque: (nodo izquierdo, desfase)"""
    ys = y0 + A * block.drift_accumulation
    if ys[-1] < u:
        return None
    j = int(np.argmax(ys >= u))
    left = j - 1
    width = float(block.times[j] - block.times[left])
    d = float(block.v_pre[j] - block.v_post[left])
    base = _exp(-float(block.v_post[left]))
    start = y0 + A * (-block.c) * float(block.integral[left])

    def level(s: float) -> float:
        if s == 0.0:
            return start
        return start + A * (-block.c) * s * base * float(_phi(d * s / width))

    lo, hi = 0.0, width
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if level(mid) >= u:
            hi = mid
        else:
            lo = mid
    return left, 0.5 * (lo + hi)


def run_trial(model: RiskModel, u: float, policy: SimPolicy, rng: np.random.Generator) -> TrialResult:
    """Simular una trayectoria hasta la ruina, la supervivencia certificada o la censura"""
    if not u > 0.0:
        raise InvalidModelError("u debe ser positivo", u=u)
    law, business = model.investment, model.business
    c = business.c
    # log_a = ln A
    y, A, log_a, t_global = 0.0, 1.0, 0.0, 0.0
    clock = ClockState(business.r)
    sup_y = 0.0
    n_claims = 0

    def finish(outcome: Outcome) -> TrialResult:
        if isinstance(outcome, Ruined) and policy.t_max is not None and outcome.tau > policy.t_max:
            outcome = Censored("t_max")
        return TrialResult(outcome=outcome, n_claims=n_claims, sup_y=sup_y)

    while True:
        block = simulate_block(law, business, first=n_claims == 0, rng=rng, n_sub=policy.n_sub)

        if model.continuous_crossing:
            hit = _continuous_crossing(block, y, A, u)
            if hit is not None:
                left, s = hit
                offset = float(block.times[left]) + s
                width = float(block.times[left + 1] - block.times[left])
                d = float(block.v_pre[left + 1] - block.v_post[left])
                v_tau = float(block.v_post[left]) + d * s / width
                y_tau = y + A * (-c) * (float(block.integral[left]) + s * _exp(-float(block.v_post[left])) * float(_phi(d * s / width)))
                sup_y = max(sup_y, y_tau)
                x_tau = _exp(v_tau - log_a) * (u - y_tau)
                return finish(
                    Ruined(
                        tau=t_global + offset,
                        x_at_tau=x_tau,
                        clock_at_tau=advance_clock(clock, offset, claim=False).value,
                        crossing="continuous",
                        x_before=x_tau,
                        x_tolerance=abs(c) * width * _exp(abs(d)),
                    )
                )

        y_pre = y + A * (-c) * float(block.integral[-1])
        qm = block.qm
        y_post = y + A * qm.Q
        sup_y = max(sup_y, y_pre, y_post)
        t_claim = t_global + block.T
        n_claims += 1

        if model.jump_crossing and y_post >= u:
            # X salta exactamente ξ en el siniestro
            x_before = _exp(block.v_end - log_a) * (u - y_pre)
            return finish(
                Ruined(
                    tau=t_claim,
                    x_at_tau=x_before + block.xi,
                    clock_at_tau=advance_clock(clock, block.T, claim=True).value,
                    crossing="jump",
                    x_before=x_before,
                )
            )

        y, A, t_global = y_post, A * qm.M, t_claim
        log_a -= float(block.v_post[-1])
        clock = advance_clock(clock, block.T, claim=True)

        if A < policy.eps_A and y < u - policy.u_margin:
            return finish(Survived(y_final=y, a_final=A))
        if n_claims >= policy.n_max_claims:
            return finish(Censored("n_max_claims"))
        if policy.t_max is not None and t_global >= policy.t_max:
            return finish(Censored("t_max"))


# ==============================================================================
# Serie de Y∞
# ==============================================================================


@dataclass(frozen=True)
class YinfDraw:
    value: float
    n_blocks: int


def sample_Yinf(
    model: RiskModel,
    policy: SimPolicy,
    rng: np.random.Generator,
    *,
    residual_first: bool = True,
    start: Optional[QMPair] = None,
) -> YinfDraw:
    """Una realización truncada de Y∞ = Q_1 + Σ_{k>=2} A_{k−1}Q_k

    Con `start`, la serie continúa desde (Q_1, M_1) ya simulado y devuelve
    Q_1 + M_1·Ỹ∞; `residual_first` decide si el primer bloque de la parte
    aleatoria sale de F^r o de F.
    """
    law, business = model.investment, model.business
    if start is None:
        y, A, n = 0.0, 1.0, 0
    else:
        y, A, n = start.Q, start.M, 1
    first = residual_first
    while A >= policy.eps_A:
        if n >= policy.n_max_claims:
            raise CensoredSampleError(
                f"Presupuesto de {policy.n_max_claims} siniestros agotado con A = {A:.3e}", n_blocks=n
            )
        qm = simulate_block(law, business, first=first, rng=rng, n_sub=policy.n_sub).qm
        first = False
        y += A * qm.Q
        A *= qm.M
        n += 1
    return YinfDraw(value=y, n_blocks=n)


# ==============================================================================
# Trayectoria completa en los nodos
# ==============================================================================


@dataclass(frozen=True)
class PathTrace:
    """Valores en los nodos: V, Y, X por la forma de Cauchy y X por recursión local"""

    times: np.ndarray
    V: np.ndarray
    Y: np.ndarray
    X_cauchy: np.ndarray
    X_recursive: np.ndarray
    claim_times: np.ndarray


def trace_path(model: RiskModel, u: float, policy: SimPolicy, rng: np.random.Generator, n_blocks: int) -> PathTrace:
    """Reconstruir n_blocks bloques consumiendo el generador igual que run_trial

    X_recursive se acumula con la forma integral de la ecuación de riesgo
    X = u + P + ∫X_− dR sobre la misma interpolación de V.
    """
    law, business = model.investment, model.business
    c = business.c
    times, V, Y, X_rec, claims = [np.array([0.0])], [np.array([0.0])], [np.array([0.0])], [np.array([u])], []
    t0, v0, y, A, x = 0.0, 0.0, 0.0, 1.0, u
    for k in range(n_blocks):
        block = simulate_block(law, business, first=k == 0, rng=rng, n_sub=policy.n_sub)
        dt = np.diff(block.times)
        d = block.v_pre[1:] - block.v_post[:-1]
        growth = np.exp(d)
        jumps = np.exp(block.v_post[1:] - block.v_pre[1:])
        # ∫ e^{V_b − V_s} ds sobre el segmento
        carry = dt * growth * _phi(d)
        xs = np.empty(dt.size)
        for j in range(dt.size):
            x = (x * growth[j] + c * carry[j]) * jumps[j]
            xs[j] = x
        x += block.xi
        xs[-1] = x

        ys = y + A * block.drift_accumulation[1:]
        qm = block.qm
        ys[-1] = y + A * qm.Q
        times.append(t0 + block.times[1:])
        V.append(v0 + block.v_post[1:])
        Y.append(ys)
        X_rec.append(xs)
        t0 += block.T
        claims.append(t0)
        v0 += float(block.v_post[-1])
        y, A = ys[-1], A * qm.M

    times_a, V_a, Y_a = np.concatenate(times), np.concatenate(V), np.concatenate(Y)
    return PathTrace(
        times=times_a,
        V=V_a,
        Y=Y_a,
        X_cauchy=np.exp(V_a) * (u - Y_a),
        X_recursive=np.concatenate(X_rec),
        claim_times=np.asarray(claims),
    )
