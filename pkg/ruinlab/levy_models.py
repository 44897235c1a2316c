"""
Modelos de Lévy del activo de inversión y leyes entre siniestros

El precio es S = E(R), con R de tripleta (a, σ², Π) y Π((−∞, −1]) = 0. El
log-precio V = ln S es otra vez un proceso de Lévy con tripleta (a_V, σ², Π_V),
a_V = a − σ²/2 + Π(h(ln(1+x)) − h) y Π_V la imagen de Π por y = ln(1+x).

Las leyes de saltos se guardan directamente en el espacio y = ln(1+x): la imagen
Π_V es entonces la identidad. Las entradas en espacio x se convierten una sola
vez al construir la ley.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, ClassVar, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special, stats

from .config import QUAD_EPSABS
from .errors import (
    DegenerateResidualError,
    DomainError,
    HeavyTailError,
    InvalidModelError,
    InvalidTripletError,
)

logger = logging.getLogger(__name__)

INF = math.inf
LN2 = math.log(2.0)


def _safe_exp(x: float) -> float:
    return INF if x > 709.0 else math.exp(x)


def check_family_params(kind: str, family: str, params: Mapping[str, float], table: Mapping[str, Tuple[str, ...]]) -> None:
    if family not in table:
        raise InvalidModelError(f"Familia de {kind} desconocida: '{family}'", family=family, known=sorted(table))
    expected = set(table[family])
    given = set(params)
    if given != expected:
        raise InvalidModelError(
            f"Parámetros de {kind} '{family}' inválidos: se esperan {sorted(expected)}, llegaron {sorted(given)}",
            family=family,
        )
    for key, value in params.items():
        if not math.isfinite(value):
            raise InvalidModelError(f"Parámetro '{key}' de {kind} '{family}' no es finito", family=family)


# ==============================================================================
# Leyes de saltos (espacio y)
# ==============================================================================


class JumpLaw(ABC):
    """Ley de probabilidad del tamaño de salto de V (espacio y = ln(1+x))"""

    family: ClassVar[str]
    space: ClassVar[str] = "y"

    @property
    @abstractmethod
    def lower(self) -> float:
        """Extremo inferior del soporte en y"""

    @property
    @abstractmethod
    def upper(self) -> float:
        """Extremo superior del soporte en y"""

    @abstractmethod
    def exp_moment(self, q: float) -> float:
        """E[e^{−qY}]; +inf fuera del dominio"""

    @abstractmethod
    def moment_domain(self) -> Tuple[float, float]:
        """Intervalo abierto donde E[e^{−qY}] es finito"""

    @property
    @abstractmethod
    def mean(self) -> float:
        ...

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        ...

    @abstractmethod
    def expect(self, fn: Callable[[float], float], lo: float = -INF, hi: float = INF) -> float:
        """E[fn(Y)·1{lo < Y < hi}]"""

    @abstractmethod
    def params(self) -> Dict[str, float]:
        ...

    def describe(self) -> Dict[str, object]:
        return {"family": self.family, "space": self.space, "params": self.params()}

    def to_x_params(self) -> Dict[str, float]:
        raise InvalidTripletError(f"La familia '{self.family}' no tiene forma en el espacio x")

    @cached_property
    def h_mean(self) -> float:
        """E[h(Y)]"""
        return self.expect(lambda y: y, -1.0, 1.0) + self._atom_mass_at_edges()

    @cached_property
    def hx_mean(self) -> float:
        """E[h(e^Y − 1)]; |e^y − 1| <= 1 equivale a y <= ln 2"""
        return self.expect(math.expm1, -INF, LN2) + self._atom_mass_at_ln2()

    def _atom_mass_at_edges(self) -> float:
        return 0.0

    def _atom_mass_at_ln2(self) -> float:
        return 0.0


class _DiscreteJump(JumpLaw):
    """Ley con un número finito de átomos"""

    @abstractmethod
    def atoms(self) -> Tuple[Tuple[float, float], ...]:
        ...

    @property
    def lower(self) -> float:
        return min(y for y, _ in self.atoms())

    @property
    def upper(self) -> float:
        return max(y for y, _ in self.atoms())

    @property
    def mean(self) -> float:
        return sum(y * p for y, p in self.atoms())

    def exp_moment(self, q: float) -> float:
        return sum(p * _safe_exp(-q * y) for y, p in self.atoms())

    def moment_domain(self) -> Tuple[float, float]:
        return (-INF, INF)

    def expect(self, fn, lo=-INF, hi=INF):
        return sum(p * fn(y) for y, p in self.atoms() if lo < y < hi)

    # los átomos en los bordes cerrados de la truncación cuentan
    def _atom_mass_at_edges(self) -> float:
        return sum(p * y for y, p in self.atoms() if abs(y) == 1.0)

    def _atom_mass_at_ln2(self) -> float:
        return sum(p * math.expm1(y) for y, p in self.atoms() if y == LN2)


@dataclass(frozen=True)
class PointJump(_DiscreteJump):
    value: float
    family: ClassVar[str] = "point"

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value == 0.0:
            raise InvalidTripletError("Salto puntual nulo o no finito", value=self.value)

    def atoms(self):
        return ((self.value, 1.0),)

    def sample(self, rng, size):
        return np.full(size, self.value)

    def params(self):
        return {"value": self.value}

    def to_x_params(self):
        return {"value": math.expm1(self.value)}


@dataclass(frozen=True)
class TwoPointJump(_DiscreteJump):
    v1: float
    v2: float
    p: float
    family: ClassVar[str] = "two-point"

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise InvalidTripletError("p de la ley de dos puntos debe estar en (0, 1)", p=self.p)
        if self.v1 == 0.0 or self.v2 == 0.0 or self.v1 == self.v2:
            raise InvalidTripletError("Ley de dos puntos con átomo en 0 o átomos repetidos")

    def atoms(self):
        return ((self.v1, self.p), (self.v2, 1.0 - self.p))

    def sample(self, rng, size):
        return np.where(rng.random(size) < self.p, self.v1, self.v2)

    def params(self):
        return {"v1": self.v1, "v2": self.v2, "p": self.p}

    def to_x_params(self):
        return {"v1": math.expm1(self.v1), "v2": math.expm1(self.v2), "p": self.p}


class _ContinuousJump(JumpLaw):
    """Ley con densidad; las esperanzas sin forma cerrada van por cuadratura adaptativa"""

    @abstractmethod
    def pdf(self, y: float) -> float:
        ...

    def expect(self, fn, lo=-INF, hi=INF):
        lo = max(lo, self.lower)
        hi = min(hi, self.upper)
        if lo >= hi:
            return 0.0
        value, _ = integrate.quad(lambda y: fn(y) * self.pdf(y), lo, hi, epsabs=QUAD_EPSABS, limit=200)
        return value


@dataclass(frozen=True)
class ExponentialJump(_ContinuousJump):
    """Y = sign·E con E ~ Exp(rate)"""

    rate: float
    sign: float = 1.0
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        if self.rate <= 0.0:
            raise InvalidTripletError("La tasa de la ley exponencial debe ser positiva", rate=self.rate)
        if self.sign not in (1.0, -1.0):
            raise InvalidTripletError("sign debe ser +1 o −1", sign=self.sign)

    @property
    def lower(self):
        return 0.0 if self.sign > 0 else -INF

    @property
    def upper(self):
        return INF if self.sign > 0 else 0.0

    @property
    def mean(self):
        return self.sign / self.rate

    def pdf(self, y):
        if (y < 0.0) == (self.sign > 0):
            return 0.0
        return self.rate * math.exp(-self.rate * abs(y))

    def moment_domain(self):
        return (-self.rate, INF) if self.sign > 0 else (-INF, self.rate)

    def exp_moment(self, q):
        lo, hi = self.moment_domain()
        if not lo < q < hi:
            return INF
        return self.rate / (self.rate + self.sign * q)

    def sample(self, rng, size):
        return (self.sign / self.rate) * rng.standard_exponential(size)

    def params(self):
        return {"rate": self.rate, "sign": self.sign}


@dataclass(frozen=True)
class UniformJump(_ContinuousJump):
    """Uniforme en el espacio y"""

    lo: float
    hi: float
    family: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidTripletError("Uniforme con lo >= hi", lo=self.lo, hi=self.hi)

    @property
    def lower(self):
        return self.lo

    @property
    def upper(self):
        return self.hi

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def pdf(self, y):
        return 1.0 / (self.hi - self.lo) if self.lo < y < self.hi else 0.0

    def moment_domain(self):
        return (-INF, INF)

    def exp_moment(self, q):
        if q == 0.0:
            return 1.0
        w = self.hi - self.lo
        try:
            return _safe_exp(-q * self.lo) * (-math.expm1(-q * w)) / (q * w)
        except OverflowError:
            return INF

    def sample(self, rng, size):
        return self.lo + (self.hi - self.lo) * rng.random(size)

    def params(self):
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class NormalJump(_ContinuousJump):
    mu: float
    sd: float
    family: ClassVar[str] = "normal"

    def __post_init__(self):
        if self.sd <= 0.0:
            raise InvalidTripletError("sd de la ley normal debe ser positiva", sd=self.sd)

    @property
    def lower(self):
        return -INF

    @property
    def upper(self):
        return INF

    @property
    def mean(self):
        return self.mu

    def pdf(self, y):
        z = (y - self.mu) / self.sd
        return math.exp(-0.5 * z * z) / (self.sd * math.sqrt(2.0 * math.pi))

    def moment_domain(self):
        return (-INF, INF)

    def exp_moment(self, q):
        return _safe_exp(-q * self.mu + 0.5 * q * q * self.sd * self.sd)

    def sample(self, rng, size):
        return self.mu + self.sd * rng.standard_normal(size)

    def params(self):
        return {"mean": self.mu, "sd": self.sd}


@dataclass(frozen=True)
class UniformPriceJump(_ContinuousJump):
    """X ~ U(x_lo, x_hi) en el espacio del precio; Y = ln(1+X), momentos por cuadratura"""

    x_lo: float
    x_hi: float
    family: ClassVar[str] = "uniform-price"
    space: ClassVar[str] = "x"

    def __post_init__(self):
        if self.x_lo <= -1.0:
            raise InvalidTripletError("Π((−∞,−1]) = 0: el soporte en x debe estar en (−1, ∞)", x_lo=self.x_lo)
        if not self.x_lo < self.x_hi:
            raise InvalidTripletError("Uniforme con lo >= hi", lo=self.x_lo, hi=self.x_hi)

    @property
    def lower(self):
        return math.log1p(self.x_lo)

    @property
    def upper(self):
        return math.log1p(self.x_hi)

    @cached_property
    def mean(self):
        return self.expect(lambda y: y)

    def pdf(self, y):
        return math.exp(y) / (self.x_hi - self.x_lo) if self.lower < y < self.upper else 0.0

    def moment_domain(self):
        return (-INF, INF)

    def exp_moment(self, q):
        if q == 0.0:
            return 1.0
        return self.expect(lambda y: math.exp(-q * y))

    def sample(self, rng, size):
        return np.log1p(self.x_lo + (self.x_hi - self.x_lo) * rng.random(size))

    def params(self):
        return {"lo": self.x_lo, "hi": self.x_hi}

    def to_x_params(self):
        return self.params()


_JUMP_PARAMS: Dict[str, Tuple[str, ...]] = {
    "point": ("value",),
    "two-point": ("v1", "v2", "p"),
    "exponential": ("rate", "sign"),
    "uniform": ("lo", "hi"),
    "normal": ("mean", "sd"),
}

_X_SPACE_FAMILIES = ("point", "two-point", "uniform")


def jump_law_from_spec(family: str, params: Mapping[str, float], space: str = "y") -> JumpLaw:
    """Construir una ley de saltos a partir de su nombre canónico y parámetros"""
    check_family_params("saltos", family, params, _JUMP_PARAMS)
    if space == "x":
        if family not in _X_SPACE_FAMILIES:
            raise InvalidTripletError(f"La familia '{family}' no admite parámetros en el espacio x", family=family)
        xs = [params[k] for k in ("value", "v1", "v2", "lo") if k in params]
        if min(xs) <= -1.0:
            raise InvalidTripletError(
                "Π((−∞,−1]) = 0: hay masa de saltos en x <= −1", family=family, x=min(xs)
            )
        if family == "point":
            return PointJump(math.log1p(params["value"]))
        if family == "two-point":
            return TwoPointJump(math.log1p(params["v1"]), math.log1p(params["v2"]), params["p"])
        return UniformPriceJump(params["lo"], params["hi"])
    if space != "y":
        raise InvalidTripletError(f"Espacio de saltos desconocido: '{space}'")
    if family == "point":
        return PointJump(params["value"])
    if family == "two-point":
        return TwoPointJump(params["v1"], params["v2"], params["p"])
    if family == "exponential":
        return ExponentialJump(params["rate"], params["sign"])
    if family == "uniform":
        return UniformJump(params["lo"], params["hi"])
    return NormalJump(params["mean"], params["sd"])


# ==============================================================================
# Tripleta del retorno R y ley del log-precio V
# ==============================================================================


@dataclass(frozen=True)
class JumpComponent:
    rate: float
    law: JumpLaw

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise InvalidTripletError("La intensidad de cada componente de saltos debe ser positiva", rate=self.rate)


@dataclass(frozen=True)
class SmallJumpBand:
    """Saltos pequeños |y| < eps sustituidos por una difusión con su varianza"""

    eps: float
    variance: float
    side: str = "both"
    infinite_variation: bool = True

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise InvalidTripletError("eps de la banda de saltos pequeños debe estar en (0, 1]", eps=self.eps)
        if self.variance < 0.0:
            raise InvalidTripletError("La varianza plegada no puede ser negativa", variance=self.variance)
        if self.side not in ("positive", "negative", "both"):
            raise InvalidTripletError(f"Lado de banda desconocido: '{self.side}'")

    @classmethod
    def from_power_density(cls, intensity: float, alpha: float, eps: float, side: str) -> "SmallJumpBand":
        """Banda para la densidad c·|y|^{−1−α} en 0 < |y| < eps"""
        if not 0.0 < alpha < 2.0:
            raise InvalidTripletError("alpha debe estar en (0, 2)", alpha=alpha)
        if intensity <= 0.0:
            raise InvalidTripletError("La intensidad de la banda debe ser positiva", intensity=intensity)
        per_side = intensity * eps ** (2.0 - alpha) / (2.0 - alpha)
        sides = 2.0 if side == "both" else 1.0
        return cls(eps=eps, variance=sides * per_side, side=side, infinite_variation=alpha >= 1.0)


@dataclass(frozen=True)
class LevyTriplet:
    a: float
    sigma2: float = 0.0
    jumps: Tuple[JumpComponent, ...] = ()
    small_jumps: Optional[SmallJumpBand] = None

    def __post_init__(self):
        if not math.isfinite(self.a):
            raise InvalidTripletError("La deriva a debe ser finita", a=self.a)
        if not (self.sigma2 >= 0.0 and math.isfinite(self.sigma2)):
            raise InvalidTripletError("σ² debe ser finita y >= 0", sigma2=self.sigma2)

    @property
    def nondegenerate(self) -> bool:
        """R no determinista: σ² > 0 o algún λ_i > 0"""
        return self.sigma2 > 0.0 or bool(self.jumps) or self.small_jumps is not None

    # Condiciones sobre Π usadas por el catálogo de escenarios

    @property
    def charges_negative(self) -> bool:
        """Π((−1, 0)) > 0"""
        band = self.small_jumps is not None and self.small_jumps.side in ("negative", "both")
        return band or any(c.law.lower < 0.0 for c in self.jumps)

    @property
    def charges_positive(self) -> bool:
        """Π((0, ∞)) > 0"""
        band = self.small_jumps is not None and self.small_jumps.side in ("positive", "both")
        return band or any(c.law.upper > 0.0 for c in self.jumps)

    @property
    def infinite_variation_positive(self) -> bool:
        """Π(h) = ∞ por el lado positivo"""
        band = self.small_jumps
        return band is not None and band.infinite_variation and band.side in ("positive", "both")

    @property
    def infinite_variation_negative(self) -> bool:
        band = self.small_jumps
        return band is not None and band.infinite_variation and band.side in ("negative", "both")


@dataclass(frozen=True)
class LogPriceLaw:
    """Tripleta (a_V, σ², Π_V) de V = ln S, con saltos en espacio y"""

    a_v: float
    sigma2: float
    jumps: Tuple[JumpComponent, ...] = ()
    approximate: bool = False
    nondegenerate: bool = True

    @cached_property
    def drift(self) -> float:
        """Deriva de V entre saltos: V_t = drift·t + σW_t + Σ saltos"""
        return self.a_v - sum(c.rate * c.law.h_mean for c in self.jumps)

    @property
    def total_rate(self) -> float:
        return sum(c.rate for c in self.jumps)

    @cached_property
    def domain(self) -> Tuple[float, float]:
        lo, hi = -INF, INF
        for c in self.jumps:
            c_lo, c_hi = c.law.moment_domain()
            lo, hi = max(lo, c_lo), min(hi, c_hi)
        return (lo, hi)

    @cached_property
    def psi_slope_at_zero(self) -> float:
        """ψ'(0) = −a_V − Σ λ_i E[Y_i − h(Y_i)] = −E[V_1]"""
        return -self.a_v - sum(c.rate * (c.law.mean - c.law.h_mean) for c in self.jumps)

    def to_dict(self) -> Dict[str, object]:
        return {
            "a_v": self.a_v,
            "sigma2": self.sigma2,
            "drift": self.drift,
            "approximate": self.approximate,
            "jumps": [{"rate": c.rate, **c.law.describe()} for c in self.jumps],
        }


def log_price_law(triplet: LevyTriplet) -> LogPriceLaw:
    """Transformar la tripleta de R en la ley del log-precio V"""
    band = triplet.small_jumps
    sigma2 = triplet.sigma2 + (band.variance if band is not None else 0.0)
    a_v = triplet.a - 0.5 * sigma2 + sum(c.rate * (c.law.h_mean - c.law.hx_mean) for c in triplet.jumps)
    if band is not None:
        logger.info("Saltos pequeños |y| < %g plegados en σ² (+%g): resultados aproximados", band.eps, band.variance)
    return LogPriceLaw(
        a_v=a_v,
        sigma2=sigma2,
        jumps=tuple(triplet.jumps),
        approximate=band is not None,
        nondegenerate=triplet.nondegenerate,
    )


def effective_domain(law: LogPriceLaw) -> Tuple[float, float]:
    """Mayor intervalo abierto donde todos los E[e^{−qY_i}] son finitos"""
    return law.domain


def levy_exponent(law: LogPriceLaw, q: float) -> float:
    """ψ(q) = ln E e^{−qV_1}"""
    if q == 0.0:
        return 0.0
    q_lo, q_hi = law.domain
    if not q_lo < q < q_hi:
        raise DomainError(f"q = {q} fuera del dominio efectivo ({q_lo}, {q_hi})", q_lo, q_hi, stage="levy")
    value = -q * law.a_v + 0.5 * q * q * law.sigma2
    for c in law.jumps:
        value += c.rate * (c.law.exp_moment(q) - 1.0 + q * c.law.h_mean)
    return value


def sample_log_price(law: LogPriceLaw, t: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Muestras exactas de V_t para un vector de tiempos t (independientes entre sí)"""
    t = np.asarray(t, dtype=float)
    v = law.drift * t
    if law.sigma2 > 0.0:
        v = v + np.sqrt(law.sigma2 * t) * rng.standard_normal(t.shape)
    for c in law.jumps:
        counts = rng.poisson(c.rate * t)
        total = int(counts.sum())
        if total:
            sizes = c.law.sample(rng, total)
            owner = np.repeat(np.arange(t.size), counts.ravel())
            v = v + np.bincount(owner, weights=sizes, minlength=t.size).reshape(t.shape)
    return v


# ==============================================================================
# Leyes entre siniestros
# ==============================================================================


class InterarrivalLaw(ABC):
    """Ley F de los tiempos entre siniestros, con soporte en (0, ∞)"""

    family: ClassVar[str]

    @abstractmethod
    def _draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        ...

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        if size is None:
            return float(self._draw(rng, 1)[0])
        return self._draw(rng, size)

    @property
    @abstractmethod
    def mgf_upper(self) -> float:
        """Supremo del dominio de M_T(s) = E e^{sT}"""

    @abstractmethod
    def mgf(self, s: float) -> float:
        ...

    @abstractmethod
    def cdf(self, t: float) -> float:
        ...

    @property
    @abstractmethod
    def mean(self) -> float:
        ...

    @abstractmethod
    def residual(self, r: float) -> "InterarrivalLaw":
        """Ley de T − r condicionada a T > r"""

    @property
    @abstractmethod
    def unbounded_support(self) -> bool:
        """F((t, ∞)) > 0 para todo t"""

    @property
    @abstractmethod
    def charges_near_zero(self) -> bool:
        """F((0, t)) > 0 para todo t > 0"""

    @abstractmethod
    def params(self) -> Dict[str, float]:
        ...

    def describe(self) -> Dict[str, object]:
        return {"family": self.family, "params": self.params()}


@dataclass(frozen=True)
class ExponentialInterarrival(InterarrivalLaw):
    rate: float
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        if self.rate <= 0.0:
            raise InvalidModelError("La tasa exponencial debe ser positiva", rate=self.rate)

    def _draw(self, rng, size):
        return rng.standard_exponential(size) / self.rate

    @property
    def mgf_upper(self):
        return self.rate

    def mgf(self, s):
        return self.rate / (self.rate - s)

    def cdf(self, t):
        return -math.expm1(-self.rate * t) if t > 0.0 else 0.0

    @property
    def mean(self):
        return 1.0 / self.rate

    def residual(self, r):
        # ausencia de memoria
        return self

    unbounded_support = True
    charges_near_zero = True

    def params(self):
        return {"rate": self.rate}


@dataclass(frozen=True)
class GammaInterarrival(InterarrivalLaw):
    """Gamma(shape, scale) condicionada a haber transcurrido `age`"""

    shape: float
    scale: float
    age: float = 0.0
    family: ClassVar[str] = "gamma"

    def __post_init__(self):
        if self.shape <= 0.0 or self.scale <= 0.0:
            raise InvalidModelError("Gamma requiere shape > 0 y scale > 0", shape=self.shape, scale=self.scale)
        if self.age < 0.0:
            raise InvalidModelError("age no puede ser negativa", age=self.age)
        if self.age > 0.0 and self._tail(self.age) <= 0.0:
            raise DegenerateResidualError("P[T > r] = 0 numéricamente para la ley gamma", r=self.age)

    def _tail(self, t: float) -> float:
        return float(special.gammaincc(self.shape, t / self.scale))

    def _draw(self, rng, size):
        if self.age == 0.0:
            return self.scale * rng.standard_gamma(self.shape, size)
        u = rng.random(size)
        return stats.gamma.isf(u * self._tail(self.age), self.shape, scale=self.scale) - self.age

    @property
    def mgf_upper(self):
        return 1.0 / self.scale

    def mgf(self, s):
        k, theta, a = self.shape, self.scale, self.age
        base = (1.0 - s * theta) ** (-k)
        if a == 0.0:
            return base
        ratio = special.gammaincc(k, a * (1.0 - s * theta) / theta) / self._tail(a)
        return math.exp(-s * a) * base * float(ratio)

    def cdf(self, t):
        if t <= 0.0:
            return 0.0
        if self.age == 0.0:
            return float(special.gammainc(self.shape, t / self.scale))
        return 1.0 - self._tail(t + self.age) / self._tail(self.age)

    @property
    def mean(self):
        k, theta, a = self.shape, self.scale, self.age
        if a == 0.0:
            return k * theta
        integral = k * theta * special.gammaincc(k + 1.0, a / theta) - a * special.gammaincc(k, a / theta)
        return float(integral) / self._tail(a)

    def residual(self, r):
        if r == 0.0:
            return self
        return GammaInterarrival(self.shape, self.scale, self.age + r)

    unbounded_support = True
    charges_near_zero = True

    def params(self):
        if self.age > 0.0:
            return {"shape": self.shape, "scale": self.scale, "age": self.age}
        return {"shape": self.shape, "scale": self.scale}


@dataclass(frozen=True)
class DeterministicInterarrival(InterarrivalLaw):
    value: float
    family: ClassVar[str] = "deterministic"

    def __post_init__(self):
        if self.value <= 0.0:
            raise InvalidModelError("El tiempo determinista debe ser positivo", value=self.value)

    def _draw(self, rng, size):
        return np.full(size, self.value)

    mgf_upper = INF

    def mgf(self, s):
        return _safe_exp(s * self.value)

    def cdf(self, t):
        return 1.0 if t >= self.value else 0.0

    @property
    def mean(self):
        return self.value

    def residual(self, r):
        if r == 0.0:
            return self
        if r >= self.value:
            raise DegenerateResidualError(f"T = {self.value} <= r = {r}: residual degenerado", r=r, value=self.value)
        return DeterministicInterarrival(self.value - r)

    unbounded_support = False
    charges_near_zero = False

    def params(self):
        return {"value": self.value}


@dataclass(frozen=True)
class UniformInterarrival(InterarrivalLaw):
    lo: float
    hi: float
    family: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi:
            raise InvalidModelError("Uniforme entre siniestros requiere 0 <= lo < hi", lo=self.lo, hi=self.hi)

    def _draw(self, rng, size):
        return self.lo + (self.hi - self.lo) * rng.random(size)

    mgf_upper = INF

    def mgf(self, s):
        if s == 0.0:
            return 1.0
        w = self.hi - self.lo
        return _safe_exp(s * self.lo) * math.expm1(s * w) / (s * w)

    def cdf(self, t):
        return min(1.0, max(0.0, (t - self.lo) / (self.hi - self.lo)))

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def residual(self, r):
        if r == 0.0:
            return self
        if r >= self.hi:
            raise DegenerateResidualError(f"r = {r} fuera del soporte (hi = {self.hi})", r=r, hi=self.hi)
        if r < self.lo:
            return UniformInterarrival(self.lo - r, self.hi - r)
        return UniformInterarrival(0.0, self.hi - r)

    unbounded_support = False

    @property
    def charges_near_zero(self):
        return self.lo == 0.0

    def params(self):
        return {"lo": self.lo, "hi": self.hi}


_INTERARRIVAL_PARAMS: Dict[str, Tuple[str, ...]] = {
    "exponential": ("rate",),
    "gamma": ("shape", "scale"),
    "deterministic": ("value",),
    "uniform": ("lo", "hi"),
}

HEAVY_TAILED_FAMILIES = ("pareto", "lognormal", "loglogistic")


def interarrival_from_spec(family: str, params: Mapping[str, float]) -> InterarrivalLaw:
    if family in HEAVY_TAILED_FAMILIES:
        raise HeavyTailError(
            f"La ley '{family}' no cumple E[e^(εT)] < ∞ para ningún ε > 0", family=family
        )
    check_family_params("tiempos entre siniestros", family, params, _INTERARRIVAL_PARAMS)
    if family == "exponential":
        return ExponentialInterarrival(params["rate"])
    if family == "gamma":
        return GammaInterarrival(params["shape"], params["scale"])
    if family == "deterministic":
        return DeterministicInterarrival(params["value"])
    return UniformInterarrival(params["lo"], params["hi"])


def mgf_interarrival(law: InterarrivalLaw, s: float) -> float:
    """M_T(s) = E e^{sT}"""
    if s >= law.mgf_upper:
        raise DomainError(
            f"s = {s} fuera del dominio de la FGM de T (s < {law.mgf_upper})", -INF, law.mgf_upper, stage="interarrival"
        )
    return law.mgf(s)


def cumulant_H(law: LogPriceLaw, interarrival: InterarrivalLaw, q: float) -> float:
    """H(q) = ln E e^{−qV_{T_1}} = ln M_{T_1}(ψ(q))"""
    psi = levy_exponent(law, q)
    if psi >= interarrival.mgf_upper:
        q_lo, q_hi = law.domain
        raise DomainError(
            f"ψ({q}) = {psi} fuera del dominio de la FGM de T_1 (< {interarrival.mgf_upper})",
            q_lo,
            q_hi,
            stage="interarrival",
        )
    return math.log(interarrival.mgf(psi))


def residual_law(law: InterarrivalLaw, r: float) -> InterarrivalLaw:
    """Ley residual F^r: P[T^r > t] = P[T > t + r] / P[T > r]"""
    if r < 0.0:
        raise InvalidModelError("r debe ser no negativo", r=r)
    return law.residual(r)


@dataclass(frozen=True)
class DominanceViolation:
    r: float
    t: float
    F_t: float
    Fr_t: float


@dataclass(frozen=True)
class DelayDominanceReport:
    passed: bool
    n_checked: int
    worst: Optional[DominanceViolation] = None
    skipped_r: Tuple[float, ...] = ()

    def to_dict(self) -> Dict[str, object]:
        return {
            "passed": self.passed,
            "n_checked": self.n_checked,
            "worst": None if self.worst is None else vars(self.worst),
            "skipped_r": list(self.skipped_r),
        }


def validate_delay_dominance(
    law: InterarrivalLaw, r_grid: Sequence[float], t_grid: Sequence[float], tol: float = 1e-12
) -> DelayDominanceReport:
    """Comprobar F^r(t) >= F(t) en la rejilla"""
    worst: Optional[DominanceViolation] = None
    skipped = []
    checked = 0
    for r in r_grid:
        try:
            res = residual_law(law, r)
        except DegenerateResidualError:
            skipped.append(r)
            continue
        for t in t_grid:
            F_t, Fr_t = law.cdf(t), res.cdf(t)
            checked += 1
            gap = F_t - Fr_t
            if gap > tol and (worst is None or gap > worst.F_t - worst.Fr_t):
                worst = DominanceViolation(r=r, t=t, F_t=F_t, Fr_t=Fr_t)
    if skipped:
        logger.debug("r fuera del soporte omitidos en la dominancia: %s", skipped)
    return DelayDominanceReport(passed=worst is None, n_checked=checked, worst=worst, skipped_r=tuple(skipped))
