"""
Catálogo de escenarios por caso de condición

Cada escenario lleva una etiqueta clase/caso: T1 no-vida (c >= 0, ξ < 0),
T2 renta (c < 0, ξ > 0), T3 mixto (ξ carga ambas semirrectas), por los casos
1, 2a-2e sobre σ, Π y F. La etiqueta se comprueba al construir el catálogo.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .beta_solver import solve_beta
from .errors import InvalidModelError
from .levy_models import LN2, LevyTriplet
from .path_engine import BusinessSpec
from .schemas import (
    BusinessConfig,
    ClaimsConfig,
    ExperimentConfig,
    FamilyConfig,
    InvestmentConfig,
    JumpComponentConfig,
    RunConfig,
    SmallJumpsConfig,
    build_experiment,
)

logger = logging.getLogger(__name__)

CLASSES = {"T1": "nonlife", "T2": "annuity", "T3": "mixed"}
CASES = ("1", "2a", "2b", "2c", "2d", "2e")
ALL_TAGS = tuple(f"{cls}/{case}" for cls in CLASSES for case in CASES)


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    config: ExperimentConfig
    tag: Optional[str] = None

    @property
    def approximate(self) -> bool:
        return self.config.investment.small_jumps is not None


# ==============================================================================
# Condiciones
# ==============================================================================


def _finite_abs_h(triplet: LevyTriplet) -> bool:
    """0 < Π(|h|) < ∞, con Π(|h|) = Σ λ_i E|h(e^{Y_i} − 1)|"""
    if triplet.small_jumps is not None:
        return False
    return sum(c.rate * c.law.expect(lambda y: abs(math.expm1(y)), -math.inf, LN2) for c in triplet.jumps) > 0.0


def _class_of(business: BusinessSpec) -> Optional[str]:
    sign = business.claims.sign_class
    if sign == "non-life" and business.c >= 0.0:
        return "T1"
    if sign == "annuity" and business.c < 0.0:
        return "T2"
    if sign == "mixed":
        return "T3"
    return None


def _f_condition(cls: str, business: BusinessSpec) -> bool:
    interarrival = business.interarrival
    if cls == "T1":
        return interarrival.charges_near_zero
    if cls == "T2" or business.c < 0.0:
        return interarrival.unbounded_support
    return business.claims.charges_near_zero_plus


def check_condition(tag: str, triplet: LevyTriplet, business: BusinessSpec) -> Tuple[bool, List[str]]:
    """Comprobar que (tripleta, negocio) cumple el caso de la etiqueta"""
    cls, case = tag.split("/")
    failures: List[str] = []
    if _class_of(business) != cls:
        failures.append(f"signos de c y ξ no corresponden a {cls}")

    claims = business.claims
    if case == "1":
        ok = triplet.sigma2 > 0.0
        if cls == "T1":
            ok = ok or claims.unbounded_below
        elif cls == "T3":
            ok = ok or claims.unbounded_below or claims.unbounded_above
        if not ok:
            failures.append("σ = 0 y ξ acotado")
    elif case == "2a":
        if not (triplet.charges_negative and triplet.charges_positive):
            failures.append("Π no carga ambas semirrectas")
    elif case == "2b":
        if triplet.charges_negative or not triplet.infinite_variation_positive:
            failures.append("se requiere Π((−1,0)) = 0 y Π(h) = ∞")
    elif case == "2c":
        if triplet.charges_positive or not triplet.infinite_variation_negative:
            failures.append("se requiere Π((0,∞)) = 0 y Π(|h|) = ∞")
    elif case in ("2d", "2e"):
        positive = case == "2d"
        one_sided = not triplet.charges_negative if positive else not triplet.charges_positive
        if not one_sided:
            failures.append("Π no es unilateral")
        if not _finite_abs_h(triplet):
            failures.append("se requiere 0 < Π(|h|) < ∞")
        if not _f_condition(cls, business):
            failures.append("condición de soporte de F o F_ξ no satisfecha")
    else:
        failures.append(f"caso desconocido '{case}'")
    return not failures, failures


# ==============================================================================
# Parámetros del catálogo
# ==============================================================================


def _jump(rate: float, family: str, /, **params: float) -> JumpComponentConfig:
    return JumpComponentConfig(rate=rate, family=family, params=params)


_INVESTMENT: Dict[str, Tuple[InvestmentConfig, str]] = {
    "1": (InvestmentConfig(a=0.2, sigma2=0.2), "GBM a = 0.2, σ² = 0.2 (β = 1)"),
    "2a": (
        InvestmentConfig(a=0.0, jumps=[_jump(1.0, "point", value=1.0), _jump(1.0, "point", value=-0.5)]),
        "σ = 0, saltos puntuales y = +1 y y = −0.5 con tasa 1",
    ),
    "2b": (
        InvestmentConfig(a=0.05, small_jumps=SmallJumpsConfig(eps=0.01, side="positive", intensity=0.1, alpha=1.5)),
        "saltos pequeños positivos de variación infinita (α = 1.5), aproximados por difusión",
    ),
    "2c": (
        InvestmentConfig(a=0.05, small_jumps=SmallJumpsConfig(eps=0.01, side="negative", intensity=0.1, alpha=1.5)),
        "saltos pequeños negativos de variación infinita (α = 1.5), aproximados por difusión",
    ),
    "2d": (
        InvestmentConfig(a=-0.9, jumps=[_jump(1.0, "exponential", rate=0.5, sign=1.0)]),
        "σ = 0, saltos positivos y ~ Exp(0.5) con tasa 1",
    ),
    "2e": (
        InvestmentConfig(a=2.0 / 3.0, jumps=[_jump(1.0, "exponential", rate=2.0, sign=-1.0)]),
        "σ = 0, saltos negativos y ~ −Exp(2) con tasa 1 (β = 1)",
    ),
}

_EXP1 = FamilyConfig(family="exponential", params={"rate": 1.0})


def _business(cls: str, case: str) -> BusinessConfig:
    if cls == "T1":
        claims = ClaimsConfig(family="exponential", params={"mean": 1.0, "sign": -1.0}, sign_class="non-life")
        return BusinessConfig(c=1.0, interarrival=_EXP1, claims=claims)
    if cls == "T2":
        claims = ClaimsConfig(family="exponential", params={"mean": 1.0, "sign": 1.0}, sign_class="annuity")
        return BusinessConfig(c=-1.0, interarrival=_EXP1, claims=claims)
    claims = ClaimsConfig(
        family="two-sided-exponential",
        params={"p_pos": 0.5, "mean_pos": 1.0, "mean_neg": 1.0},
        sign_class="mixed",
    )
    c = -0.5 if case in ("2d", "2e") else 0.5
    return BusinessConfig(c=c, interarrival=_EXP1, claims=claims)


_CLASS_TEXT = {"T1": "no-vida", "T2": "renta", "T3": "mixto"}


def _name(cls: str, case: str) -> str:
    prefix = CLASSES[cls]
    return f"{prefix}-gbm-beta1" if case == "1" else f"{prefix}-jumps-{case}"


def deterministic_oracle() -> Scenario:
    """V_t = t, c = −1, ξ ≡ 1, T ≡ 1: todas las cantidades en forma cerrada"""
    config = ExperimentConfig(
        investment=InvestmentConfig(a=1.0, sigma2=0.0),
        business=BusinessConfig(
            c=-1.0,
            interarrival=FamilyConfig(family="deterministic", params={"value": 1.0}),
            claims=ClaimsConfig(family="point", params={"value": 1.0}, sign_class="annuity"),
        ),
        run=RunConfig(u_grid=[0.5, 0.7], n_trials=100, n_yinf=100),
    )
    return Scenario(
        name="deterministic-oracle",
        description="V_t = t, c = −1, ξ ≡ 1, T ≡ 1; Y∞ = (1 − 2/e)/(1 − 1/e)",
        config=config,
    )


@lru_cache(maxsize=1)
def _catalog() -> Tuple[Scenario, ...]:
    scenarios: List[Scenario] = []
    for cls in CLASSES:
        for case in CASES:
            investment, text = _INVESTMENT[case]
            config = ExperimentConfig(investment=investment, business=_business(cls, case), run=RunConfig())
            tag = f"{cls}/{case}"
            built = build_experiment(config)
            ok, failures = check_condition(tag, built.triplet, built.model.business)
            if not ok:
                raise InvalidModelError(f"El escenario {tag} no cumple su condición: {failures}", tag=tag)
            solve_beta(built.model)
            scenarios.append(
                Scenario(name=_name(cls, case), description=f"{_CLASS_TEXT[cls]}: {text}", config=config, tag=tag)
            )
    scenarios.append(deterministic_oracle())
    logger.debug("Catálogo con %d escenarios", len(scenarios))
    return tuple(scenarios)


def scenario_catalog() -> List[Scenario]:
    """Escenarios con nombre, uno por etiqueta clase/caso, más el oráculo determinista"""
    return list(_catalog())


def get_scenario(name: str) -> Scenario:
    for scenario in _catalog():
        if scenario.name == name:
            return scenario
    raise InvalidModelError(f"Escenario desconocido: '{name}'", known=[s.name for s in _catalog()])
