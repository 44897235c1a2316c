"""
Esquemas de configuración de experimentos (pydantic v2)

Un ExperimentConfig es JSON con versión de esquema. parse_config valida la
forma con pydantic y después construye los objetos del dominio etapa por
etapa, acumulando todas las violaciones antes de fallar.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .config import (
    DEFAULT_EPS_A,
    DEFAULT_N_MAX_CLAIMS,
    DEFAULT_N_SUB,
    DEFAULT_N_TRIALS,
    DEFAULT_N_YINF,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    DEFAULT_U_GRID,
    DEFAULT_U_MARGIN,
    SCHEMA_VERSION,
)
from .errors import ConfigError, ConfigSyntaxError, RuinLabError
from .levy_models import (
    JumpComponent,
    LevyTriplet,
    SmallJumpBand,
    interarrival_from_spec,
    jump_law_from_spec,
    log_price_law,
)
from .path_engine import BusinessSpec, RiskModel, SimPolicy, claim_law_from_spec

logger = logging.getLogger(__name__)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class JumpComponentConfig(_Strict):
    rate: float = Field(gt=0)
    family: str
    params: Dict[str, float]
    space: Literal["x", "y"] = "y"


class SmallJumpsConfig(_Strict):
    """Banda de saltos pequeños: varianza directa o densidad c·|y|^{−1−α}"""

    eps: float = Field(gt=0, le=1)
    side: Literal["positive", "negative", "both"] = "both"
    variance: Optional[float] = Field(default=None, ge=0)
    intensity: Optional[float] = Field(default=None, gt=0)
    alpha: Optional[float] = Field(default=None, gt=0, lt=2)
    infinite_variation: bool = True

    @model_validator(mode="after")
    def _one_source(self):
        direct = self.variance is not None
        density = self.intensity is not None or self.alpha is not None
        if direct == density:
            raise ValueError("indicar 'variance' o bien ('intensity', 'alpha'), no ambos")
        if density and (self.intensity is None or self.alpha is None):
            raise ValueError("la densidad requiere 'intensity' y 'alpha'")
        return self


class InvestmentConfig(_Strict):
    a: float
    sigma2: float = Field(default=0.0, ge=0)
    jumps: List[JumpComponentConfig] = Field(default_factory=list)
    small_jumps: Optional[SmallJumpsConfig] = None


class FamilyConfig(_Strict):
    family: str
    params: Dict[str, float]


class ClaimsConfig(FamilyConfig):
    sign_class: Optional[Literal["annuity", "non-life", "mixed"]] = None


class BusinessConfig(_Strict):
    c: float
    interarrival: FamilyConfig
    claims: ClaimsConfig
    r: float = Field(default=0.0, ge=0)


class RunConfig(_Strict):
    u_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_U_GRID))
    n_trials: int = Field(default=DEFAULT_N_TRIALS, ge=1)
    n_yinf: int = Field(default=DEFAULT_N_YINF, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    n_sub: int = Field(default=DEFAULT_N_SUB, ge=1)
    eps_A: float = Field(default=DEFAULT_EPS_A, gt=0, lt=1)
    n_max_claims: int = Field(default=DEFAULT_N_MAX_CLAIMS, ge=1)
    t_max: Optional[float] = Field(default=None, gt=0)
    u_margin: float = Field(default=DEFAULT_U_MARGIN, ge=0)
    threads: int = Field(default=DEFAULT_THREADS, ge=1)
    r_grid: Optional[List[float]] = None

    @model_validator(mode="after")
    def _grids(self):
        if not self.u_grid or any(u <= 0 for u in self.u_grid):
            raise ValueError("u_grid debe contener valores positivos")
        if any(b <= a for a, b in zip(self.u_grid, self.u_grid[1:])):
            raise ValueError("u_grid debe ser estrictamente creciente")
        if self.r_grid is not None and any(r < 0 for r in self.r_grid):
            raise ValueError("r_grid debe ser no negativo")
        return self


class ExperimentConfig(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    investment: InvestmentConfig
    business: BusinessConfig
    run: RunConfig = Field(default_factory=RunConfig)


# ==============================================================================
# Texto <-> configuración
# ==============================================================================


def _location(text: str, pos: int) -> Tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, column


def parse_config(text: str) -> ExperimentConfig:
    """Validar un JSON de experimento; reporta todas las violaciones, no solo la primera"""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"JSON inválido: {exc.msg}", line=exc.lineno, column=exc.colno) from exc

    try:
        config = ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        violations = [f"{'.'.join(str(p) for p in err['loc']) or '<raíz>'}: {err['msg']}" for err in exc.errors()]
        raise ConfigError(violations) from exc

    violations = semantic_violations(config)
    if violations:
        raise ConfigError(violations)
    return config


def serialize_config(config: ExperimentConfig) -> str:
    return config.model_dump_json(indent=2)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# ==============================================================================
# Configuración -> objetos del dominio
# ==============================================================================


@dataclass(frozen=True)
class BuiltExperiment:
    triplet: LevyTriplet
    model: RiskModel
    policy: SimPolicy


def build_triplet(inv: InvestmentConfig) -> Tuple[Optional[LevyTriplet], List[str]]:
    errors: List[str] = []
    components: List[JumpComponent] = []
    for i, comp in enumerate(inv.jumps):
        try:
            components.append(JumpComponent(comp.rate, jump_law_from_spec(comp.family, comp.params, comp.space)))
        except RuinLabError as exc:
            errors.append(f"investment.jumps.{i}: {exc.message}")
    band = None
    if inv.small_jumps is not None:
        sj = inv.small_jumps
        try:
            if sj.variance is not None:
                band = SmallJumpBand(sj.eps, sj.variance, sj.side, sj.infinite_variation)
            else:
                band = SmallJumpBand.from_power_density(sj.intensity, sj.alpha, sj.eps, sj.side)
        except RuinLabError as exc:
            errors.append(f"investment.small_jumps: {exc.message}")
    if errors:
        return None, errors
    try:
        return LevyTriplet(inv.a, inv.sigma2, tuple(components), band), []
    except RuinLabError as exc:
        return None, [f"investment: {exc.message}"]


def build_business(bus: BusinessConfig) -> Tuple[Optional[BusinessSpec], List[str]]:
    errors: List[str] = []
    interarrival = claims = None
    try:
        interarrival = interarrival_from_spec(bus.interarrival.family, bus.interarrival.params)
    except RuinLabError as exc:
        errors.append(f"business.interarrival: {exc.message}")
    try:
        claims = claim_law_from_spec(bus.claims.family, bus.claims.params)
    except RuinLabError as exc:
        errors.append(f"business.claims: {exc.message}")
    if errors:
        return None, errors
    try:
        return BusinessSpec(bus.c, interarrival, claims, bus.r, bus.claims.sign_class), []
    except RuinLabError as exc:
        return None, [f"business: {exc.message}"]


def build_policy(run: RunConfig) -> Tuple[Optional[SimPolicy], List[str]]:
    try:
        return SimPolicy(run.n_sub, run.eps_A, run.n_max_claims, run.t_max, run.u_margin), []
    except RuinLabError as exc:
        return None, [f"run: {exc.message}"]


def semantic_violations(config: ExperimentConfig) -> List[str]:
    violations: List[str] = []
    for stage in (build_triplet(config.investment), build_business(config.business), build_policy(config.run)):
        violations.extend(stage[1])
    return violations


def build_experiment(config: ExperimentConfig) -> BuiltExperiment:
    triplet, e1 = build_triplet(config.investment)
    business, e2 = build_business(config.business)
    policy, e3 = build_policy(config.run)
    violations = e1 + e2 + e3
    if violations:
        raise ConfigError(violations)
    model = RiskModel(investment=log_price_law(triplet), business=business, triplet=triplet)
    return BuiltExperiment(triplet=triplet, model=model, policy=policy)
