import json
import math

import pytest

from ruinlab.levy_models import (
    DeterministicInterarrival,
    ExponentialInterarrival,
    ExponentialJump,
    JumpComponent,
    LevyTriplet,
    log_price_law,
)
from ruinlab.path_engine import BusinessSpec, ExponentialClaim, PointClaim, RiskModel, SimPolicy
from ruinlab.scenarios import deterministic_oracle, get_scenario
from ruinlab.schemas import build_experiment, serialize_config

E1 = math.exp(-1.0)
YINF_ORACLE = (1.0 - 2.0 * E1) / (1.0 - E1)  # ≈ 0.418023
SUP_Y_ORACLE = 1.0 - E1  # ≈ 0.632121


def make_model(a, sigma2, c, claims, interarrival=None, jumps=(), r=0.0):
    triplet = LevyTriplet(a, sigma2, tuple(jumps))
    business = BusinessSpec(c, interarrival or ExponentialInterarrival(1.0), claims, r)
    return RiskModel(investment=log_price_law(triplet), business=business, triplet=triplet)


@pytest.fixture
def oracle_model():
    """V_t = t, c = −1, ξ ≡ 1, T ≡ 1"""
    return make_model(1.0, 0.0, -1.0, PointClaim(1.0), DeterministicInterarrival(1.0))


@pytest.fixture
def gbm_annuity():
    """a = 0.2, σ² = 0.2, T ~ Exp(1), c = −1, ξ ~ Exp(media 1): β = 1"""
    return make_model(0.2, 0.2, -1.0, ExponentialClaim(1.0, 1.0))


@pytest.fixture
def gbm_nonlife():
    return make_model(0.2, 0.2, 1.0, ExponentialClaim(1.0, -1.0))


@pytest.fixture
def mixed_jumps():
    """σ = 0, saltos negativos −Exp(2) con tasa 1 y a = 2/3: β = 1"""
    return make_model(2.0 / 3.0, 0.0, -1.0, ExponentialClaim(1.0, 1.0), jumps=[JumpComponent(1.0, ExponentialJump(2.0, -1.0))])


@pytest.fixture
def policy():
    return SimPolicy(n_sub=8, eps_A=1e-6, n_max_claims=100_000)


@pytest.fixture
def exact_policy():
    return SimPolicy(n_sub=64)


@pytest.fixture
def oracle_config_path(tmp_path):
    path = tmp_path / "oracle.json"
    path.write_text(serialize_config(deterministic_oracle().config), encoding="utf-8")
    return str(path)


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def gbm_config(a=0.2, sigma2=0.2, **run):
    base_run = {"u_grid": [1.0, 2.0], "n_trials": 50, "n_yinf": 50, "n_sub": 8, "eps_A": 1e-6}
    base_run.update(run)
    return {
        "schema_version": 1,
        "investment": {"a": a, "sigma2": sigma2},
        "business": {
            "c": -1.0,
            "interarrival": {"family": "exponential", "params": {"rate": 1.0}},
            "claims": {"family": "exponential", "params": {"mean": 1.0, "sign": 1.0}, "sign_class": "annuity"},
        },
        "run": base_run,
    }


@pytest.fixture
def catalog_gbm():
    return build_experiment(get_scenario("annuity-gbm-beta1").config)
