import json

import pytest

from ruinlab.config import DEFAULT_N_SUB, DEFAULT_SEED, DEFAULT_U_GRID
from ruinlab.errors import ConfigError, ConfigSyntaxError
from ruinlab.levy_models import UniformPriceJump
from ruinlab.scenarios import scenario_catalog
from ruinlab.schemas import build_experiment, load_config, parse_config, serialize_config

from conftest import gbm_config, write_config


def test_defaults_are_filled():
    payload = gbm_config()
    del payload["run"]
    config = parse_config(json.dumps(payload))
    assert config.run.seed == DEFAULT_SEED
    assert config.run.n_sub == DEFAULT_N_SUB
    assert tuple(config.run.u_grid) == DEFAULT_U_GRID
    assert config.business.r == 0.0
    assert config.investment.jumps == []


def test_build_experiment():
    built = build_experiment(parse_config(json.dumps(gbm_config(n_sub=8))))
    assert built.policy.n_sub == 8
    assert built.model.business.sign_class == "annuity"
    assert built.model.investment.a_v == pytest.approx(0.1)


def test_syntax_error_location():
    with pytest.raises(ConfigSyntaxError) as err:
        parse_config('{\n  "schema_version": 1,\n  "investment": {,}\n}')
    assert err.value.line == 3
    assert err.value.column > 1
    assert err.value.detail["line"] == 3


def test_unknown_field_rejected():
    payload = gbm_config()
    payload["investment"]["mu"] = 0.1
    with pytest.raises(ConfigError) as err:
        parse_config(json.dumps(payload))
    assert any(v.startswith("investment.mu") for v in err.value.violations)


def test_all_shape_violations_reported():
    payload = gbm_config()
    payload["investment"]["sigma2"] = -1.0
    payload["business"]["r"] = -1.0
    payload["run"]["u_grid"] = [2.0, 1.0]
    with pytest.raises(ConfigError) as err:
        parse_config(json.dumps(payload))
    joined = "\n".join(err.value.violations)
    assert "business.r" in joined
    assert "u_grid debe ser estrictamente creciente" in joined
    assert "investment.sigma2" in joined


def test_all_semantic_violations_reported():
    payload = gbm_config()
    payload["investment"]["jumps"] = [{"rate": 1.0, "family": "point", "params": {"value": -1.5}, "space": "x"}]
    payload["business"]["interarrival"] = {"family": "pareto", "params": {"alpha": 2.0, "scale": 1.0}}
    payload["business"]["claims"] = {"family": "weibull", "params": {"shape": 2.0}}
    with pytest.raises(ConfigError) as err:
        parse_config(json.dumps(payload))
    violations = err.value.violations
    assert len(violations) == 3
    assert violations[0].startswith("investment.jumps.0: Π((−∞,−1]) = 0")
    assert violations[1].startswith("business.interarrival:")
    assert violations[2].startswith("business.claims: Familia de")


def test_sign_class_must_match_support():
    payload = gbm_config()
    payload["business"]["claims"]["sign_class"] = "mixed"
    with pytest.raises(ConfigError) as err:
        parse_config(json.dumps(payload))
    assert "no coincide" in err.value.violations[0]


def test_forbidden_annuity_with_positive_premium():
    payload = gbm_config()
    payload["business"]["c"] = 0.5
    with pytest.raises(ConfigError) as err:
        parse_config(json.dumps(payload))
    assert "la ruina nunca ocurre" in err.value.violations[0]


def test_small_jump_band_needs_one_description():
    payload = gbm_config()
    payload["investment"]["small_jumps"] = {"eps": 0.01, "variance": 0.01, "intensity": 0.1, "alpha": 1.5}
    with pytest.raises(ConfigError):
        parse_config(json.dumps(payload))


def test_x_space_jumps():
    payload = gbm_config()
    payload["investment"]["jumps"] = [{"rate": 0.5, "family": "uniform", "params": {"lo": -0.2, "hi": 0.3}, "space": "x"}]
    built = build_experiment(parse_config(json.dumps(payload)))
    assert isinstance(built.triplet.jumps[0].law, UniformPriceJump)


def test_load_config(tmp_path):
    path = write_config(tmp_path, "exp.json", gbm_config(seed=11))
    assert load_config(path).run.seed == 11


def test_catalog_round_trip():
    for scenario in scenario_catalog():
        text = serialize_config(scenario.config)
        assert parse_config(text) == scenario.config
