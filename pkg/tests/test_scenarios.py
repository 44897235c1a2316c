import pytest

from ruinlab.beta_solver import solve_beta
from ruinlab.errors import InvalidModelError
from ruinlab.levy_models import LevyTriplet
from ruinlab.path_engine import BusinessSpec, ExponentialClaim
from ruinlab.levy_models import ExponentialInterarrival
from ruinlab.scenarios import ALL_TAGS, check_condition, deterministic_oracle, get_scenario, scenario_catalog
from ruinlab.schemas import build_experiment


def test_every_tag_has_a_scenario():
    catalog = scenario_catalog()
    tags = {s.tag for s in catalog if s.tag is not None}
    assert tags == set(ALL_TAGS)
    assert len(catalog) >= 10
    assert len({s.name for s in catalog}) == len(catalog)


def test_oracle_in_catalog():
    oracle = get_scenario("deterministic-oracle")
    assert oracle == deterministic_oracle()
    assert oracle.tag is None


def test_gbm_annuity_scenario():
    scenario = get_scenario("annuity-gbm-beta1")
    assert scenario.tag == "T2/1"
    built = build_experiment(scenario.config)
    assert solve_beta(built.model).beta == pytest.approx(1.0, abs=1e-10)


def test_jump_scenario_tag():
    scenario = get_scenario("annuity-jumps-2a")
    assert scenario.tag == "T2/2a"
    built = build_experiment(scenario.config)
    assert check_condition(scenario.tag, built.triplet, built.model.business) == (True, [])


def test_negative_jumps_scenario_beta():
    built = build_experiment(get_scenario("annuity-jumps-2e").config)
    assert solve_beta(built.model).beta == pytest.approx(1.0, abs=1e-8)


def test_condition_mismatch_reported():
    business = BusinessSpec(-1.0, ExponentialInterarrival(1.0), ExponentialClaim(1.0))
    ok, failures = check_condition("T1/1", LevyTriplet(0.2, 0.0), business)
    assert not ok
    assert len(failures) == 2


def test_approximate_flag():
    approximate = {s.tag for s in scenario_catalog() if s.approximate}
    assert approximate == {f"{cls}/{case}" for cls in ("T1", "T2", "T3") for case in ("2b", "2c")}


def test_unknown_scenario():
    with pytest.raises(InvalidModelError) as err:
        get_scenario("no-such-scenario")
    assert "deterministic-oracle" in err.value.detail["known"]
