import math

import numpy as np
import pytest

from ruinlab.errors import DegenerateResidualError, DomainError, HeavyTailError, InvalidTripletError
from ruinlab.levy_models import (
    DeterministicInterarrival,
    ExponentialInterarrival,
    ExponentialJump,
    GammaInterarrival,
    JumpComponent,
    LevyTriplet,
    NormalJump,
    PointJump,
    SmallJumpBand,
    UniformInterarrival,
    cumulant_H,
    effective_domain,
    interarrival_from_spec,
    jump_law_from_spec,
    levy_exponent,
    log_price_law,
    mgf_interarrival,
    residual_law,
    sample_log_price,
    validate_delay_dominance,
)


def test_gbm_log_price_drift():
    law = log_price_law(LevyTriplet(0.3, 0.2))
    assert law.a_v == pytest.approx(0.2, abs=1e-15)
    assert law.sigma2 == 0.2
    assert not law.approximate


def test_levy_exponent_is_zero_at_origin():
    law = log_price_law(LevyTriplet(0.3, 0.2))
    assert levy_exponent(law, 0.0) == 0.0


def test_levy_exponent_gbm_quadratic():
    law = log_price_law(LevyTriplet(0.3, 0.2))
    for q in (0.5, 1.0, 3.0):
        assert levy_exponent(law, q) == pytest.approx(-0.2 * q + 0.1 * q * q, abs=1e-14)


def test_negative_exponential_jumps_closed_form():
    # a = 2/3 y saltos −Exp(2) con tasa 1: ψ(q) = −q + q/(2 − q)
    triplet = LevyTriplet(2.0 / 3.0, 0.0, (JumpComponent(1.0, ExponentialJump(2.0, -1.0)),))
    law = log_price_law(triplet)
    for q in (0.25, 1.0, 1.5):
        assert levy_exponent(law, q) == pytest.approx(-q + q / (2.0 - q), abs=1e-9)


def test_effective_domain_and_domain_error():
    triplet = LevyTriplet(0.1, 0.1, (JumpComponent(1.0, ExponentialJump(2.0, -1.0)),))
    law = log_price_law(triplet)
    assert effective_domain(law) == (-math.inf, 2.0)
    with pytest.raises(DomainError) as err:
        levy_exponent(law, 2.5)
    assert err.value.q_hi == 2.0


def test_x_space_jump_at_minus_one_rejected():
    with pytest.raises(InvalidTripletError, match=r"Π\(\(−∞,−1\]\) = 0"):
        jump_law_from_spec("point", {"value": -1.0}, space="x")


def test_x_space_point_jump_maps_to_log():
    law = jump_law_from_spec("point", {"value": 1.0}, space="x")
    assert law.value == pytest.approx(math.log(2.0))


def test_x_space_uniform_uses_quadrature():
    law = jump_law_from_spec("uniform", {"lo": -0.5, "hi": 0.5}, space="x")
    # E[e^{−Y}] = E[1/(1+X)] = ln 3
    assert law.exp_moment(1.0) == pytest.approx(math.log(3.0), rel=1e-9)
    assert law.to_x_params() == {"lo": -0.5, "hi": 0.5}


def test_exponential_only_in_y_space():
    with pytest.raises(InvalidTripletError):
        jump_law_from_spec("exponential", {"rate": 1.0, "sign": 1.0}, space="x")


def test_power_density_band():
    band = SmallJumpBand.from_power_density(intensity=0.1, alpha=1.5, eps=0.01, side="positive")
    assert band.variance == pytest.approx(0.02)
    assert band.infinite_variation
    law = log_price_law(LevyTriplet(0.05, 0.0, (), band))
    assert law.approximate
    assert law.sigma2 == pytest.approx(0.02)
    assert law.a_v == pytest.approx(0.04)


def test_cumulant_H_exponential_interarrival():
    law = log_price_law(LevyTriplet(0.2, 0.2))
    psi = levy_exponent(law, 0.5)
    assert cumulant_H(law, ExponentialInterarrival(1.0), 0.5) == pytest.approx(-math.log(1.0 - psi))


def test_cumulant_H_outside_interarrival_domain():
    law = log_price_law(LevyTriplet(0.2, 0.2))
    with pytest.raises(DomainError) as err:
        cumulant_H(law, ExponentialInterarrival(1.0), 10.0)
    assert err.value.stage == "interarrival"


def test_heavy_tailed_interarrival_rejected():
    with pytest.raises(HeavyTailError):
        interarrival_from_spec("pareto", {"alpha": 2.0, "scale": 1.0})


def test_exponential_residual_is_memoryless():
    law = ExponentialInterarrival(2.0)
    assert residual_law(law, 3.0) == law


def test_deterministic_residual():
    law = DeterministicInterarrival(1.0)
    assert residual_law(law, 0.3).value == pytest.approx(0.7)
    with pytest.raises(DegenerateResidualError):
        residual_law(law, 1.0)


def test_uniform_residual():
    assert residual_law(UniformInterarrival(0.0, 2.0), 0.5) == UniformInterarrival(0.0, 1.5)
    assert residual_law(UniformInterarrival(1.0, 3.0), 0.5) == UniformInterarrival(0.5, 2.5)
    with pytest.raises(DegenerateResidualError):
        residual_law(UniformInterarrival(0.0, 2.0), 2.0)


def test_gamma_residual_cdf_matches_conditioning():
    law = GammaInterarrival(2.0, 1.0)
    res = residual_law(law, 1.5)
    t = 0.7
    expected = (law.cdf(t + 1.5) - law.cdf(1.5)) / (1.0 - law.cdf(1.5))
    assert res.cdf(t) == pytest.approx(expected, rel=1e-10)


def test_delay_dominance_increasing_hazard():
    report = validate_delay_dominance(GammaInterarrival(2.0, 1.0), [0.0, 0.5, 1.0, 5.0], np.linspace(0.1, 5, 20))
    assert report.passed
    assert report.n_checked == 80


def test_delay_dominance_decreasing_hazard_fails():
    report = validate_delay_dominance(GammaInterarrival(0.5, 1.0), [1.0], [0.5, 1.0])
    assert not report.passed
    assert report.worst.F_t > report.worst.Fr_t


def test_delay_dominance_skips_residual_outside_support():
    report = validate_delay_dominance(DeterministicInterarrival(1.0), [0.0, 0.5, 2.0], [0.5, 1.0])
    assert report.passed
    assert report.skipped_r == (2.0,)


def test_sample_log_price_mean():
    law = log_price_law(LevyTriplet(0.2, 0.2))
    rng = np.random.default_rng(7)
    v = sample_log_price(law, np.full(200_000, 2.0), rng)
    se = v.std() / math.sqrt(v.size)
    assert abs(v.mean() - 0.2) <= 4 * se


def test_sample_log_price_matches_cumulant():
    # E e^{−qV_T} = e^{H(q)} con T ~ Exp(1)
    triplet = LevyTriplet(0.3, 0.1, (JumpComponent(0.5, ExponentialJump(2.0, -1.0)),))
    law = log_price_law(triplet)
    rng = np.random.default_rng(11)
    T = rng.standard_exponential(200_000)
    w = np.exp(-0.5 * sample_log_price(law, T, rng))
    se = w.std() / math.sqrt(w.size)
    assert abs(w.mean() - math.exp(cumulant_H(law, ExponentialInterarrival(1.0), 0.5))) <= 4 * se


def test_x_space_point_jump_drift_correction():
    # x = e − 1 <=> y = 1, con λ = 2: h(y) = 1 y h(x) = 0
    jump = jump_law_from_spec("point", {"value": math.e - 1.0}, space="x")
    law = log_price_law(LevyTriplet(0.0, 0.0, (JumpComponent(2.0, jump),)))
    assert law.a_v == pytest.approx(2.0, abs=1e-12)


def test_x_space_small_jump_drift_correction():
    jump = jump_law_from_spec("point", {"value": 0.5}, space="x")
    law = log_price_law(LevyTriplet(0.0, 0.0, (JumpComponent(1.0, jump),)))
    assert law.a_v == pytest.approx(math.log(1.5) - 0.5, abs=1e-12)
    assert law.a_v == pytest.approx(-0.094535, abs=1e-6)


def test_levy_exponent_point_jump():
    law = log_price_law(LevyTriplet(0.0, 0.0, (JumpComponent(2.0, PointJump(1.0)),)))
    assert law.a_v == pytest.approx(2.0, abs=1e-12)
    assert levy_exponent(law, 1.0) == pytest.approx(-2.0 + 2.0 * math.exp(-1.0), abs=1e-12)
    assert levy_exponent(law, 1.0) == pytest.approx(-1.264241, abs=1e-6)


def test_mgf_interarrival_closed_forms():
    assert mgf_interarrival(ExponentialInterarrival(1.0), 0.5) == pytest.approx(2.0, abs=1e-12)
    assert mgf_interarrival(GammaInterarrival(2.0, 1.0), 0.5) == pytest.approx(4.0, abs=1e-12)
    assert mgf_interarrival(DeterministicInterarrival(2.0), 0.5) == pytest.approx(math.e, abs=1e-12)


@pytest.mark.parametrize("law", [ExponentialInterarrival(1.0), GammaInterarrival(2.0, 1.0)])
def test_mgf_interarrival_outside_domain(law):
    with pytest.raises(DomainError) as err:
        mgf_interarrival(law, 1.0)
    assert err.value.stage == "interarrival"


@pytest.mark.parametrize(
    "triplet,qs",
    [
        (LevyTriplet(0.3, 0.2), np.linspace(-3.0, 5.0, 33)),
        (LevyTriplet(2.0 / 3.0, 0.0, (JumpComponent(1.0, ExponentialJump(2.0, -1.0)),)), np.linspace(0.05, 1.9, 38)),
        (
            LevyTriplet(
                0.25,
                0.05,
                (
                    JumpComponent(0.5, NormalJump(0.1, 0.3)),
                    JumpComponent(0.3, PointJump(-0.4)),
                    JumpComponent(0.2, jump_law_from_spec("uniform", {"lo": -0.3, "hi": 0.6}, space="x")),
                ),
            ),
            np.linspace(-2.0, 4.0, 25),
        ),
    ],
)
def test_levy_exponent_is_convex(triplet, qs):
    law = log_price_law(triplet)
    values = np.array([levy_exponent(law, float(q)) for q in qs])
    second = values[2:] - 2.0 * values[1:-1] + values[:-2]
    assert (second >= -1e-10).all()


@pytest.mark.parametrize(
    "interarrival",
    [
        ExponentialInterarrival(1.0),
        GammaInterarrival(2.0, 0.5),
        DeterministicInterarrival(1.0),
        UniformInterarrival(0.0, 2.0),
    ],
)
def test_cumulant_H_has_sign_of_psi(interarrival):
    # ψ(q) = −0.2q + 0.1q² cambia de signo en q = 2
    law = log_price_law(LevyTriplet(0.3, 0.2))
    for q in (0.5, 1.0, 1.5, 2.5, 3.0):
        psi = levy_exponent(law, q)
        assert np.sign(cumulant_H(law, interarrival, q)) == np.sign(psi)


@pytest.mark.parametrize(
    "family,params",
    [
        ("point", {"value": 0.5}),
        ("point", {"value": -0.75}),
        ("two-point", {"v1": -0.3, "v2": 1.2, "p": 0.4}),
        ("uniform", {"lo": -0.2, "hi": 0.3}),
    ],
)
def test_x_space_params_round_trip(family, params):
    back = jump_law_from_spec(family, params, space="x").to_x_params()
    assert back.keys() == params.keys()
    for key, value in params.items():
        assert back[key] == pytest.approx(value, abs=1e-12)


def test_x_space_uniform_is_its_own_family():
    law = jump_law_from_spec("uniform", {"lo": -0.2, "hi": 0.3}, space="x")
    assert law.describe() == {"family": "uniform-price", "space": "x", "params": {"lo": -0.2, "hi": 0.3}}
    assert law.lower == pytest.approx(math.log(0.8))
    assert law.upper == pytest.approx(math.log(1.3))
    y_law = jump_law_from_spec("uniform", {"lo": -0.2, "hi": 0.3})
    assert y_law.describe() == {"family": "uniform", "space": "y", "params": {"lo": -0.2, "hi": 0.3}}


def test_log_price_law_to_dict_lists_jumps():
    jump = jump_law_from_spec("point", {"value": 0.5}, space="x")
    payload = log_price_law(LevyTriplet(0.1, 0.2, (JumpComponent(1.0, jump),))).to_dict()
    assert payload["sigma2"] == 0.2
    assert payload["jumps"] == [{"rate": 1.0, "family": "point", "space": "y", "params": {"value": math.log1p(0.5)}}]
