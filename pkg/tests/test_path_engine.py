import math

import numpy as np
import pytest

from ruinlab.errors import CensoredSampleError, InvalidModelError
from ruinlab.levy_models import DeterministicInterarrival, ExponentialInterarrival, GammaInterarrival, levy_exponent
from ruinlab.path_engine import (
    ClockState,
    ExponentialClaim,
    PointClaim,
    QMPair,
    RiskModel,
    Ruined,
    SimPolicy,
    Survived,
    advance_clock,
    run_trial,
    sample_Yinf,
    simulate_block,
    trace_path,
)
from ruinlab.rng import STREAM_BLOCKS, STREAM_PATHS, stream_rng
from ruinlab.tail_stats import ks_two_sample

from conftest import E1, SUP_Y_ORACLE, YINF_ORACLE, make_model


def test_oracle_block(oracle_model):
    block = simulate_block(oracle_model.investment, oracle_model.business, True, np.random.default_rng(0), n_sub=16)
    assert block.T == 1.0
    assert block.qm.Q == pytest.approx(1.0 - 2.0 * E1, abs=1e-12)
    assert block.qm.M == pytest.approx(E1, abs=1e-15)
    assert block.times.size == 17


def test_zero_premium_unit_gain_gives_equal_Q_and_M():
    model = make_model(1.0, 0.0, 0.0, PointClaim(-1.0), DeterministicInterarrival(1.0))
    qm = simulate_block(model.investment, model.business, True, np.random.default_rng(0)).qm
    assert qm.Q == qm.M


def test_annuity_never_ruins_with_positive_premium():
    with pytest.raises(InvalidModelError, match="la ruina nunca ocurre"):
        make_model(0.2, 0.2, 1.0, ExponentialClaim(1.0, 1.0))


def test_oracle_ruin_at_continuous_crossing(oracle_model):
    trial = run_trial(oracle_model, 0.5, SimPolicy(n_sub=1024), np.random.default_rng(0))
    outcome = trial.outcome
    assert isinstance(outcome, Ruined)
    assert outcome.crossing == "continuous"
    assert outcome.tau == pytest.approx(math.log(2.0), abs=1e-6)
    assert abs(outcome.x_at_tau) <= outcome.x_tolerance
    assert outcome.clock_at_tau == pytest.approx(outcome.tau)
    assert trial.n_claims == 0


def test_oracle_survives_above_supremum(oracle_model):
    trial = run_trial(oracle_model, 0.7, SimPolicy(n_sub=16), np.random.default_rng(0))
    assert isinstance(trial.outcome, Survived)
    assert trial.sup_y == pytest.approx(SUP_Y_ORACLE, abs=1e-9)
    assert trial.outcome.y_final < YINF_ORACLE
    assert trial.outcome.a_final < 1e-12


def test_tolerance_shrinks_with_substeps(oracle_model):
    coarse = run_trial(oracle_model, 0.5, SimPolicy(n_sub=64), np.random.default_rng(0)).outcome
    fine = run_trial(oracle_model, 0.5, SimPolicy(n_sub=128), np.random.default_rng(0)).outcome
    assert fine.x_tolerance / coarse.x_tolerance <= 0.6


def test_nonlife_ruin_at_claim():
    model = make_model(1.0, 0.0, 1.0, PointClaim(-3.0), DeterministicInterarrival(1.0))
    outcome = run_trial(model, 0.4, SimPolicy(n_sub=16), np.random.default_rng(0)).outcome
    assert isinstance(outcome, Ruined)
    assert outcome.crossing == "jump"
    assert outcome.tau == 1.0
    assert outcome.x_before > 0.0
    assert outcome.x_at_tau < 0.0
    assert outcome.clock_at_tau == 0.0


def test_u_must_be_positive(oracle_model):
    with pytest.raises(InvalidModelError):
        run_trial(oracle_model, 0.0, SimPolicy(), np.random.default_rng(0))


def test_claim_budget_censors(gbm_annuity):
    policy = SimPolicy(n_sub=8, n_max_claims=1)
    results = [run_trial(gbm_annuity, 50.0, policy, stream_rng(1, STREAM_PATHS, i)) for i in range(20)]
    assert all(r.censored or r.ruined for r in results)
    assert any(r.censored for r in results)


def test_clock():
    state = advance_clock(ClockState(0.5), 0.25, claim=False)
    assert state.value == 0.75
    assert advance_clock(state, 2.0, claim=True).value == 0.0
    with pytest.raises(InvalidModelError):
        advance_clock(state, -1.0, claim=False)


def test_residual_clock_shortens_first_block():
    model = make_model(1.0, 0.0, -1.0, PointClaim(1.0), DeterministicInterarrival(1.0), r=0.25)
    business = model.business
    first = simulate_block(model.investment, business, True, np.random.default_rng(0))
    later = simulate_block(model.investment, business, False, np.random.default_rng(0))
    assert first.T == 0.75
    assert later.T == 1.0


def test_yinf_oracle(oracle_model):
    draw = sample_Yinf(oracle_model, SimPolicy(n_sub=16, eps_A=1e-6), np.random.default_rng(0))
    assert draw.value == pytest.approx(YINF_ORACLE, abs=1e-6)
    assert draw.n_blocks == 14


def test_yinf_zero_premium_unit_gain():
    model = make_model(1.0, 0.0, 0.0, PointClaim(-1.0), DeterministicInterarrival(1.0))
    draw = sample_Yinf(model, SimPolicy(n_sub=4), np.random.default_rng(0))
    assert draw.value == pytest.approx(E1 / (1.0 - E1), abs=1e-10)
    assert draw.value == pytest.approx(0.581977, abs=1e-6)


def test_yinf_censored(oracle_model):
    with pytest.raises(CensoredSampleError) as err:
        sample_Yinf(oracle_model, SimPolicy(n_sub=4, n_max_claims=3), np.random.default_rng(0))
    assert err.value.n_blocks == 3


def test_yinf_continues_from_start(oracle_model):
    policy = SimPolicy(n_sub=16)
    first = simulate_block(oracle_model.investment, oracle_model.business, True, np.random.default_rng(0)).qm
    direct = sample_Yinf(oracle_model, policy, np.random.default_rng(0))
    continued = sample_Yinf(oracle_model, policy, np.random.default_rng(0), residual_first=False, start=first)
    assert continued.value == direct.value
    assert continued.n_blocks == direct.n_blocks
    assert sample_Yinf(oracle_model, policy, np.random.default_rng(0), start=QMPair(0.0, 1e-13)).n_blocks == 1


def test_scale_invariance(gbm_annuity, policy):
    scaled = RiskModel(gbm_annuity.investment, gbm_annuity.business.scaled(2.0), gbm_annuity.triplet)
    for i in range(30):
        base = run_trial(gbm_annuity, 1.5, policy, stream_rng(9, STREAM_PATHS, i))
        twice = run_trial(scaled, 3.0, policy, stream_rng(9, STREAM_PATHS, i))
        assert type(base.outcome) is type(twice.outcome)
        assert base.n_claims == twice.n_claims
        if base.ruined:
            assert twice.outcome.tau == base.outcome.tau


def test_ruin_nested_in_u(gbm_annuity, policy):
    for i in range(40):
        low = run_trial(gbm_annuity, 0.5, policy, stream_rng(4, STREAM_PATHS, i))
        high = run_trial(gbm_annuity, 2.0, policy, stream_rng(4, STREAM_PATHS, i))
        if high.ruined:
            assert low.ruined
            assert low.outcome.tau <= high.outcome.tau


def test_trace_matches_risk_equation(gbm_annuity):
    trace = trace_path(gbm_annuity, 2.0, SimPolicy(n_sub=32), stream_rng(2, STREAM_PATHS, 0), n_blocks=10)
    scale = max(1.0, float(np.abs(trace.X_cauchy).max()))
    np.testing.assert_allclose(trace.X_recursive, trace.X_cauchy, rtol=1e-9, atol=1e-9 * scale)
    assert trace.claim_times.size == 10
    assert np.all(np.diff(trace.times) >= 0.0)


def test_trace_mixed_jumps(mixed_jumps):
    trace = trace_path(mixed_jumps, 1.0, SimPolicy(n_sub=16), stream_rng(2, STREAM_PATHS, 1), n_blocks=10)
    scale = max(1.0, float(np.abs(trace.X_cauchy).max()))
    np.testing.assert_allclose(trace.X_recursive, trace.X_cauchy, rtol=1e-9, atol=1e-9 * scale)


def test_gamma_first_block_uses_residual_law():
    law = GammaInterarrival(2.0, 1.0)
    model = make_model(0.2, 0.2, -1.0, ExponentialClaim(1.0), law, r=1.0)
    first = np.array(
        [simulate_block(model.investment, model.business, True, stream_rng(6, STREAM_PATHS, i), n_sub=1).T for i in range(5000)]
    )
    # media de T − 1 condicionada a T > 1 para Gamma(2, 1): 3/2
    assert first.mean() == pytest.approx(model.business.first_law.mean, rel=0.05)
    assert model.business.first_law.mean == pytest.approx(1.5, rel=1e-9)


def test_block_moments_match_closed_form():
    # ψ(1) = −0.1 y T ~ Exp(1): E[M] = M_T(ψ(1)) = 1/1.1, E∫_0^T e^{−V} = 1/1.1, E[ξ] = 0.5
    model = make_model(0.3, 0.2, -1.0, ExponentialClaim(0.5, 1.0))
    psi1 = levy_exponent(model.investment, 1.0)
    assert psi1 == pytest.approx(-0.1)
    n = 20_000
    draws = [
        simulate_block(model.investment, model.business, False, stream_rng(17, STREAM_BLOCKS, i), n_sub=16).qm
        for i in range(n)
    ]
    Q = np.array([d.Q for d in draws])
    M = np.array([d.M for d in draws])
    expected_M = 1.0 / (1.0 - psi1)
    expected_Q = 1.0 / (1.0 - psi1) - 0.5 * expected_M
    assert abs(M.mean() - expected_M) <= 4 * M.std() / math.sqrt(n)
    assert abs(Q.mean() - expected_Q) <= 4 * Q.std() / math.sqrt(n)


def test_yinf_stable_under_finer_truncation():
    model = make_model(0.5, 0.2, -1.0, ExponentialClaim(1.0, 1.0))
    coarse_policy = SimPolicy(n_sub=8, eps_A=1e-6)
    fine_policy = SimPolicy(n_sub=8, eps_A=1e-12)
    coarse = np.array([sample_Yinf(model, coarse_policy, stream_rng(23, STREAM_PATHS, i)).value for i in range(1_000)])
    fine = np.array([sample_Yinf(model, fine_policy, stream_rng(23, STREAM_PATHS, i)).value for i in range(1_000)])
    _, p_value = ks_two_sample(coarse, fine)
    assert p_value > 0.01
    qs = [0.1, 0.5, 0.9]
    assert np.quantile(fine, qs) == pytest.approx(np.quantile(coarse, qs), abs=1e-3)


def test_exponential_first_block_is_memoryless():
    model = make_model(0.2, 0.2, -1.0, ExponentialClaim(1.0), ExponentialInterarrival(1.0), r=3.0)
    business = model.business
    assert business.first_law == business.interarrival
    first = business.first_law.sample(stream_rng(29, STREAM_BLOCKS, 0), 100_000)
    later = business.interarrival.sample(stream_rng(29, STREAM_BLOCKS, 1), 100_000)
    _, p_value = ks_two_sample(first, later)
    assert p_value > 0.01


def test_block_survives_exponent_overflow():
    # V_t = −710t: e^{−V_T} no cabe en un double
    model = make_model(-710.0, 0.0, -1.0, PointClaim(1.0), DeterministicInterarrival(1.0))
    qm = simulate_block(model.investment, model.business, False, np.random.default_rng(0), n_sub=16).qm
    assert qm.M == math.inf
    assert qm.Q == -math.inf


def test_nonlife_ruin_after_exponent_overflow():
    model = make_model(-710.0, 0.0, 1.0, PointClaim(-1.0), DeterministicInterarrival(1.0))
    outcome = run_trial(model, 1.0, SimPolicy(n_sub=16), np.random.default_rng(0)).outcome
    assert isinstance(outcome, Ruined)
    assert outcome.crossing == "jump"
    assert outcome.x_before == pytest.approx(1.0 / 710.0, rel=1e-6)
    assert outcome.x_at_tau == pytest.approx(1.0 / 710.0 - 1.0, rel=1e-6)


def test_discount_underflow_with_margin():
    # V_t = 800t: A = e^{−800} se anula tras el primer siniestro
    model = make_model(800.0, 0.0, -1.0, PointClaim(1.0), DeterministicInterarrival(1.0))
    survived = run_trial(model, 0.0013, SimPolicy(n_sub=16), np.random.default_rng(0))
    assert isinstance(survived.outcome, Survived)
    assert survived.outcome.a_final == 0.0
    kept = run_trial(model, 0.0013, SimPolicy(n_sub=16, u_margin=0.001, n_max_claims=5), np.random.default_rng(0))
    assert kept.censored
    assert kept.n_claims == 5
    assert math.isfinite(kept.sup_y)
