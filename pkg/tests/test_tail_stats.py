import numpy as np
import pytest

from ruinlab.errors import DegenerateInputError
from ruinlab.tail_stats import (
    default_hill_k,
    flatness,
    hill_estimator,
    hill_sensitivity,
    ks_two_sample,
    loglog_slope,
    tail_report,
)

U = [1.0, 2.0, 5.0, 10.0, 20.0]


def test_exact_power_law_slope():
    slope, se = loglog_slope(U, [u**-2.0 for u in U])
    assert slope == pytest.approx(-2.0, abs=1e-12)
    assert se == pytest.approx(0.0, abs=1e-10)


def test_slope_ignores_constant_factor():
    slope, _ = loglog_slope(U, [5.0 / u for u in U])
    assert slope == pytest.approx(-1.0, abs=1e-12)


def test_zero_probabilities_are_rejected():
    with pytest.raises(DegenerateInputError) as err:
        loglog_slope(U, [0.1, 0.05, 0.0, 0.0, 0.0])
    assert err.value.detail["u_zero"] == [5.0, 10.0, 20.0]


def test_grid_must_increase():
    with pytest.raises(DegenerateInputError):
        loglog_slope([1.0, 1.0, 2.0], [0.1, 0.1, 0.05])
    with pytest.raises(DegenerateInputError):
        loglog_slope([1.0, 2.0], [0.1, 0.05])


def test_flatness():
    assert flatness(U, [3.0 / u for u in U], beta=1.0) == pytest.approx(1.0)
    assert flatness([1.0, 2.0, 4.0], [1.0, 1.0, 0.25], beta=1.0) == pytest.approx(2.0)


def test_flatness_scale_invariant():
    values = [0.4, 0.15, 0.07, 0.03, 0.02]
    assert flatness(U, values, 1.3) == pytest.approx(flatness(U, [10 * v for v in values], 1.3))


def test_hill_on_pareto():
    rng = np.random.default_rng(12)
    samples = rng.pareto(2.0, 100_000) + 1.0
    assert 1.8 <= hill_estimator(samples, 1000) <= 2.2


def test_hill_degenerate_inputs():
    with pytest.raises(DegenerateInputError):
        hill_estimator(np.ones(100), 10)
    with pytest.raises(DegenerateInputError):
        hill_estimator(np.arange(1.0, 11.0), 10)
    with pytest.raises(DegenerateInputError):
        hill_estimator(np.arange(1.0, 11.0), 1)


def test_hill_uses_positive_part_only():
    rng = np.random.default_rng(3)
    positive = rng.pareto(2.0, 5000) + 1.0
    mixed = np.concatenate([positive, -positive])
    assert hill_estimator(mixed, 200) == hill_estimator(positive, 200)


def test_hill_sensitivity_keys():
    rng = np.random.default_rng(4)
    out = hill_sensitivity(rng.pareto(2.0, 10_000) + 1.0)
    assert set(out) == {"n^0.5", "n^0.6", "n^0.7"}
    assert default_hill_k(10_000) == 251


def test_ks_two_sample():
    a = np.linspace(0.0, 1.0, 50)
    assert ks_two_sample(a, a) == (0.0, 1.0)
    stat, p = ks_two_sample(a, a + 10.0)
    assert stat == 1.0
    assert p < 1e-6
    b = np.linspace(0.3, 2.0, 70)
    assert ks_two_sample(a, b)[0] == pytest.approx(ks_two_sample(b, a)[0])
    with pytest.raises(DegenerateInputError):
        ks_two_sample([], a)


def test_tail_report_verdict():
    low = [0.5 / u for u in U]
    high = [0.55 / u for u in U]
    report = tail_report(U, low, high, beta=1.0)
    assert report.passed
    assert report.low.slope == pytest.approx(-1.0)
    assert report.low.slope_stderr >= 0.0
    assert report.hill is None
    payload = report.to_dict()
    assert payload["passed"] is True
    assert payload["low"]["flatness_ok"] is True


def test_tail_report_fails_on_wrong_exponent():
    report = tail_report(U, [0.5 / u**2 for u in U], [0.5 / u**2 for u in U], beta=1.0)
    assert not report.passed
    assert not report.low.slope_ok
    assert not report.low.flatness_ok


def test_tail_report_with_samples():
    rng = np.random.default_rng(5)
    samples = rng.pareto(1.0, 20_000) + 1.0
    report = tail_report(U, [0.5 / u for u in U], [0.5 / u for u in U], beta=1.0, samples=samples)
    assert report.hill_k == default_hill_k(20_000)
    assert report.hill == pytest.approx(1.0, abs=0.2)


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_hill_default_k_on_exact_pareto(alpha):
    rng = np.random.default_rng(int(10 * alpha))
    samples = rng.pareto(alpha, 100_000) + 1.0
    k = default_hill_k(samples.size)
    assert k in (999, 1000)
    assert hill_estimator(samples, k) == pytest.approx(alpha, abs=0.2)


@pytest.mark.parametrize("transform", [np.exp, lambda x: x**3 + x, np.arctan])
def test_ks_invariant_under_increasing_transform(transform):
    rng = np.random.default_rng(8)
    a = rng.standard_normal(3000)
    b = 0.1 + 1.1 * rng.standard_normal(2500)
    assert ks_two_sample(transform(a), transform(b)) == ks_two_sample(a, b)


def test_ks_rejection_rate_under_null():
    rng = np.random.default_rng(2024)
    rejected = sum(ks_two_sample(rng.standard_normal(2000), rng.standard_normal(2000))[1] < 0.05 for _ in range(400))
    # 20 esperados; ±3 desviaciones binomiales
    assert 7 <= rejected <= 33


@pytest.mark.slow
def test_ks_calibration_full_scale():
    rng = np.random.default_rng(20240531)
    accepted = sum(
        ks_two_sample(rng.exponential(1.0, 100_000), rng.exponential(1.0, 100_000))[1] > 0.01 for _ in range(100)
    )
    assert accepted >= 98
