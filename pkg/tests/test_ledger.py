import pytest

from ruinlab.ledger import init_ledger, list_runs, record_run
from ruinlab.models import Corrida, get_db


@pytest.fixture
def engine(tmp_path):
    engine = init_ledger(str(tmp_path))
    yield engine
    engine.dispose()


def test_record_and_list(engine):
    rows = [
        {"u": 1.0, "r": 0.0, "n": 100, "k_ruin": 40, "k_cens": 1, "p_low": 0.4, "p_high": 0.41},
        {"u": 2.0, "r": 0.0, "n": 100, "k_ruin": 20, "k_cens": 0, "p_low": 0.2, "p_high": 0.2},
    ]
    first = record_run(engine, "ruin", seed=7, threads=2, status="ok", exit_code=0, summary={"headline": "x"}, estimates=rows)
    second = record_run(engine, "beta", seed=7, threads=1, status="inconclusive", exit_code=3, scenario="annuity-gbm-beta1")
    assert first is not None and second == first + 1

    runs = list_runs(engine)
    assert [r["command"] for r in runs] == ["ruin", "beta"]
    assert runs[0]["n_estimates"] == 2
    assert runs[1]["scenario"] == "annuity-gbm-beta1"
    assert list_runs(engine, command="beta")[0]["exit_code"] == 3


def test_summary_and_timestamp_stored(engine):
    run_id = record_run(engine, "yinf", seed=1, threads=1, status="ok", exit_code=0, summary={"n": 10, "Ḡ*": 0.9})
    with get_db(engine) as db:
        corrida = db.get(Corrida, run_id)
        assert corrida.summary == {"n": 10, "Ḡ*": 0.9}
        assert corrida.created_at is not None
        assert corrida.estimaciones == []


def test_bad_row_is_rolled_back(engine):
    assert record_run(engine, "ruin", seed=1, threads=1, status="ok", exit_code=0, estimates=[{"u": 1.0}]) is None
    assert list_runs(engine) == []


def test_unusable_url_returns_none(tmp_path):
    assert init_ledger(str(tmp_path), url="nosuchdialect://ledger") is None
