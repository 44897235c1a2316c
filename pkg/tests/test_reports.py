import json
import math

import numpy as np

from ruinlab.reports import json_safe, read_csv, render_summary, write_csv, write_json, write_summary


def test_csv_uses_repr_and_blank_for_missing(tmp_path):
    path = write_csv(str(tmp_path / "t.csv"), ("a", "b", "c", "d"), [{"a": 0.1, "b": None, "c": True, "d": 3}], timestamp=False)
    with open(path, "rb") as fh:
        assert fh.read() == b"a,b,c,d\n0.1,,true,3\n"


def test_csv_round_trip_skips_timestamp(tmp_path):
    path = write_csv(str(tmp_path / "t.csv"), ("u", "p"), [{"u": 1.0, "p": 1 / 3}], timestamp=True)
    rows = read_csv(path)
    assert rows == [{"u": "1.0", "p": repr(1 / 3)}]
    assert float(rows[0]["p"]) == 1 / 3


def test_json_safe():
    payload = {"nan": math.nan, "inf": math.inf, "arr": np.array([1.0, 2.0]), "nested": [(1, np.float64(0.5))]}
    assert json_safe(payload) == {"nan": None, "inf": None, "arr": [1.0, 2.0], "nested": [[1, 0.5]]}


def test_write_json(tmp_path):
    path = write_json(str(tmp_path / "x.json"), {"b": math.nan, "a": 1}, timestamp=False)
    text = open(path, encoding="utf-8").read()
    assert json.loads(text) == {"a": 1, "b": None}
    assert text.index('"a"') < text.index('"b"')
    stamped = json.loads(open(write_json(str(tmp_path / "y.json"), {"a": 1}), encoding="utf-8").read())
    assert "generated_at" in stamped


def test_render_summary():
    text = render_summary(
        {
            "command": "ruin",
            "scenario": None,
            "status": "ok",
            "headline": "Ψ(1) ∈ [0.4, 0.41]",
            "generated_at": None,
            "facts": [("seed", 7), ("r", 0.0)],
            "tables": [{"title": "Probabilidad de ruina", "columns": ["u", "p_low"], "rows": [{"u": 1.0, "p_low": 0.4}]}],
            "notes": ["nota"],
        }
    )
    assert text.startswith("# ruinlab ruin\n")
    assert "| seed | 7 |" in text
    assert "| u | p_low |\n|---|---|\n| 1.0 | 0.4 |" in text
    assert "- nota" in text
    assert "Generado" not in text


def test_write_summary_defaults(tmp_path):
    path = write_summary(str(tmp_path), {"command": "beta", "scenario": "x", "status": "ok", "headline": "β = 1"})
    text = open(path, encoding="utf-8").read()
    assert text.startswith("# ruinlab beta · x")
    assert "_Generado: " in text
