import csv
import io
import json

import jsonschema
import pytest

import motzkin
from errors import TheoremViolationError
from motzkin import CSV_COLUMNS, JSON_SCHEMAS, run

pytestmark = pytest.mark.usefixtures("restore_logging")

EVERY_COMMAND = [
    ["table", "--p", "5"],
    ["eval", "--p", "5", "--n", "3", "4", "125"],
    ["symmetry", "--p", "7"],
    ["density", "--p", "5"],
    ["count", "--p", "5", "--digits", "2"],
    ["values", "--p", "5", "--digits", "1"],
    ["scan", "pm2", "--max", "30"],
    ["oracle", "--n", "5", "--p", "5"],
]


@pytest.fixture(autouse=True)
def no_log_file(monkeypatch):
    monkeypatch.delenv("MOTZKIN_LOG_DIR", raising=False)


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def as_json(*argv):
    code, out, _ = invoke(*argv, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, JSON_SCHEMAS[doc["command"]])
    return doc


def as_csv(*argv):
    code, out, _ = invoke(*argv, "--format", "csv")
    assert code == 0
    return list(csv.DictReader(io.StringIO(out)))


def test_table_text():
    code, out, _ = invoke("table", "--p", "5")
    assert code == 0
    assert "values: 1,1,3,2,4" in out
    assert "forced_tail: [1, 1]" in out


def test_motzkin_table():
    doc = as_json("table", "--p", "5", "--seq", "motzkin")
    assert [r["value"] for r in doc["rows"]] == [1, 1, 2, 4, 4]
    assert doc["summary"]["method"] == "from_t"


def test_custom_table():
    doc = as_json("table", "--p", "5", "--seq", "custom", "--alpha", "3,-1")
    assert doc["summary"]["values"] == "2,0,2,2,1"
    assert doc["params"]["alpha"] == [3, -1]


def test_eval_closed_form():
    doc = as_json("eval", "--p", "5", "--n", "9", "13", "7")
    assert [(r["value"], r["method"]) for r in doc["rows"]] == [(0, "closed_form"), (0, "closed_form"),
                                                                (2, "closed_form")]


def test_eval_degenerate_prime_falls_back():
    doc = as_json("eval", "--p", "7", "--n", "5")
    assert doc["rows"] == [{"n": 5, "value": 0, "method": "shift_combo"}]


def test_eval_trinomial():
    doc = as_json("eval", "--p", "5", "--n", "26", "--seq", "trinomial")
    assert doc["rows"][0]["value"] == 1
    assert doc["rows"][0]["method"] == "digit_product"


def test_density_json():
    doc = as_json("density", "--p", "5")
    row = doc["rows"][0]
    assert (row["d0"], row["even"], row["odd"]) == ("1/10", "1/12", "1/60")
    assert doc["summary"]["d0"].startswith("1/10 ")
    assert doc["schema_version"] == 1


def test_density_p2_enumerates():
    doc = as_json("density", "--p", "2", "--seq", "trinomial", "--digits", "6")
    assert doc["rows"][0]["method"] == "enumeration_6_digits"
    assert doc["rows"][0]["outside_paper_formulas"] is True


def test_count_csv():
    rows = as_csv("count", "--p", "5", "--digits", "2")
    assert list(rows[0]) == CSV_COLUMNS["count"]
    assert rows[2] == {"N": "2", "total": "25", "exact": "3", "enum": "3", "agree": "True", "fraction": "0.12"}


def test_count_over_budget_leaves_enum_empty():
    rows = as_csv("count", "--p", "5", "--digits", "3", "--budget", "30")
    assert rows[3]["exact"] == "12"
    assert rows[3]["enum"] == ""
    assert rows[3]["agree"] == ""


def test_count_p2_enumerates_only():
    rows = as_csv("count", "--p", "2", "--digits", "4")
    assert [r["enum"] for r in rows] == ["0", "0", "2", "2", "6"]
    assert all(r["exact"] == "" and r["agree"] == "" for r in rows)
    assert rows[4]["fraction"] == "0.375"


def test_values_text():
    code, out, _ = invoke("values", "--p", "5")
    assert code == 0
    assert "generation: Generates" in out
    assert "table_status: Generates" in out
    assert "9/40" in out


def test_values_degenerate_prime():
    code, out, _ = invoke("values", "--p", "7")
    assert code == 0
    assert "generation: Generates" in out
    assert "table_status: DegenerateZero" in out


def test_values_needs_motzkin():
    code, _, err = invoke("values", "--p", "5", "--seq", "trinomial")
    assert code == 2
    assert err.startswith("usage error:")


def test_symmetry_p2_skips():
    doc = as_json("symmetry", "--p", "2")
    skipped = [r["theorem"] for r in doc["rows"] if r["holds"] is None]
    assert skipped == ["t_symmetry", "t_symmetry_inverted", "t_pm1_square", "m_symmetry"]
    assert doc["rows"][-1]["theorem"] == "m_pm2_criterion"


def test_symmetry_other_parameters():
    doc = as_json("symmetry", "--p", "11", "--a", "2", "--b", "3")
    assert all(r["holds"] for r in doc["rows"])
    assert "m_pm2_criterion" not in [r["theorem"] for r in doc["rows"]]


def test_scan_csv():
    code, out, _ = invoke("scan", "a113305", "--max", "20", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,test,verdict,payload"
    assert lines[1].startswith("3,a113305,non_member,")


def test_scan_json_summary():
    doc = as_json("scan", "pm2", "--max", "50")
    assert doc["summary"] == {"primes": 15, "failures": 0}
    assert all(r["verdict"] == "consistent" for r in doc["rows"])
    assert json.loads(doc["rows"][3]["payload"])["divides"] is True


def test_scan_conjecture_counts_verdicts():
    doc = as_json("scan", "conjecture", "--max", "12")
    assert doc["summary"]["DegenerateZero"] == 2


def test_scan_checkpoint(tmp_path):
    path = tmp_path / "scan.jsonl"
    first = as_json("scan", "equality", "--max", "40", "--checkpoint", str(path), "--checkpoint-every", "3")
    assert path.exists()
    assert as_json("scan", "equality", "--max", "40", "--checkpoint", str(path)) == first


def test_oracle():
    doc = as_json("oracle", "--n", "4")
    assert [r["value"] for r in doc["rows"]] == [1, 1, 3, 7, 19]
    assert doc["rows"][0]["mod_p"] is None
    doc = as_json("oracle", "--n", "13", "--seq", "motzkin", "--p", "5")
    assert doc["rows"][13] == {"n": 13, "value": 41835, "mod_p": 0}


@pytest.mark.parametrize("argv, message", [
    (["density", "--p", "5", "--seq", "custom"], "usage error: --seq custom needs --alpha"),
    (["density", "--p", "5", "--alpha", "1,2"], "usage error: --alpha only applies"),
    (["density", "--p", "5", "--seq", "catalan"], "usage error:"),
    (["eval", "--p", "4", "--n", "1"], "error [NotPrimeError]"),
    (["density", "--p", "2", "--seq", "a005717"], "error [OutOfScopeError]"),
    (["count", "--p", "5", "--digits", "-1"], "usage error: --digits"),
    (["oracle", "--n", "3", "--seq", "custom", "--alpha", "1"], "usage error:"),
    (["table", "--p", "5", "--jobs", "0"], "usage error: --jobs"),
    (["eval", "--p", "5", "--n", "3", "-1"], "usage error: --n"),
    (["oracle", "--n", "-2"], "usage error: --n"),
])
def test_refusals_exit_2(argv, message):
    code, out, err = invoke(*argv)
    assert code == 2
    assert out == ""
    assert err.startswith(message)


def test_argparse_errors_exit_2():
    assert invoke("density", "--p", "5", "--bogus")[0] == 2
    assert invoke("scan", "catalan", "--max", "10")[0] == 2


def test_theorem_violation_exits_1(monkeypatch):
    def broken(cfg):
        raise TheoremViolationError("congruence failed")

    monkeypatch.setitem(motzkin.COMMANDS, "density", broken)
    code, _, err = invoke("density", "--p", "5")
    assert code == 1
    assert err.startswith("theorem violation: congruence failed")


@pytest.mark.parametrize("argv", EVERY_COMMAND)
def test_every_command_renders(argv):
    doc = as_json(*argv)
    rows = as_csv(*argv)
    assert len(rows) == len(doc["rows"])
    assert list(rows[0]) == CSV_COLUMNS[doc["command"]]
    assert invoke(*argv)[0] == 0


@pytest.mark.parametrize("argv", EVERY_COMMAND)
def test_output_is_deterministic(argv):
    assert invoke(*argv, "--format", "json")[1] == invoke(*argv, "--format", "json", "--jobs", "2")[1]
