import json
from fractions import Fraction

import pytest

from freechaos.cli import main

POISSON_2 = "# projection onto span(e1, e2)\n2 2\n1 1 1 0\n2 2 1 0\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def tsv_tables(text):
    tables = {}
    for chunk in text.strip().split("\n\n"):
        lines = chunk.split("\n")
        name = lines[0][3:]
        cols = lines[1].split("\t")
        tables[name] = [dict(zip(cols, ln.split("\t"))) for ln in lines[2:]]
    return tables


@pytest.fixture
def poisson_file(tmp_path):
    path = tmp_path / "p2.txt"
    path.write_text(POISSON_2)
    return str(path)


def test_counts(capsys):
    code, out, _ = run(capsys, "counts", "--max-m", "6")
    assert code == 0
    rows = tsv_tables(out)["counts"]
    row4 = next(r for r in rows if r["m"] == "4")
    assert (row4["catalan"], row4["riordan"]) == ("14", "3")
    assert (row4["R_m1"], row4["R_m2"]) == ("1", "2")


def test_moments_exact(capsys):
    code, out, _ = run(capsys, "moments", "cpoisson", "7/3", "--mode", "exact",
                       "--method", "combinatorial", "--max-m", "4")
    assert code == 0
    rows = tsv_tables(out)["moments"]
    lam = Fraction(7, 3)
    assert Fraction(rows[3]["combinatorial"]) == lam + 2 * lam ** 2


def test_moments_quadrature_check(capsys):
    code, out, _ = run(capsys, "moments", "semicircle", "2", "--max-m", "6")
    assert code == 0
    rows = tsv_tables(out)["moments"]
    assert float(rows[5]["quadrature"]) == pytest.approx(40, abs=1e-8)


def test_failed_check_exit_one(capsys):
    code, _, err = run(capsys, "moments", "cpoisson", "1/2", "--tol", "1e-300")
    assert code == 1 and "failures" in err


def test_chaos_poisson(capsys, poisson_file):
    code, out, _ = run(capsys, "chaos", poisson_file, "--mode", "exact",
                       "--report-sequences", "--oracle")
    assert code == 0
    tables = tsv_tables(out)
    assert [r["moment"] for r in tables["moments"]] == ["2", "2", "10"]
    summary = {r["quantity"]: r["value"] for r in tables["summary"]}
    assert summary["fourth_moment_statistic"] == "6"
    assert summary["defect_total"] == "0"
    assert "sequences" in tables


def test_chaos_zero_kernel(capsys, tmp_path):
    path = tmp_path / "zero.txt"
    path.write_text("4 2\n")
    code, out, _ = run(capsys, "chaos", str(path))
    assert code == 0
    assert all(float(r["moment"]) == 0 for r in tsv_tables(out)["moments"])


def test_json_and_tsv_agree(capsys, poisson_file):
    _, tsv, _ = run(capsys, "chaos", poisson_file, "--m-max", "5")
    _, js, _ = run(capsys, "chaos", poisson_file, "--m-max", "5",
                   "--format", "json")
    doc = json.loads(js)
    for name, rows in tsv_tables(tsv).items():
        cols = doc["tables"][name]["columns"]
        for trow, jrow in zip(rows, doc["tables"][name]["rows"]):
            for c, v in zip(cols, jrow):
                if isinstance(v, (int, float)):
                    assert float(trow[c]) == v


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "poisson", "2", "2", "--n", "1", "2")
    assert code == 0
    rows = tsv_tables(out)["scan"]
    assert all(float(r["gap_4"]) == 0 for r in rows)
    code, out, _ = run(capsys, "scan", "semicircle4", "1", "--n", "4", "16")
    assert code == 0
    trend = {r["column"]: r["trend"] for r in tsv_tables(out)["trend"]}
    assert trend["defect_total"] == "decreasing"


def test_oracle(capsys, poisson_file, tmp_path):
    code, out, _ = run(capsys, "oracle", poisson_file, "--mode", "exact")
    assert code == 0
    rows = tsv_tables(out)["oracle"]
    assert rows[3]["oracle"] == "10"
    unit = tmp_path / "unit.txt"
    unit.write_text("1 1\n1 1 0\n")
    code, out, _ = run(capsys, "oracle", str(unit), "--m-max", "6")
    assert code == 0
    assert float(tsv_tables(out)["oracle"][5]["oracle"]) == 5


@pytest.mark.parametrize("text", ["2 2\n1 3 1 0\n", "2 2\n1 1 1 0\n1 1 1 0\n",
                                  "3 2\n1 1 1 1 0\n"])
def test_bad_kernel_exit_two(capsys, tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    code, _, err = run(capsys, "chaos", str(path))
    assert code == 2 and err.startswith("error:")


def test_missing_file_and_bad_args(capsys, tmp_path):
    code, _, _ = run(capsys, "chaos", str(tmp_path / "missing.txt"))
    assert code == 2
    assert run(capsys, "counts", "--tol", "-1")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["counts", "4"])
    assert info.value.code == 2


def test_out_and_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FREECHAOS_OUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "counts", "--out", "c.tsv")
    assert code == 0 and out == ""
    assert (tmp_path / "c.tsv").read_text().startswith("## counts")
