import csv
import io
import json

import pytest

from wallcross import cli
from wallcross.engine import ISS, InvariantTable
from wallcross.lambda_ring import LambdaElement


@pytest.fixture(autouse=True)
def log_to_tmp(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "get_log_file", lambda: tmp_path / "wallcross.log")


def rows_from(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def kronecker_table(tmp_path, ell):
    table = InvariantTable(
        ISS, {(1, 0): 1 / (ell - 1), (0, 1): 1 / (ell - 1), (1, 1): (ell + 1) / (ell - 1)}
    )
    path = tmp_path / "iss.json"
    path.write_text(json.dumps(table.to_json()))
    return path


class TestCoeffs:
    def test_s(self, capsys):
        code = cli.main(
            ["coeffs", "s", "--parts", "[1,0];[0,1]", "--from", "trivial", "--to", "slope c=1,0"]
        )
        assert code == cli.EXIT_OK
        (row,) = rows_from(capsys)
        assert row["coeff"] == "s"
        assert row["value"] == "-1"

    def test_u(self, capsys):
        argv = ["coeffs", "u", "--parts", "[0,1];[1,0]", "--from", "trivial", "--to", "slope c=1,0"]
        assert cli.main(argv) == cli.EXIT_OK
        assert rows_from(capsys)[0]["value"] == "1/2"

    def test_v(self, capsys):
        argv = [
            "coeffs", "v", "--parts", "[1,0];[0,1]", "--from", "slope c=1,0",
            "--to", "slope c=0,1", "--tree", "1>2",
        ]
        assert cli.main(argv) == cli.EXIT_OK
        assert rows_from(capsys)[0]["value"] == "1/4"

    def test_t_needs_fibers(self, capsys):
        argv = ["coeffs", "t", "--parts", "[1,0];[0,1]", "--from", "trivial", "--to", "slope c=1,0"]
        assert cli.main(argv) == cli.EXIT_INPUT
        assert "fibers" in capsys.readouterr().err

    def test_bad_stability(self, capsys):
        argv = ["coeffs", "s", "--parts", "[1,0]", "--from", "banana", "--to", "trivial"]
        assert cli.main(argv) == cli.EXIT_INPUT

    def test_csv(self, capsys):
        argv = [
            "--format", "csv",
            "coeffs", "s", "--parts", "[1,0];[0,1]", "--from", "slope c=1,0", "--to", "slope c=0,1",
        ]
        assert cli.main(argv) == cli.EXIT_OK
        (row,) = csv.DictReader(io.StringIO(capsys.readouterr().out))
        assert row["value"] == "1"
        assert json.loads(row["parts"]) == [[1, 0], [0, 1]]


class TestQuiver:
    def test_eval_and_oracle(self, capsys):
        argv = [
            "quiver", "--preset", "kronecker", "--classes", "[1,1]",
            "--stability", "slope c=1,0 r=1,1", "--eval-at", "2", "--eval-at", "3", "--oracle",
        ]
        assert cli.main(argv) == cli.EXIT_OK
        (row,) = rows_from(capsys)
        assert row["eval"] == {"2": "3", "3": "2"}
        assert all(entry["match"] for entry in row["oracle"].values())
        assert row["oracle"]["2"]["count"] == "3"
        assert row["omega"] == "2"

    def test_quiver_file(self, capsys, tmp_path):
        path = tmp_path / "kronecker.json"
        path.write_text(
            json.dumps(
                {
                    "vertices": ["1", "2"],
                    "arrows": [{"from": "1", "to": "2"}, {"from": "1", "to": "2"}],
                }
            )
        )
        argv = [
            "quiver", "--quiver", str(path), "--classes", "[1,1]",
            "--stability", "slope c=1,0 r=1,1", "--eval-at", "2",
        ]
        assert cli.main(argv) == cli.EXIT_OK
        (row,) = rows_from(capsys)
        assert row["eval"] == {"2": "3"}
        assert row["quiver"]["arrows"][0] == {"from": "1", "to": "2"}

    def test_one_vertex_omega(self, capsys):
        assert cli.main(["quiver", "--preset", "one-vertex", "--classes", "[1];[2]"]) == cli.EXIT_OK
        rows = {tuple(r["class"]): r for r in rows_from(capsys)}
        assert rows[(2,)]["omega"] == "-1/4"
        assert rows[(1,)]["omega"] == "1"

    def test_max_class(self, capsys):
        argv = ["quiver", "--preset", "a2", "--max-class", "[1,1]", "--stability", "slope c=1,0"]
        assert cli.main(argv) == cli.EXIT_OK
        assert len(rows_from(capsys)) == 3

    def test_needs_classes(self, capsys):
        assert cli.main(["quiver", "--preset", "kronecker"]) == cli.EXIT_INPUT

    def test_oracle_guard(self, capsys):
        argv = [
            "quiver", "--preset", "kronecker", "--classes", "[3,2]",
            "--stability", "slope c=1,0", "--oracle",
        ]
        assert cli.main(argv) == cli.EXIT_INPUT


class TestCurve:
    def test_poincare(self, capsys):
        argv = ["curve", "--genus", "2", "--rank", "2", "--degree", "1", "--floor", "-8", "--poincare"]
        assert cli.main(argv) == cli.EXIT_OK
        (row,) = rows_from(capsys)
        assert row["betti"] == [1, 0, 1, 4, 1, 0, 1]

    def test_not_coprime(self, capsys):
        argv = ["curve", "--genus", "2", "--rank", "2", "--degree", "2", "--floor", "-8", "--poincare"]
        assert cli.main(argv) == cli.EXIT_INPUT
        assert "Error" in capsys.readouterr().err

    def test_purity(self, capsys):
        argv = ["curve", "--genus", "0", "--rank", "1", "--stability", "purity", "--floor", "-8"]
        assert cli.main(argv) == cli.EXIT_OK
        assert rows_from(capsys)[0]["stability"] == "purity"


class TestTables:
    def test_j_from_iss(self, capsys, ell, kronecker_table):
        argv = [
            "tables", "j_from_iss", "--table", str(kronecker_table),
            "--chi", "1,-2;0,1", "--from", "slope c=1,0", "--classes", "[1,1]",
        ]
        assert cli.main(argv) == cli.EXIT_OK
        (row,) = rows_from(capsys)
        assert LambdaElement.from_json(row["value"]) == ell + 1

    def test_wallcross_iss(self, capsys, kronecker_table):
        argv = [
            "tables", "wallcross_iss", "--table", str(kronecker_table), "--chi", "1,-2;0,1",
            "--from", "slope c=1,0", "--to", "slope c=0,1", "--classes", "[1,1]",
        ]
        assert cli.main(argv) == cli.EXIT_OK
        assert LambdaElement.from_json(rows_from(capsys)[0]["value"]).is_zero()

    def test_missing_entry(self, capsys, tmp_path, ell):
        path = tmp_path / "partial.json"
        path.write_text(json.dumps(InvariantTable(ISS, {(1, 1): ell + 1}).to_json()))
        argv = [
            "tables", "j_from_iss", "--table", str(path),
            "--chi", "1,-2;0,1", "--from", "trivial",
        ]
        assert cli.main(argv) == cli.EXIT_INPUT

    def test_needs_target(self, capsys, kronecker_table):
        argv = [
            "tables", "wallcross_j", "--table", str(kronecker_table),
            "--chi", "1,-2;0,1", "--from", "slope c=1,0",
        ]
        assert cli.main(argv) == cli.EXIT_INPUT

    def test_missing_file(self, capsys, tmp_path):
        argv = [
            "tables", "j_from_iss", "--table", str(tmp_path / "nope.json"),
            "--chi", "1", "--from", "trivial",
        ]
        assert cli.main(argv) == cli.EXIT_INPUT


class TestCheck:
    def test_coeffs_suite(self, capsys):
        assert cli.main(["check", "--suite", "coeffs", "--max-n", "2", "--seed", "3"]) == cli.EXIT_OK
        body, summary = capsys.readouterr().out.rstrip("\n").rsplit("\n", 1)
        rows = json.loads(body)
        assert rows
        assert all(r["passed"] for r in rows)
        assert summary == f"{len(rows)} checks, 0 failed"


class TestOutput:
    def test_writes_file(self, capsys, tmp_path):
        target = tmp_path / "s.json"
        argv = [
            "--output", str(target),
            "coeffs", "s", "--parts", "[1,0];[0,1]", "--from", "trivial", "--to", "slope c=1,0",
        ]
        assert cli.main(argv) == cli.EXIT_OK
        assert "Wrote 1 rows" in capsys.readouterr().out
        assert json.loads(target.read_text())[0]["value"] == "-1"

    def test_relative_name_goes_to_output_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "get_output_dir", lambda: tmp_path / "out")
        argv = [
            "--output", "s.json",
            "coeffs", "s", "--parts", "[1,0]", "--from", "trivial", "--to", "trivial",
        ]
        assert cli.main(argv) == cli.EXIT_OK
        assert (tmp_path / "out" / "s.json").exists()
