import csv
import io
import json
import math

import pytest

from bucketing.cli import dispatch
from bucketing.probmodel import make_matrix


def run_cli(argv, capsys):
    code = dispatch(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def replay_argv(header_line):
    """Rebuild the argv of a run from its echoed config header."""
    cfg = json.loads(header_line.removeprefix("# config "))
    argv = [cfg.pop("command")]
    cfg.pop("threads", None)
    for key, value in sorted(cfg.items()):
        if value is None:
            continue
        argv.extend([f"--{key.replace('_', '-')}", str(value)])
    return argv


class TestInfo:
    def test_mutual_information_reference(self, capsys):
        code, out, _ = run_cli(["info", "--p", "0.9", "--mu", "inf"], capsys)
        assert code == 0
        assert "0.3680642" in out

    def test_matrix_file_input(self, tmp_path, capsys):
        p = make_matrix([[0.5, 0.1], [0.1, 0.3]])
        path = tmp_path / "m.json"
        path.write_text(p.to_json())
        code, out, _ = run_cli(
            ["info", "--matrix", str(path), "--mu", "1"], capsys
        )
        assert code == 0
        lift = 0.3 / (0.4 * 0.4)
        value = float(next(l for l in out.splitlines()
                           if not l.startswith("#")))
        assert value == pytest.approx(math.log(lift), abs=1e-6)

    def test_missing_matrix_is_usage_error(self, capsys):
        code, _, _ = run_cli(["info", "--mu", "1"], capsys)
        assert code == 2

    def test_invalid_p_is_runtime_error(self, capsys):
        code, _, err = run_cli(["info", "--p", "1.5", "--mu", "1"], capsys)
        assert code == 1
        assert "error" in err


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        assert run_cli(["frobnicate"], capsys)[0] == 2

    def test_unknown_flag(self, capsys):
        assert run_cli(["info", "--p", "0.9", "--wat", "1"], capsys)[0] == 2

    def test_missing_file(self, capsys):
        code, _, err = run_cli(
            ["info", "--matrix", "/nonexistent.json", "--mu", "1"], capsys
        )
        assert code == 1


class TestSubcommands:
    def test_subconj_output(self, capsys):
        code, out, _ = run_cli(
            ["subconj", "--p", "0.9", "--lambda0", "0.5", "--lambda1", "0.5"],
            capsys,
        )
        assert code == 0
        assert "subconjugate true" in out

    def test_subconj_refutation(self, capsys):
        code, out, _ = run_cli(
            ["subconj", "--p", "0.9", "--lambda0", "1", "--lambda1", "1"],
            capsys,
        )
        assert code == 0
        assert "subconjugate false" in out
        assert "witness" in out

    def test_conjecture_clean(self, capsys):
        code, out, _ = run_cli(
            ["conjecture", "--p-grid", "0.6:0.8:0.1", "--resolution", "12"],
            capsys,
        )
        assert code == 0
        assert "violations: 0" in out

    def test_baseline_lists_exponents(self, capsys):
        code, out, _ = run_cli(["baseline", "--p", "0.8"], capsys)
        assert code == 0
        assert "classical 1.321928" in out
        assert "improved 1.25" in out

    def test_sweep_csv_shape(self, capsys):
        code, out, _ = run_cli(
            ["sweep", "--p", "0.8", "--mu-grid", "0:1:0.5,inf",
             "--starts", "4"],
            capsys,
        )
        assert code == 0
        body = [l for l in out.splitlines() if not l.startswith("#")]
        assert body[0] == "lambda0,lambda1,mu,value,method"
        assert len(body) == 1 + 4  # mu in {0, 0.5, 1, inf}

    def test_bad_grid_is_error(self, capsys):
        code, _, err = run_cli(
            ["sweep", "--p", "0.8", "--mu-grid", "1:0:-1"], capsys
        )
        assert code == 1


class TestSimulate:
    ARGS = [
        "simulate", "--code", "shell", "--d", "12", "--d0", "7",
        "--p", "0.9", "--eps", "0.1", "--trials", "400", "--seed", "42",
    ]

    def test_csv_contents(self, tmp_path, capsys):
        out_path = tmp_path / "run.csv"
        code, _, _ = run_cli(self.ARGS + ["--out", str(out_path)], capsys)
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0].startswith("# config ")
        rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
        assert len(rows) == 1
        assert rows[0]["kind"] == "shell"
        assert int(rows[0]["T"]) == 13
        assert float(rows[0]["empirical_S"]) >= 0.8

    def test_byte_identical_repeat(self, tmp_path, capsys):
        out_path = tmp_path / "run.csv"
        run_cli(self.ARGS + ["--out", str(out_path)], capsys)
        first = out_path.read_bytes()
        run_cli(self.ARGS + ["--out", str(out_path)], capsys)
        assert out_path.read_bytes() == first

    def test_header_replay_reproduces_output(self, tmp_path, capsys):
        out_path = tmp_path / "run.csv"
        run_cli(self.ARGS + ["--out", str(out_path)], capsys)
        first = out_path.read_bytes()
        header = out_path.read_text().splitlines()[0]
        code, _, _ = run_cli(replay_argv(header), capsys)
        assert code == 0
        assert out_path.read_bytes() == first

    def test_classical_requires_k(self, capsys):
        code, _, _ = run_cli(
            ["simulate", "--code", "classical", "--d", "8", "--p", "0.9"],
            capsys,
        )
        assert code == 2
