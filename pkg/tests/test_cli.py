import json

import pytest

from conftest import GOLDEN_PLAN, GOLDEN_TRACE
from mazetrace.cli import main
from mazetrace.dataset import Dataset


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_prints_reference_trace_and_plan(capsys):
    code, out, _ = run(capsys, "solve", "--kind", "freespace",
                       "--start", "18,11", "--goal", "15,12",
                       "--size", "30", "--wall-levels", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == GOLDEN_TRACE
    assert lines[1] == GOLDEN_PLAN


def test_solve_seeded_maze(capsys):
    code, out, _ = run(capsys, "solve", "--kind", "wilson", "--seed", "5",
                       "--size", "10")
    assert code == 0
    trace, plan = out.splitlines()
    assert trace.startswith("close ")
    assert plan.startswith("plan ")


def test_generate_emits_parseable_tsv(capsys):
    code, out, _ = run(capsys, "generate", "--kind", "kruskal",
                       "--seed", "3", "--size", "10", "--count", "2")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    for line in lines:
        problem, trace, plan = line.split("\t")
        assert problem.startswith("start ")
        assert len(trace.split()) % 5 == 0
        assert len(plan.split()) % 3 == 0


def test_dataset_split_report_end_to_end(tmp_path, capsys):
    out_dir = tmp_path / "ds"
    code, _, err = run(capsys, "dataset", "--kind", "wilson,freespace",
                       "--count", "30", "--seed", "7", "--size", "10",
                       "--wall-levels", "2", "--out", str(out_dir),
                       "--workers", "1")
    assert code == 0 and "30 records" in err

    code, _, err = run(capsys, "split", "--dataset", str(out_dir),
                       "--holdout-per-kind", "3", "--seed", "1")
    assert code == 0 and "held out 6" in err

    records = Dataset.load(out_dir).records()
    responses = tmp_path / "responses.txt"
    responses.write_text(
        "".join(f"{r.id}\t{r.trace} {r.plan}\n" for r in records))

    code, out, _ = run(capsys, "judge", "--dataset", str(out_dir),
                       "--responses", str(responses), "--limit", "32000")
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()]
    assert len(rows) == 30
    assert all(row[4] == "valid_optimal" for row in rows)

    report_path = tmp_path / "report.json"
    csv_path = tmp_path / "scatter.csv"
    code, _, err = run(capsys, "report", "--dataset", str(out_dir),
                       "--responses", str(responses), "--limit", "32000",
                       "--csv", str(csv_path), "--out", str(report_path))
    assert code == 0
    doc = json.loads(report_path.read_text())
    assert doc["overall"]["valid_rate"] == 1.0
    assert csv_path.read_text().splitlines()[0] == "kind,x,y,verdict,truncated"
    assert len(csv_path.read_text().splitlines()) == 31


def test_dataset_determinism_via_cli(tmp_path, capsys):
    for name, workers in (("a", "1"), ("b", "2")):
        code, _, _ = run(capsys, "dataset", "--kind", "drunkard",
                         "--count", "8", "--seed", "11", "--size", "12",
                         "--out", str(tmp_path / name), "--workers", workers)
        assert code == 0
    ma = (tmp_path / "a" / "manifest.json").read_bytes()
    mb = (tmp_path / "b" / "manifest.json").read_bytes()
    assert ma == mb


def test_vocab_table(capsys, tmp_path):
    code, out, _ = run(capsys, "vocab", "--size", "5", "--max-cost", "25")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 40
    assert lines[0] == "start\t0"
    assert lines[-1] == "c25\t39"
    path = tmp_path / "v.tsv"
    code, _, _ = run(capsys, "vocab", "--size", "5", "--max-cost", "25",
                     "--out", str(path))
    assert code == 0
    assert path.read_text() == out


def test_domain_error_exit_code_1(capsys, tmp_path):
    code, _, err = run(capsys, "solve", "--kind", "freespace",
                       "--start", "5,5", "--goal", "5,5")
    assert code == 1 and "error:" in err
    code, _, err = run(capsys, "report", "--dataset", str(tmp_path / "nope"),
                       "--responses", str(tmp_path / "nope.txt"))
    assert code == 1


def test_usage_errors_exit_code_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["dataset", "--kind", "wilson"])  # missing required flags
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--kind", "freespace", "--bogus-flag"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--kind", "prim"])
    assert exc.value.code == 2


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for sub in ("generate", "solve", "dataset", "split", "judge",
                "report", "vocab"):
        assert sub in out


def test_endpoint_override_on_wall_is_domain_error(capsys):
    # (0,0) is on the drunkard wall border
    code, out, err = run(capsys, "solve", "--kind", "drunkard", "--seed", "1",
                         "--size", "10", "--start", "0,0", "--goal", "5,5")
    assert code == 1 and "error:" in err
