import json
from pathlib import Path

import pytest
import shilov_eq.cli as cli
import shilov_eq.report as report
from shilov_eq._version import __version__
from shilov_eq.config import load_config

TENT = """\
d = 1

[[points]]
w = [0, 1]

[[points]]
w = [1, 0]

[sections]
s = "x1"

[params]
n_max = 4
subsets = [[0]]
"""

FLAT_SECOND = """
[[points2]]
w = [0, 0]
"""

DOMINATED_POINT = """
[[points]]
w = [1, 1]
"""


@pytest.fixture
def tent(tmp_path: Path) -> Path:
    path = tmp_path / "tent.toml"
    path.write_text(TENT)
    return path


def write(tmp_path: Path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.strip() == f"shilov-eq {__version__}"


def test_shilov(tent: Path, tmp_path: Path, capsys):
    out = tmp_path / "shilov.json"
    assert cli.main(["shilov", "-c", str(tent), "-o", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "Shilov indices: [0, 1]" in printed
    assert "separating section for {0}: x1^1" in printed
    assert json.loads(out.read_text()) == {
        "shilov": [0, 1],
        "witnesses": [["2/3", "1/3"], ["1/3", "2/3"]],
        "dominated_by": [],
        "separating_sections": {"0": "x1^1"},
    }


def test_shilov_reports_dominance(tmp_path: Path, capsys):
    text = TENT.replace("\n[sections]", DOMINATED_POINT + "\n[sections]")
    path = write(tmp_path, "dominated.toml", text)
    assert cli.main(["shilov", "-c", path]) == 0
    printed = capsys.readouterr().out
    assert "point 2 is dominated by point 0" in printed
    assert "point 2 is dominated by point 1" in printed


def test_lambda(tent: Path, capsys):
    assert cli.main(["lambda", "-c", str(tent)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(report.LAMBDA_COLUMNS)
    assert lines[1].startswith("0,0 1,0,True,1/2,")


def test_limit(tent: Path, tmp_path: Path, capsys):
    out = tmp_path / "harness.csv"
    pivots = tmp_path / "pivots.json"
    code = cli.main(
        ["limit", "-c", str(tent), "-o", str(out), "--pivots", str(pivots), "-q"]
    )
    assert code == 0
    harness = report.read_harness_csv(out)
    assert [row.n for row in harness.rows] == [1, 2, 3, 4]
    assert str(harness.rows[3].lhs) == "-2/5"
    assert sorted(json.loads(pivots.read_text())) == ["1", "2", "3", "4"]
    printed = capsys.readouterr().out
    assert "fitted C: 2/5 (band scale 1)" in printed
    assert "certified: True" in printed


def test_limit_as_json(tent: Path, tmp_path: Path, capsys):
    out = tmp_path / "harness.json"
    assert cli.main(["limit", "-c", str(tent), "-o", str(out), "-q"]) == 0
    data = json.loads(out.read_text())
    assert data["fitted_constant"] == "2/5"
    assert data["certified"] is True
    assert [row["n"] for row in data["rows"]] == [1, 2, 3, 4]
    assert data["rows"][3]["lhs"] == "-2/5"
    assert "n err_n in [0, 2/5]" in capsys.readouterr().out


def test_limit_overrides(tent: Path, capsys):
    assert cli.main(["limit", "-c", str(tent), "--nmax", "2", "--prec", "32", "-q"]) == 0
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    assert lines[0] == ",".join(report.HARNESS_COLUMNS)
    assert len(lines) == 3
    # the summary goes to stderr while the report is on stdout
    assert "fitted C: 1/3 (band scale 1)" in captured.err
    assert "certified: True" in captured.err


def test_distance(tmp_path: Path, capsys):
    path = write(tmp_path, "two.toml", TENT + FLAT_SECOND)
    assert cli.main(["distance", "-c", path]) == 0
    assert json.loads(capsys.readouterr().out) == {
        "d_inf": "1/2",
        "d_1": "1/4",
        "exact": True,
        "d_mono": "1/2",
        "bound": "1/2",
    }


def test_solve(tent: Path, tmp_path: Path):
    out = tmp_path / "solve.json"
    assert cli.main(["solve", "-c", str(tent), "--target", "3/4,1/4", "-o", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["shifts"] == [0.0, 0.5]
    assert result["volumes"] == ["3/4", "1/4"]


def test_props(tmp_path: Path, capsys):
    out = tmp_path / "props.csv"
    argv = ["props", "--suite", "max-norm", "--suite", "isometric"]
    code = cli.main(argv + ["--instances", "3", "-q", "-o", str(out)])
    assert code == 0
    assert "max-norm" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    assert lines[0] == "suite,passed,total,gating,skipped"
    assert len(lines) == 3


@pytest.mark.parametrize("fmt", ["toml", "json"])
def test_export(tent: Path, tmp_path: Path, fmt: str):
    out = tmp_path / f"exported.{fmt}"
    assert cli.main(["export", "-c", str(tent), "-o", str(out)]) == 0
    assert load_config(out) == load_config(tent)


def test_export_to_stdout(tent: Path, capsys):
    assert cli.main(["export", "-c", str(tent), "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["d"] == 1


@pytest.mark.parametrize(
    "argv,text",
    [
        (["limit"], None),
        (["distance"], TENT),
        (["solve"], TENT),
        (["limit", "--target", "1/2,1/3"], TENT),
        (["shilov"], TENT.replace("w = [1, 0]", 'w = [1, "x"]')),
    ],
)
def test_invalid_input_exits_with_2(argv, text, tmp_path: Path, capsys):
    if text is not None:
        argv = argv + ["-c", write(tmp_path, "config.toml", text)]
    assert cli.main(argv) == 2
    assert capsys.readouterr().err.startswith("error: ")


def test_failed_computation_exits_with_1(tmp_path: Path, capsys):
    # the second point is the first one shifted by a constant
    text = TENT.replace("w = [1, 0]", "w = [1, 2]\nc = -2")
    path = write(tmp_path, "dominated.toml", text)
    assert cli.main(["solve", "-c", path, "--target", "1/2,1/2"]) == 1
    assert capsys.readouterr().err.startswith("computation failed: ")
