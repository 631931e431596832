"""Geonil CLI command unit tests."""

import json

import pytest
import yaml

from geonil import cli
from geonil.constants import ExitCode
from geonil.fields import field_for


def run(argv, capsys):
    """Run the command line and return its exit code and output."""

    with pytest.raises(SystemExit) as exc_info:
        cli.handle_command_line(argv)
    captured = capsys.readouterr()
    return exc_info.value.code, captured.out, captured.err


@pytest.fixture
def shift_system(tmp_path):
    """A system file for the nilpotent shift (y, 0) on the line x = 0."""

    path = tmp_path / "shift.yaml"
    path.write_text(
        yaml.dump({"name": "shift", "variables": ["x", "y"], "map": ["y", "0"], "variety": ["x"]})
    )
    return path


def test_parse_point():
    """Prime field coordinates are integers; extension coordinates are coefficient lists."""

    assert cli.parse_point("2,0,1", field_for(5)) == (2, 0, 1)
    assert cli.parse_point("[1,2],0, 7", field_for(3, 2)) == (7, 0, 1)


def test_format_point():
    """Points print the way they're typed."""

    assert cli.format_point((2, 0, 1), field_for(5)) == "(2,0,1)"
    assert cli.format_point((7, 0), field_for(3, 2)) == "([1,2],[0,0])"


def test_command_line_field_info(capsys):
    """Describe GF(9)."""

    code, out, _ = run(["field-info", "--p", "3", "--m", "2"], capsys)

    assert code == ExitCode.VERIFIED
    assert "q = 9" in out
    assert "generator: [1,1]" in out


def test_command_line_orbit__reaches_origin(capsys):
    """Print the orbit and its depth."""

    code, out, _ = run(
        ["orbit", "--example", "example1", "--a", "1", "--p", "5", "--point", "2,0,1"], capsys
    )

    assert code == ExitCode.VERIFIED
    assert out.splitlines() == ["(2,0,1)", "(0,4,2)", "(2,2,2)", "(0,0,0)", "depth 3"]


def test_command_line_orbit__cycle(capsys):
    """A cycle exits with the falsified code."""

    code, out, _ = run(
        ["orbit", "--example", "example2_literal", "--p", "3", "--point", "0,2,2"], capsys
    )

    assert code == ExitCode.FALSIFIED
    assert out.splitlines()[-1] == "cycle of length 2 after a tail of 0"


def test_command_line_orbit__budget(capsys):
    """Running out of steps exits with the inconclusive code."""

    code, out, _ = run(
        [
            "orbit",
            "--example",
            "example1",
            "--a",
            "1",
            "--p",
            "5",
            "--point",
            "2,0,1",
            "--budget",
            "1",
        ],
        capsys,
    )

    assert code == ExitCode.INCONCLUSIVE
    assert out.splitlines()[-1] == "no verdict within 1 steps"


def test_command_line_depth_table(capsys, tmp_path):
    """Depth tables print as CSV and can be saved."""

    out_path = tmp_path / "tables.csv"
    code, out, _ = run(
        [
            "depth-table",
            "--example",
            "example2_corrected",
            "--p",
            "3",
            "--m-max",
            "2",
            "--out",
            str(out_path),
            "--format",
            "csv",
        ],
        capsys,
    )

    assert code == ExitCode.VERIFIED
    assert out.splitlines()[1:] == [
        "3,1,3,9,0,3,2.222222,0,0:1;1:2;3:6",
        "3,2,9,81,0,3,2.765432,0,0:1;1:8;3:72",
    ]
    assert out_path.read_text() == out


def test_command_line_depth_table__system(capsys, shift_system):
    """Custom systems work like examples."""

    code, out, _ = run(["depth-table", "--system", str(shift_system), "--p", "3"], capsys)

    assert code == ExitCode.VERIFIED
    assert out.splitlines()[1] == "3,1,3,3,0,2,1.333333,0,0:1;2:2"


def test_command_line_verify__falsified(capsys):
    """The printed Example 2 fails over F_3."""

    code, out, _ = run(["verify", "--claim", "thm3", "--variant", "literal", "--p", "3"], capsys)

    assert code == ExitCode.FALSIFIED
    assert out.startswith("thm3: falsified")
    assert "witness cycle (0,2,2)" in out


def test_command_line_verify__lemma5_without_field(capsys, tmp_path):
    """The Z/n suite needs no field, and its report can be written without timing."""

    out_path = tmp_path / "reports.jsonl"
    code, out, _ = run(
        ["verify", "--claim", "lemma5", "--n-max", "5", "--out", str(out_path), "--no-timing"],
        capsys,
    )

    assert code == ExitCode.VERIFIED
    assert out.startswith("lemma5/suite: verified")
    (line,) = out_path.read_text().splitlines()
    report = json.loads(line)
    assert report["claim"] == "lemma5"
    assert "elapsed_seconds" not in report


def test_command_line_verify__thm1_system(capsys, shift_system):
    """Theorem 1 runs on a system file."""

    code, out, _ = run(
        ["verify", "--claim", "thm1", "--system", str(shift_system), "--p", "2", "--m-max", "2"],
        capsys,
    )

    assert code == ExitCode.VERIFIED
    assert out.startswith("thm1_forward: verified")


def test_command_line_verify__missing_parameter(capsys):
    """Example 1 needs a, which is a usage error."""

    code, _, err = run(["verify", "--claim", "thm2", "--example", "example1", "--p", "5"], capsys)

    assert code == ExitCode.ERROR
    assert "needs parameter(s) a" in err


def test_command_line_rho_stats(capsys):
    """t^2 + 1 on F_5."""

    code, out, _ = run(["rho-stats", "--p", "5", "--a", "1"], capsys)

    assert code == ExitCode.VERIFIED
    assert out.splitlines() == [
        "t^2 + 1 over GF(5): 1 component(s)",
        "  cycle of length 3 [0, 1, 2], 2 tail node(s), longest tail 1",
    ]


def test_command_line_fib__hit_time(capsys):
    """1, 1, 2, 3, 0 in Z/5."""

    code, out, _ = run(["fib", "hit-time", "--n", "5", "--a0", "1"], capsys)

    assert code == ExitCode.VERIFIED
    assert out.splitlines() == ["1 1 2 3 0", "hit index 4"]


def test_command_line_fib__multiplicative_hit_time(capsys):
    """2 in F_5* hits 1 at index 5."""

    code, out, _ = run(["fib", "hit-time", "--p", "5", "--a0", "2"], capsys)

    assert code == ExitCode.VERIFIED
    assert out.splitlines()[-1] == "hit index 5"


def test_command_line_fib__generator_bound_suite(capsys):
    """The stated bound fails for q = 3, 4 and 9."""

    code, out, _ = run(["fib", "generator-bound", "--q-max", "9"], capsys)

    assert code == ExitCode.FALSIFIED
    assert "thm4/generator_bound: falsified" in out
    assert "thm4/generator_bound_sound: verified" in out


def test_command_line_fib__lemma_check(capsys):
    """One seed in one group."""

    code, out, _ = run(["fib", "lemma-check", "--n", "5", "--a0", "1"], capsys)

    assert code == ExitCode.VERIFIED
    assert out.startswith("lemma5/pair_map_cycle: verified")


def test_command_line_compose(capsys, shift_system):
    """The second iterate of the shift is zero."""

    code, out, _ = run(["compose", "--system", str(shift_system), "--times", "2"], capsys)

    assert code == ExitCode.VERIFIED
    assert out.splitlines() == ["x' = 0", "y' = 0"]


def test_command_line_search2d(capsys):
    """Screen linear maps over F_2."""

    code, out, _ = run(["search2d", "--q", "2", "--max-degree", "1", "--m-max", "1"], capsys)

    assert code == ExitCode.VERIFIED
    assert out.startswith("total 48: ")


def test_command_line__errors(capsys):
    """Missing commands, unknown flags and invalid values exit with the error code."""

    assert run([], capsys)[0] == ExitCode.ERROR
    assert run(["orbit", "--bogus"], capsys)[0] == ExitCode.ERROR
    code, _, err = run(["field-info", "--p", "4"], capsys)
    assert code == ExitCode.ERROR
    assert "not prime" in err


def test_build_parser__jobs_from_environment(monkeypatch):
    """The worker count defaults to GEONIL_JOBS."""

    monkeypatch.setenv("GEONIL_JOBS", "3")

    args = cli.build_parser().parse_args(["orbit", "--point", "1,1"])

    assert args.jobs == "3"


def test_dispatch__catches_geonil_errors(capsys, mocker):
    """Library errors become the error exit code."""

    mocker.patch.dict(
        cli.COMMANDS, {"field-info": mocker.Mock(side_effect=cli.PreconditionUnmet("nope"))}
    )

    assert cli.dispatch(cli.RunConfig(command="field-info")) == ExitCode.ERROR
    assert "error: nope" in capsys.readouterr().err
