import csv
import io
import json

import pytest

from ecs_transfer import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_fig1_header_and_saturation(capsys):
    code, out, _ = run(capsys, "sweep-fig1", "--tmin", "0", "--tmax", "4", "--steps", "101")
    assert code == 0
    table = rows(out)
    assert table[0] == cli.FIG1_HEADER
    assert table[1][-1] == "degenerate_branch" and table[1][1] == ""
    last = table[-1]
    assert float(last[0]) == 4.0 and float(last[1]) >= 0.999999
    assert abs(float(last[1]) - float(last[2])) <= 1e-10


def test_fig2_vacuum_retrieval(capsys):
    code, out, _ = run(capsys, "sweep-fig2", "--tmin", "0", "--tmax", "4", "--steps", "41")
    table = rows(out)
    assert code == 0 and table[0] == cli.FIG2_HEADER
    assert float(table[-1][1]) >= 0.999
    assert float(table[-1][2]) == pytest.approx(0.25, abs=1e-3)


def test_fig3_failure_modes(capsys):
    code, out, _ = run(capsys, "sweep-fig3", "--tmin", "0.5", "--tmax", "4", "--steps", "8")
    table = rows(out)
    assert code == 0 and table[0] == cli.FIG3_HEADER
    first, last = table[1], table[-1]
    assert float(first[0]) == 0.5
    assert float(first[3]) > float(first[1])
    assert float(last[1]) <= 1e-3


def test_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["sweep-fig3", "--steps", "50", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_deposit_and_retrieve_tables(capsys):
    code, out, _ = run(capsys, "deposit", "--t", "1", "--engine", "effective")
    table = rows(out)
    assert code == 0 and table[0] == cli.DEPOSIT_HEADER and len(table) == 5
    assert all(float(r[5]) >= 1 - 1e-8 for r in table[1:])
    code, out, _ = run(capsys, "retrieve", "--t", "4", "--projection", "vac_vac")
    table = rows(out)
    assert code == 0 and table[0] == cli.RETRIEVE_HEADER and len(table) == 2
    assert float(table[1][1]) >= 0.999


def test_rwa_table(capsys):
    code, out, _ = run(capsys, "rwa")
    table = rows(out)
    assert code == 0 and table[0] == cli.RWA_HEADER
    fids = [float(r[3]) for r in table[1:]]
    assert len(fids) == 4 and fids == sorted(fids)


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tmin": 1.0, "tmax": 2.0, "steps": 3, "omega1": 30.0}))
    code, out, _ = run(capsys, "sweep-fig1", "--config", str(cfg), "--steps", "5")
    table = rows(out)
    assert code == 0 and len(table) == 6
    assert float(table[1][0]) == 1.0 and float(table[-1][0]) == 2.0


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep-fig1", "--steps", "1"],
        ["sweep-fig1", "--tmin", "3", "--tmax", "1"],
        ["deposit", "--lambda1", "-1"],
        ["deposit", "--t", "4", "--engine", "effective", "--nmax", "4"],
        ["rwa", "--ratios", "ten"],
        ["sweep-fig1", "--config", "/nonexistent/cfg.json"],
    ],
)
def test_configuration_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "deposit", "--config", str(cfg))[0] == 2


def test_argparse_failure_exit_2(capsys):
    assert run(capsys, "nonsense")[0] == 2


def test_selftest_passes_and_is_deterministic(capsys):
    code, first, _ = run(capsys, "selftest", "--seed", "3")
    assert code == 0
    assert first.strip().endswith("9/9 properties passed")
    _, second, _ = run(capsys, "selftest", "--seed", "3")
    assert first == second


def test_selftest_failure_exit_1(capsys):
    code, out, _ = run(capsys, "selftest", "--nmax", "3")
    assert code == 1
    assert "FAIL" in out and "CutoffTooSmall" in out
