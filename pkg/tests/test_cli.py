import csv
import io
import json

import pytest

from conifold_rh import cli
from conifold_rh.bps import Charge
from conifold_rh.cli import CommandConfig, main, run
from conifold_rh.numlib import parse_complex

F_ARGS = ["eval", "--fn", "F", "--z", "0.3+0.1i", "--w1", "1", "--w2", "0.8+0.6i"]


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_eval_example(capsys):
    code, d = run_json(capsys, F_ARGS)
    assert code == 0
    assert d["value"] == "1.1010229449159539-0.49020699825946223i"
    assert d["method"] == "INTEGRAL"


def test_eval_value_round_trips_bit_exact(capsys):
    _, d = run_json(capsys, F_ARGS)
    _, l = run_json(capsys, F_ARGS)
    v = parse_complex(d["value"])
    assert d == l
    assert cli.format_complex(v) == d["value"]
    assert v.real.hex() == float.fromhex(v.real.hex()).hex()


def test_csv_columns(capsys):
    code = main(F_ARGS + ["--format", "csv"])
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert code == 0
    assert tuple(rows[0]) == cli.CSV_COLUMNS
    assert float(rows[1][0]) == 0.3 and float(rows[1][1]) == 0.1


def test_verify_jump_passes(capsys):
    code, d = run_json(capsys, ["verify", "--suite", "jump", "--samples", "4"])
    assert code == 0 and d["passed"]
    assert {"suite", "tolerance", "samples", "max_residual", "passed", "details"} <= set(d)


def test_failing_verification_exits_one(capsys, monkeypatch):
    monkeypatch.setenv(cli.TOL_ENV, "1e-20")
    code, d = run_json(capsys, ["verify", "--suite", "homogeneity"])
    assert code == 1 and not d["passed"] and d["tolerance"] == 1e-20


def test_tol_flag_beats_environment(capsys, monkeypatch):
    monkeypatch.setenv(cli.TOL_ENV, "1e-20")
    code, _ = run_json(capsys, ["verify", "--suite", "homogeneity", "--tol", "1e-9"])
    assert code == 0


def test_wallcross_example(capsys):
    code, d = run_json(capsys, ["wallcross", "--ray", "0", "--charge", "0,0,1,0", "--order", "3"])
    assert code == 0
    assert d["series"]["terms"] == [[0, 0, 1, 0, 1, 1], [1, 0, 1, 0, 1, 1]]
    assert d["ray"] == "l_0"


@pytest.mark.parametrize("text,index,sign", [("3", 3, 1), ("l_2", 2, 1), ("-l_1", 1, -1),
                                             ("inf", cli.bps.INFINITY, 1), ("-l_inf", cli.bps.INFINITY, -1)])
def test_parse_ray(text, index, sign):
    r = cli.parse_ray(text)
    assert (r.index, r.sign) == (index, sign)


@pytest.mark.parametrize("argv", [
    ["eval", "--fn", "F", "--z", "0.3", "--w1", "0", "--w2", "1"],
    ["eval", "--fn", "F", "--z", "abc", "--w1", "1", "--w2", "1j"],
    ["eval", "--fn", "F", "--z", "0.3"],
    ["eval", "--fn", "F", "--z", "1", "--w1", "1", "--w2", "0.8+0.6i", "--method", "product"],
    ["wallcross", "--charge", "1,2,3"],
    ["verify", "--suite", "jump", "--jobs", "0"],
    ["nonsense"],
])
def test_bad_input_exits_two(argv, capsys):
    assert main(argv) == 2
    capsys.readouterr()


def test_bad_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv(cli.TOL_ENV, "lots")
    assert main(["verify", "--suite", "wallcross"]) == 2
    capsys.readouterr()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# point\nfn = F\nz = 0.3+0.1i\nw1 = 1\nw2 = 0.8+0.6i\n")
    code, d = run_json(capsys, ["eval", "--fn", "G", "--config", str(cfg)])
    assert code == 0
    # the explicit --fn G wins over the file's fn = F
    _, g = run_json(capsys, ["eval", "--fn", "G", "--z", "0.3+0.1i", "--w1", "1", "--w2", "0.8+0.6i"])
    assert d["value"] == g["value"]


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["eval", "--fn", "F", "--config", str(cfg)]) == 2
    capsys.readouterr()


def test_output_file(tmp_path, capsys):
    out = tmp_path / "tau.json"
    code = main(["tau", "--v", "0.2+0.5i", "--w", "1", "--t", "0.28+0.09i", "0.2+0.1i",
                 "--output", str(out)])
    assert code == 0 and capsys.readouterr().out == ""
    d = json.loads(out.read_text())
    assert len(d["values"]) == 2


def test_expand_table_and_fit(capsys):
    code, d = run_json(capsys, ["expand", "--kind", "F_SMALL", "--order", "2"])
    assert code == 0 and d["kind"] == "F_SMALL" and "fit" not in d
    code, d = run_json(capsys, ["expand", "--kind", "F_SMALL", "--order", "2", "--fit"])
    assert code == 0 and abs(d["fit"]["slope"] - 3) < 0.3
    assert main(["expand", "--kind", "TAU", "--z", "0.3"]) == 2
    capsys.readouterr()


def test_command_config_run(tmp_path):
    out = tmp_path / "w.json"
    cfg = CommandConfig("wallcross", {"ray": "0", "charge": Charge(0, 0, 1, 0), "order": 3,
                                      "sector": False}, output=str(out))
    assert cfg.argv()[:3] == ["wallcross", "--format", "json"]
    assert "--sector" not in cfg.argv()
    assert run(cfg) == 0
    assert json.loads(out.read_text())["series"]["terms"][1] == [1, 0, 1, 0, 1, 1]


def test_command_config_complex_and_lists(tmp_path):
    out = tmp_path / "t.csv"
    cfg = CommandConfig("tau", {"v": 0.2 + 0.5j, "w": 1 + 0j, "t": [0.28 + 0.09j, 0.2 + 0.1j]},
                        output=str(out), format="csv")
    assert run(cfg) == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 3 and float(rows[2][0]) == 0.2
