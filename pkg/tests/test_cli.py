import json
import subprocess
import sys

import pytest

from unihunt.cli import main
from unihunt.hunt import RunConfig, parse_list, parse_mass_table
from unihunt.lattice import parse_gram


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def e8_gram(tmp_path, capsys):
    path = tmp_path / "e8.gram"
    code, _, _ = run(capsys, "neighbor", "--d", 2, "--x", "1,1,1,1,1,1,1,1", "--out", path)
    assert code == 0
    return path


def test_neighbor_writes_a_gram_file(e8_gram, capsys):
    lat = parse_gram(e8_gram.read_text())
    assert lat.n == 8 and lat.is_unimodular
    code, out, err = run(capsys, "neighbor", "--d", 2, "--x", "1,1,1,1,1,1,1,1")
    assert code == 0
    assert parse_gram(out).gram == lat.gram
    assert "r1 = 0  r2 = 240" in err


def test_invariant_subcommands(e8_gram, capsys):
    code, out, _ = run(capsys, "bv", "--gram", e8_gram)
    assert code == 0 and "vertices 120  edges 3360" in out
    assert out.splitlines()[0] == "f5905f1303ba65a5"
    code, out, _ = run(capsys, "roots", "--gram", e8_gram)
    assert out.strip() == "E8"
    code, out, _ = run(capsys, "aut", "--gram", e8_gram)
    assert "|O| = 696729600" in out
    code, out, _ = run(capsys, "shorts", "--spec", "2:1,1,1,1,1,1,1,1:0", "--bound", 2)
    assert out.splitlines() == ["r1 = 0", "r2 = 240"]


def test_reduce_exit_codes(e8_gram, tmp_path, capsys):
    out_path = tmp_path / "red.gram"
    code, out, _ = run(capsys, "reduce", "--gram", e8_gram, "--b", 2, "--t", 500, "--out", out_path)
    assert code == 0 and len(out.splitlines()) == 9
    assert max(parse_gram(out_path.read_text()).gram[i][i] for i in range(8)) == 2
    code, out, _ = run(capsys, "reduce", "--gram", e8_gram, "--b", 1, "--t", 5)
    assert code == 1


def test_exc_and_companions(tmp_path, capsys):
    code, out, _ = run(capsys, "exc", "--spec", "2:" + ",".join(["1"] * 12) + ":0", "--bound", 4)
    assert code == 0 and "|Exc| = 24" in out
    code, out, _ = run(capsys, "companions", "--spec", "2:" + ",".join(["1"] * 12) + ":0", "--out-prefix", tmp_path / "c")
    assert code == 0
    assert out.count("D12") == 2 and out.count("(singular)") == 1
    assert parse_gram((tmp_path / "c1.gram").read_text()).is_unimodular


def test_strict2(capsys):
    code, out, _ = run(capsys, "strict2", "--d", 5, "--x", "1,1,1,1,2,2,2,2", "--count")
    assert code == 0 and out.strip() == "candidates 2  isotropic specs 4"
    code, out, _ = run(capsys, "strict2", "--d", 5, "--x", "1,1,1,1,2,2,2,2")
    assert out.splitlines()[0].startswith("10:")


def test_search_verify_round_trip(tmp_path, capsys):
    table = tmp_path / "m14.tbl"
    code, _, err = run(capsys, "oracle-mass", "--n", 14, "--out", table)
    assert code == 0 and "2E7" in err
    assert parse_mass_table(table.read_text()) == {"2E7": 1 / 2}
    lst, prog, cfg = tmp_path / "l14.lst", tmp_path / "p14.txt", tmp_path / "c14.json"
    code, _, err = run(capsys, "ne", "--n", 14, "--mass", table, "--d-max", 8, "--threads", 1,
                       "--out", lst, "--progress", prog, "--dump-config", cfg)
    assert code == 0 and "1 classes, complete" in err
    assert len(parse_list(lst.read_text())) == 1
    assert prog.read_text().splitlines()[-1].endswith(" 0/1")
    assert RunConfig.from_json(cfg.read_text()).mass_table == str(table)
    code, out, _ = run(capsys, "verify", "--list", lst, "--mass", table)
    assert code == 0 and out.startswith("PASS")
    # a duplicated entry fails verification with exit 1
    lst.write_text(lst.read_text() * 2)
    code, out, _ = run(capsys, "verify", "--list", lst, "--mass", table)
    assert code == 1 and out.startswith("FAIL: mass overshoot")


def test_config_file_is_honoured(tmp_path, capsys):
    cfg = RunConfig(subcommand="bne", n=8, d_max=30, partition=(2, 2, 2, 2), root="E8", rmass="1", threads=1)
    path = tmp_path / "run.json"
    path.write_text(cfg.to_json())
    lst = tmp_path / "out.lst"
    code, _, _ = run(capsys, "bne", "--config", path, "--out", lst)
    assert code == 0
    (e,) = parse_list(lst.read_text())
    assert e.spec.d == 20


def test_bne_mass_error_exits_1(tmp_path, capsys):
    code, _, err = run(capsys, "bne", "--n", 8, "--root", "E8", "--rmass", "1/2", "--partition", "8",
                       "--d-max", 3, "--threads", 1)
    assert code == 1 and "inconsistent mass" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["bv", "--gram", "/nonexistent.gram"],
        ["bne", "--n", 8, "--root", "E8", "--rmass", "1", "--threads", 1],
        ["neighbor", "--n", 3, "--d", 5, "--x", "1,2"],
        ["neighbor", "--d", 5, "--x", "1,1"],
        ["roots", "--spec", "5:1,x"],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_malformed_files_name_the_line(tmp_path, capsys):
    bad = tmp_path / "bad.gram"
    bad.write_text("3\n1 0 0\n0 1 0\n")
    code, _, err = run(capsys, "roots", "--gram", bad)
    assert code == 2 and "line 4" in err
    lst, tbl = tmp_path / "bad.lst", tmp_path / "m.tbl"
    lst.write_text("2:1,1,1,1,1,1,1,1:0:1/1:f5905f1303ba65a5:E8\n2:1:0\n")
    tbl.write_text("E8:1\n")
    code, _, err = run(capsys, "verify", "--list", lst, "--mass", tbl)
    assert code == 2 and "line 2" in err
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"n": 8,\n "colour": 1}')
    code, _, err = run(capsys, "ne", "--config", cfg, "--mass", tbl)
    assert code == 2 and "colour" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "unihunt.cli", "roots", "--spec", "2:1,1,1,1,1,1,1,1:0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "E8"
