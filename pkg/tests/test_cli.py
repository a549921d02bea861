import io
from fractions import Fraction

import pytest

from selfaffine import cli
from selfaffine.config import ENV_CONFIG
from selfaffine.geometry import read_pgm
from selfaffine.records import parse_records, read_sweep_csv


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def record(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    (rec,) = parse_records(out)
    return rec


@pytest.fixture(autouse=True)
def no_config(monkeypatch):
    monkeypatch.delenv(ENV_CONFIG, raising=False)


def test_decide():
    rec = record("decide", 4, 3, 2, 6, 2)
    assert rec["status"] == "Connected"
    assert rec["branch"] == "MainBandInner"
    assert rec["band.inner"] == "[1, 3]"
    assert record("decide", 4, 2, 1000000, 6, 2)["branch"] == "QAbs2"


def test_decide_negative_inputs():
    rec = record("decide", -4, -3, "-7/2", 6, 2)
    assert rec["normalized"] == "true"
    assert rec["status"] == record("decide", 4, 3, "7/2", 6, 2)["status"]


@pytest.mark.parametrize(
    "argv",
    [
        ("decide", 4, 3, "x", 6, 2),
        ("decide", 4, 3, "1e2", 6, 2),
        ("decide", 1, 3, 2, 6, 2),
        ("decide", 4, 3, 2, 6),
        ("extremes", 4, 3, 9),
        ("tile", 4, 3, 1, 6, 3),
        ("sweep", 4, 3, 6, 2, 0, 10, 0),
        ("nonsense",),
    ],
)
def test_invalid_input_exit_code(argv):
    code, out, err = run(*argv)
    assert code == 2 and out == ""


def test_budget_exit_code(tmp_path):
    code, _, err = run("render", 4, 3, 2, 6, 2, "--depth", 9, "--point-budget", 1000, "--out", tmp_path / "x.pgm")
    assert code == 3 and "budget" in err
    code, _, _ = run("tile", 2, 6, "1/2", 2, 6, 8, "--point-budget", 100)
    assert code == 0


def test_verify():
    rec = record("verify", 4, 3, 2, 6, 2, "--depth", 12)
    assert (rec["formula"], rec["oracle"], rec["geometric"]) == ("Connected", "Connected", "NotSeparated")
    assert rec["agree.oracle"] == rec["agree.geometric"] == "true"
    rec = record("verify", 4, 3, 10, 6, 2, "--depth", 8)
    assert (rec["formula"], rec["geometric"]) == ("Disconnected", "Disconnected")
    crossing = [v for k, v in rec.items() if k.startswith("oracle.offset.1.")]
    assert crossing and set(crossing) == {"Unattainable"}
    rec = record("verify", 4, 3, 3, 6, 2, "--depth", 12)
    assert rec["formula"] == "Connected" and rec["oracle.offset.0.1"] == "Attainable"
    assert "oracle.witness.0.1" in rec


def test_extremes():
    rec = record("extremes", 5, 3, 7, "--depth", 10)
    assert rec["M1"] == "2" and rec["m1"] == "4/3"
    assert all(rec[f"{s}.contained"] == "true" for s in ("M1", "m1", "M1p", "m1p", "M2", "m2", "M2p", "m2p"))


def test_adjacency():
    rec = record("adjacency", 4, 3, 2, 6, 2, "--depth", 5)
    assert rec["formula.horizontal"] == "true" and rec["formula.vertical"] == "false"
    assert rec["connected"] == "true"


def test_tile():
    rec = record("tile", 4, 3, 1, 3, 4)
    assert (rec["status"], rec["case"]) == ("NotTile", "MLessP")
    assert (rec["witness.first"], rec["witness.second"]) == ("0,0,3,0", "0,0,0,1")
    assert rec["witness.valid"] == "true"
    rec = record("tile", 2, 6, 1, 2, 6, 3)
    assert rec["status"] == "Tile" and rec["probe.checked"] == "1:12,2:144,3:1728"
    rec = record("tile", 2, 3, "1/2", 3, 2, 3)
    assert rec["status"] == "Unknown" and "probe.min_distance.3" in rec


def test_sweep_flips(tmp_path):
    code, out, _ = run("sweep", 4, 3, 6, 2, 0, 10, 41)
    assert code == 0
    rows = read_sweep_csv(out)
    assert len(rows) == 41
    connected = [r["a"] for r in rows if r["verdict"] == "Connected"]
    assert min(connected) == 1 and max(connected) == 9
    assert all(r["verdict"] == "Disconnected" for r in rows if r["a"] < 1 or r["a"] > 9)


def test_sweep_single_step_equals_decide():
    code, out, _ = run("sweep", 4, 3, 6, 2, "5/2", 10, 1)
    (row,) = read_sweep_csv(out)
    rec = record("decide", 4, 3, "5/2", 6, 2)
    assert row["a"] == Fraction(5, 2)
    assert (row["verdict"], row["branch"]) == (rec["status"], rec["branch"])


def test_sweep_files(tmp_path):
    code, out, _ = run("sweep", 4, 3, 6, 2, 0, 10, 21, "--out", tmp_path / "s.csv", "--phase-image", tmp_path / "s.pgm")
    assert code == 0 and parse_records(out)[0]["rows"] == "21"
    img = read_pgm(tmp_path / "s.pgm")
    assert img.shape == (16, 21)
    assert img[0, 0] == 255 and img[0, 10] == 0


def test_sweep_oracle_column():
    code, out, _ = run("sweep", 4, 3, 6, 2, 0, 10, 5, "--oracle-depth", 10)
    assert {r["oracle"] for r in read_sweep_csv(out)} == {"true"}


def test_render(tmp_path):
    rec = record("render", 4, 3, 2, 6, 2, "--depth", 4, "--size", 64, "--out", tmp_path / "t.pgm")
    assert read_pgm(rec["path"]).shape == (64, 64)
    rec = record("render", 4, 3, 2, 6, 2, "--format", "svg", "--size", 32, "--out", tmp_path / "t.svg", "--point-budget", 5000)
    assert rec["depth"] == "3"
    assert open(rec["path"]).read().startswith("<svg")


def test_config_file_sets_defaults(tmp_path, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"depth=3\noutput_dir={tmp_path}\n")
    monkeypatch.setenv(ENV_CONFIG, str(cfg))
    assert record("adjacency", 4, 3, 2, 6, 2)["depth"] == "3"
    assert record("adjacency", 4, 3, 2, 6, 2, "--depth", 4)["depth"] == "4"
    rec = record("render", 4, 3, 2, 6, 2, "--size", 16, "--out", "rel.pgm")
    assert (tmp_path / "rel.pgm").exists()


def test_tile_wide_q_is_a_tile():
    assert record("tile", 2, 6, 5, 2, 6)["status"] == "Tile"


def test_extremes_values():
    rec = record("extremes", 5, 3, 7)
    expected = {"M1": "2", "m1": "4/3", "M2": "1/3", "M1p": "5/4", "m1p": "3/4", "M2p": "1/4"}
    assert {k: rec[k] for k in expected} == expected


def test_output_dir_is_created(tmp_path, monkeypatch):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"output_dir={tmp_path / 'new' / 'dir'}\n")
    monkeypatch.setenv(ENV_CONFIG, str(cfg))
    record("sweep", 4, 3, 6, 2, 0, 10, 3, "--out", "s.csv")
    assert (tmp_path / "new" / "dir" / "s.csv").exists()
