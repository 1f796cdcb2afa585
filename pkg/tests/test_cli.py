"""Command-line interface: artifacts, exit codes, byte-level determinism."""

import json
import os

import numpy as np
import pytest

from bimult.cli import read_symbol, run, write_symbol
from bimult.grid import FrequencyBox, SpectralVector, spectral_to_json
from bimult.rowcol import CoeffMatrix


@pytest.fixture()
def matrix_file(tmp_path):
    path = tmp_path / "matrix.json"
    path.write_text(CoeffMatrix({(0, 0): 1.0}).to_json())
    return str(path)


def test_decompose_single_entry(tmp_path, matrix_file):
    out = str(tmp_path / "part.json")
    assert run(["decompose", "--in", matrix_file, "--out", out]) == 0
    assert json.loads(open(out).read()) == [[0, 0, "S1"]]


def test_decompose_refuses_overwrite(tmp_path, matrix_file):
    out = str(tmp_path / "part.json")
    assert run(["decompose", "--in", matrix_file, "--out", out]) == 0
    assert run(["decompose", "--in", matrix_file, "--out", out]) == 1
    assert run(["decompose", "--in", matrix_file, "--out", out, "--force"]) == 0


def test_missing_seed_is_validation_error(tmp_path, matrix_file, monkeypatch):
    monkeypatch.delenv("BIMULT_SEED", raising=False)
    out = str(tmp_path / "sym.bin")
    rc = run(["gen-symbol", "--kind", "lattice", "--coeffs", matrix_file, "--out", out])
    assert rc == 1


def test_env_seed_fallback(tmp_path, matrix_file, monkeypatch):
    monkeypatch.setenv("BIMULT_SEED", "9")
    out = str(tmp_path / "sym.bin")
    rc = run(["gen-symbol", "--kind", "lattice", "--coeffs", matrix_file, "--out", out])
    assert rc == 0
    sidecar = json.loads(open(out + ".json").read())
    assert "configHash" in sidecar and "toolVersion" in sidecar


def test_symbol_binary_round_trip(tmp_path, matrix_file):
    out = str(tmp_path / "sym.bin")
    assert run([
        "gen-symbol", "--kind", "lattice", "--coeffs", matrix_file,
        "--resolution", "10", "--seed", "3", "--out", out,
    ]) == 0
    m = read_symbol(out)
    assert m.dim == 2 and m.spacing == pytest.approx(0.1)
    assert np.max(np.abs(m.values)) == pytest.approx(1.0, rel=1e-6)


def test_apply_identity_bump(tmp_path, matrix_file, capsys):
    sym = str(tmp_path / "sym.bin")
    run(["gen-symbol", "--kind", "lattice", "--coeffs", matrix_file,
         "--resolution", "10", "--seed", "3", "--out", sym])
    box = FrequencyBox(1, 5, 2, 10.0)
    vals = np.zeros(11, dtype=complex)
    vals[5] = 1.0
    fpath = str(tmp_path / "f.json")
    open(fpath, "w").write(spectral_to_json(SpectralVector(box, vals)))
    rc = run(["apply", "--symbol", sym, "--f", fpath, "--g", fpath])
    assert rc == 0
    assert "operatorRatio=1" in capsys.readouterr().out


def test_experiment_counting_exit_codes(tmp_path):
    rc = run(["experiment", "counting", "--M", "2,3,32", "--seed", "1",
              "--out", str(tmp_path)])
    assert rc == 0
    files = [f for f in os.listdir(tmp_path) if f.endswith(".jsonl")]
    assert len(files) == 1 and files[0].startswith("counting-")


def test_experiment_threshold_failure_exit_2(tmp_path):
    # an impossible prediction band forces summary.passed = False
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({"mode": "desk", "N": [1], "pool": 2,
                                "band_lo": 100.0, "band_hi": 200.0}))
    rc = run(["experiment", "growth-B", "--config", str(cfgp), "--seed", "1",
              "--out", str(tmp_path)])
    assert rc == 2


def test_experiment_byte_identical_across_workers(tmp_path):
    blobs = []
    for i, threads in enumerate((1, 4, 8)):
        out = tmp_path / f"w{i}"
        rc = run(["experiment", "growth-B", "--mode", "desk", "--N", "1,2",
                  "--pool", "4", "--seed", "7", "--threads", str(threads),
                  "--out", str(out)])
        assert rc == 0
        files = os.listdir(out)
        assert len(files) == 1
        blobs.append(open(out / files[0], "rb").read())
    assert blobs[0] == blobs[1] == blobs[2]


def test_report_merges_records(tmp_path):
    run(["experiment", "counting", "--M", "2,3", "--seed", "1", "--out", str(tmp_path)])
    run(["experiment", "growth-B", "--mode", "desk", "--N", "1", "--pool", "2",
         "--seed", "2", "--out", str(tmp_path)])
    rep = tmp_path / "rep"
    rc = run(["report", str(tmp_path / "*.jsonl"), "--out", str(rep)])
    assert rc == 0
    summary = open(rep / "summary.csv").read().splitlines()
    assert len(summary) == 3  # header + 2 records
    dats = [f for f in os.listdir(rep) if f.endswith(".dat")]
    assert len(dats) == 2
    # two-column plain text plot data
    for dat in dats:
        for line in open(rep / dat):
            assert len(line.split()) == 2


def test_report_empty_glob(tmp_path):
    rep = tmp_path / "rep"
    rc = run(["report", str(tmp_path / "none-*.jsonl"), "--out", str(rep)])
    assert rc == 0
    assert open(rep / "summary.csv").read().startswith("experimentName")


def test_unknown_subcommand_is_error():
    assert run(["frobnicate"]) == 1


def test_write_symbol_refuses_overwrite(tmp_path):
    from bimult.bilinear import SymbolGrid

    m = SymbolGrid(2, 1, np.ones((3, 3)), 0.5)
    path = str(tmp_path / "s.bin")
    write_symbol(path, m, {})
    with pytest.raises(FileExistsError):
        write_symbol(path, m, {})
    write_symbol(path, m, {}, force=True)
