from __future__ import annotations

import csv
import io
import json

import pytest

from addchains.chain import AdditionChain, emit_chain, parse_chain, validate_chain
from addchains.cli import main
from addchains.oracle import OracleTable

FIG7_BIN = "0b11111011100011001101001"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_chain_bm(capsys):
    code, out, _ = run(capsys, "chain", "--method", "bm", "--e", "13")
    assert code == 0
    assert out.splitlines()[0] == "1 2 3 6 12 13"
    assert "r=5 elements=6" in out


def test_chain_cwm_fig7_windows(capsys):
    code, out, _ = run(capsys, "chain", "--method", "cwm", "--k", "6", "--s", "3", "--e", FIG7_BIN)
    assert code == 0
    assert "windows 455@14 3@18 197@3 65@0" in out
    assert "v=4 u=37 w0=455" in out
    assert "formula u+n-n(w0)+v-1=54 differs (collisions=0 overhang=4)" in out


def test_chain_json_and_chainfile_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "chain", "--method", "cwm-asa", "--k", "6", "--s", "3", "--e", FIG7_BIN,
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["asa_prefix"] is True and payload["u"] == 17
    assert payload["element_count"] == len(payload["elements"]) == payload["r"] + 1
    assert validate_chain(AdditionChain(tuple(payload["elements"])))

    code, out, _ = run(capsys, "chain", "--method", "cwm-asa", "--k", "6", "--s", "3", "--e", FIG7_BIN,
                       "--format", "chainfile")
    path = tmp_path / "fig7.chain"
    path.write_text(out)
    assert emit_chain(parse_chain(out)) == out
    code, out, _ = run(capsys, "validate", str(path))
    assert code == 0 and out.strip() == f"ok r={payload['r']}"


@pytest.mark.parametrize("method, extra", [
    ("bm-star", []), ("wm", ["--k", "4"]), ("sptm", ["--m", "7"]),
    ("wm", ["--best", "--k-range", "1..6"]), ("sptm", ["--best", "--m-range", "1..15"]),
    ("cwm", ["--best", "--k-range", "1..5", "--s-range", "0..4"]), ("cwm-asa", ["--best"]),
])
def test_every_method_validates(capsys, method, extra):
    code, out, _ = run(capsys, "chain", "--method", method, "--e", "0xDEADBEEF12345", "--format", "chainfile", *extra)
    assert code == 0
    chain = parse_chain(out)
    assert validate_chain(chain) and chain.target == 0xDEADBEEF12345


def test_cwm_asa_best_large_input(capsys):
    e = (1 << 4095) | 0x123456789ABCDEF
    code, out, _ = run(capsys, "chain", "--method", "cwm-asa", "--best", "--k-range", "4..8",
                       "--s-range", "0..3", "--e", hex(e), "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["elements"][-1] == e


@pytest.mark.parametrize("argv", [
    ["chain", "--method", "wm", "--e", "13"],
    ["chain", "--method", "cwm", "--k", "3", "--e", "13"],
    ["chain", "--method", "bm", "--k", "3", "--e", "13"],
    ["chain", "--method", "wm", "--k", "3", "--best", "--e", "13"],
    ["chain", "--method", "wm", "--k", "3", "--k-range", "1..3", "--e", "13"],
    ["chain", "--method", "bm", "--best", "--e", "13"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [
    ["chain", "--e", "13"],
    ["chain", "--method", "bm", "--e", "abc"],
    ["chain", "--method", "cwm", "--best", "--k-range", "5..1", "--e", "13"],
    ["oracle"],
    ["oracle", "--e", "5", "--upto", "10"],
])
def test_parse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_domain_errors_exit_1(capsys, tmp_path):
    code, _, err = run(capsys, "chain", "--method", "bm", "--e", "0")
    assert code == 1 and "positive" in err
    code, _, _ = run(capsys, "modexp", "--base", "3", "--e", "13", "--mod", "1")
    assert code == 1
    code, _, _ = run(capsys, "validate", str(tmp_path / "missing.chain"))
    assert code == 1
    bad = tmp_path / "bad.chain"
    bad.write_text("1\n2\n5\n")
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1 and out.startswith("invalid")
    bad.write_text("")
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1
    code, _, _ = run(capsys, "oracle", "--e", "5000", "--cap", "100")
    assert code == 1


def test_modexp(capsys):
    code, out, _ = run(capsys, "modexp", "--base", "3", "--e", "13", "--mod", "1000", "--method", "bm")
    assert code == 0 and out.strip() == "323"
    for method, extra in (("wm", ["--k", "3"]), ("cwm-asa", ["--best"]), ("sptm", ["--m", "1"])):
        code, out, _ = run(capsys, "modexp", "--base", "2", "--e", "95", "--mod", "97", "--method", method, *extra)
        assert code == 0 and int(out) == pow(2, 95, 97)


def test_oracle(capsys, tmp_path):
    code, out, _ = run(capsys, "oracle", "--e", "13")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "l(13)=5"
    assert lines[1] in ("1 2 4 8 12 13", "1 2 3 6 12 13")
    code, out, _ = run(capsys, "oracle", "--upto", "16")
    assert out.splitlines()[:3] == ["e,l", "1,0", "2,1"] and out.splitlines()[-1] == "16,4"
    cache = tmp_path / "l.csv"
    code, out, _ = run(capsys, "oracle", "--upto", "300", "--cache", str(cache))
    assert code == 0 and "300" in out
    assert OracleTable.load(cache).limit == 300


def test_gen_is_deterministic(capsys, tmp_path):
    argv = ["gen", "--bits", "160,384", "--p", "0.5,0.9", "--count", "3", "--seed", "9"]
    code, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert code == 0 and first == second
    rows = list(csv.DictReader(io.StringIO(first)))
    assert len(rows) == 12
    assert all(int(r["e_hex"], 16).bit_length() == int(r["bits"]) for r in rows)
    out_path = tmp_path / "corpus.csv"
    run(capsys, *argv, "--out", str(out_path))
    assert out_path.read_text() == first
    code, out, _ = run(capsys, "gen", "--bits", "160", "--p", "0.5", "--count", "2", "--kind", "sptm-favorable")
    assert code == 0 and len(out.splitlines()) == 3


def test_bench_reports(capsys, tmp_path):
    prefix = str(tmp_path / "run")
    argv = ["bench", "--bits", "64", "--p", "0.5", "--count", "4", "--seed", "3", "--wm-k", "1..6",
            "--cwm-k", "1..5", "--cwm-s", "0..4", "--asa-k", "1..6", "--asa-s", "0..4", "--out", prefix]
    code, out, _ = run(capsys, *argv)
    assert code == 0 and "16 records" in out
    first = (tmp_path / "run.csv").read_text(), (tmp_path / "run.json").read_text()
    run(capsys, *argv)
    assert ((tmp_path / "run.csv").read_text(), (tmp_path / "run.json").read_text()) == first
    summary = json.loads(first[1])["summary"]
    assert set(summary["optimization_degree_by_bits"]["64"]) == {"sptm", "cwm", "cwm-asa"}


def test_bench_upto_with_oracle_gaps(capsys, tmp_path):
    cache = tmp_path / "l.csv"
    run(capsys, "oracle", "--upto", "64", "--cache", str(cache))
    prefix = str(tmp_path / "small")
    code, _, _ = run(capsys, "bench", "--upto", "64", "--methods", "bm,wm,cwm-asa", "--wm-k", "1..4",
                     "--asa-k", "1..4", "--asa-s", "0..3", "--oracle-cache", str(cache), "--out", prefix)
    assert code == 0
    gaps = json.loads((tmp_path / "small.json").read_text())["summary"]["oracle_gaps"]
    assert set(gaps) == {"bm", "wm", "cwm-asa"}
    assert gaps["cwm-asa"]["mean"] <= gaps["bm"]["mean"]
    code, out, err = run(capsys, "bench", "--upto", "8", "--methods", "bogus")
    assert code == 1 and "unknown methods" in err
