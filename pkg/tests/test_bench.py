from __future__ import annotations

import csv
import io
import json
import math

import pytest

from conftest import FIG7
from addchains.bench import (
    CSV_COLUMNS,
    BenchRecord,
    CorpusEntry,
    CorpusSpec,
    InvalidChainError,
    SweepRanges,
    cell_seed,
    emit_report,
    gen_random,
    gen_sptm_favorable,
    optimization_degree,
    run_sweep,
)
import addchains.bench as bench

SMALL = SweepRanges(wm_k=range(1, 7), sptm_m=range(1, 16, 2), cwm_k=range(1, 6), cwm_s=range(0, 5),
                    asa_k=range(1, 8), asa_s=range(0, 6))


def test_corpus_spec_validation():
    for bad in ((0, 0.5, 1, 0), (8, 0.0, 1, 0), (8, 1.5, 1, 0), (8, 0.5, 0, 0)):
        with pytest.raises(ValueError):
            CorpusSpec(*bad)
    with pytest.raises(ValueError):
        CorpusSpec(8, 0.5, 1, 0, kind="other")


def test_random_corpus():
    assert gen_random(CorpusSpec(8, 1.0, 5, 3)) == [255] * 5
    spec = CorpusSpec(160, 0.5, 20, 42)
    first = gen_random(spec)
    assert first == gen_random(spec)
    assert all(e.bit_length() == 160 for e in first)
    assert gen_random(CorpusSpec(160, 0.5, 20, 43)) != first


def test_random_corpus_density():
    values = gen_random(CorpusSpec(160, 0.95, 50, 7))
    mean = sum(e.bit_count() for e in values) / len(values)
    # top bit forced, 159 Bernoulli(0.95) bits; 3 sigma of the mean over 50 draws
    expected = 1 + 159 * 0.95
    sigma = math.sqrt(159 * 0.95 * 0.05 / 50)
    assert abs(mean - expected) <= 3 * sigma


def test_cell_seed_is_stable_and_distinct():
    assert cell_seed(1, 160, 0.5) == cell_seed(1, 160, 0.5)
    assert len({cell_seed(1, b, p) for b in (160, 384) for p in (0.1, 0.5)}) == 4


@pytest.mark.parametrize("anchor", [True, False])
def test_sptm_favorable_corpus(anchor):
    spec = CorpusSpec(160, 0.5, 30, 11, "sptm-favorable")
    values = gen_sptm_favorable(spec, anchor_top=anchor)
    assert values == gen_sptm_favorable(spec, anchor_top=anchor)
    for e in values:
        assert e & 1 and e.bit_length() <= 160
        h = e.bit_count()
        # k + 1 disjoint copies of a window with 1 + h(v) set bits, k in 4..6
        assert any(h % (k + 1) == 0 and 2 <= h // (k + 1) <= k + 1 for k in (4, 5, 6))
    with pytest.raises(ValueError):
        gen_sptm_favorable(CorpusSpec(40, 0.5, 1, 0, "sptm-favorable"))
    with pytest.raises(ValueError):
        gen_random(spec)


def test_sptm_favorable_anchor_changes_corpus():
    spec = CorpusSpec(400, 0.5, 10, 5, "sptm-favorable")
    assert gen_sptm_favorable(spec) != gen_sptm_favorable(spec, anchor_top=False)


def test_optimization_degree():
    assert optimization_degree(202.06, 182.84) == pytest.approx(9.51, abs=0.005)
    assert optimization_degree(192.37, 187.89) == pytest.approx(2.33, abs=0.005)
    assert optimization_degree(5.0, 5.0) == 0
    with pytest.raises(ValueError):
        optimization_degree(0, 1)


def test_single_record():
    records = run_sweep([13], ["wm"], SMALL)
    assert len(records) == 1
    record = records[0]
    assert record.method == "wm" and record.e == 13 and record.r == record.elements - 1
    assert record.runtime_ms is None


def test_fig7_through_all_methods():
    records = {r.method: r for r in run_sweep([FIG7], bench.METHODS)}
    assert records["cwm-asa"].elements <= 34
    assert records["cwm-asa"].elements <= records["cwm"].elements
    n, h = FIG7.bit_length(), FIG7.bit_count()
    for r in records.values():
        assert r.r <= n + h - 2
    assert records["bm"].formula_ok


def test_sweep_invariants():
    corpus = [CorpusEntry(e, 64, 0.5) for e in gen_random(CorpusSpec(64, 0.5, 8, 1))]
    corpus += [CorpusEntry(e, 64, 0.9) for e in gen_random(CorpusSpec(64, 0.9, 8, 2))]
    ranges = SweepRanges(wm_k=range(1, 7), cwm_k=range(1, 7), cwm_s=range(0, 7),
                         asa_k=range(1, 7), asa_s=range(0, 7))
    records = run_sweep(corpus, bench.METHODS, ranges, timing=True)
    by = {}
    for r in records:
        by.setdefault(r.e, {})[r.method] = r
        assert r.r <= r.n + r.h - 2
        assert r.runtime_ms is not None and r.runtime_ms >= 0
        if r.method in ("wm", "cwm", "cwm-asa"):
            assert r.formula_ok is not None
    for methods in by.values():
        assert methods["cwm-asa"].r <= methods["cwm"].r <= methods["wm"].r


def test_sweep_rejects_unknown_method_and_invalid_chain(monkeypatch):
    with pytest.raises(ValueError):
        run_sweep([13], ["nope"])
    with pytest.raises(ValueError):
        run_sweep([0], ["bm"])
    from addchains.chain import AdditionChain

    monkeypatch.setattr(bench, "bm", lambda e: AdditionChain((1, 2, 5), None, e))
    with pytest.raises(InvalidChainError, match="bm"):
        run_sweep([5], ["bm"])


def test_ranges_validation():
    with pytest.raises(ValueError):
        SweepRanges(sptm_m=(2, 4))
    with pytest.raises(ValueError):
        SweepRanges(wm_k=())


def test_report_format(tmp_path):
    csv_text, json_text = emit_report([])
    assert csv_text == ",".join(CSV_COLUMNS) + "\n"
    corpus = [CorpusEntry(e, 32, p) for p in (0.9, 0.2) for e in gen_random(CorpusSpec(32, p, 3, 5))]
    records = run_sweep(corpus, ["wm", "cwm-asa", "bm"], SMALL)
    csv_text, json_text = emit_report(records, tmp_path / "r.csv", tmp_path / "r.json")
    assert (tmp_path / "r.csv").read_text() == csv_text
    rows = list(csv.DictReader(io.StringIO(csv_text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    keys = [(int(r["bits"]), float(r["p"]), int(r["e_hex"], 16), bench.METHODS.index(r["method"])) for r in rows]
    assert keys == sorted(keys)
    payload = json.loads(json_text)
    assert len(payload["records"]) == len(rows)
    summary = payload["summary"]
    assert set(summary["mean_length_by_p"]) == {"0.2", "0.9"}
    degrees = summary["optimization_degree_by_bits"]["32"]
    assert set(degrees) == {"bm", "cwm-asa"}
    # byte-identical on a rerun with the same inputs
    again = emit_report(run_sweep(corpus, ["wm", "cwm-asa", "bm"], SMALL))
    assert again == (csv_text, json_text)


def test_record_csv_row():
    r = BenchRecord("d", 4, None, "sptm", None, None, 1, 6, 5, None, None, None, None, None)
    assert r.csv_row() == ["d", "4", "", "sptm", "", "", "1", "6", "5", "", "", "", "", ""]
