"""Corpus generation, parameter sweeps and report emission.

Every integer in a corpus is run through each requested method over its
parameter range; the shortest result per (integer, method) becomes one
:class:`BenchRecord`.  Sweeps rank parameters with the arithmetic counts
(:func:`~addchains.cwm.chain_stats`, :func:`~addchains.sptm.sptm_count`)
and then build and validate the winning chain, so every recorded length
belongs to a chain that passed :func:`~addchains.chain.validate_chain`.

Random corpora come from numpy's PCG64 generator (``default_rng``); each
(bits, p) cell draws from its own stream derived from the run seed, so the
same integers feed every method and every run.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .asa import cwm_asa, cwm_asa_stats
from .chain import AdditionChain, validate_chain
from .classic import bm, wm
from .cwm import CwmParams, chain_stats, cwm, cwm_stats, extract_windows, DefaultPrefix
from .sptm import DEFAULT_M, sptm, sptm_count

__all__ = [
    "CSV_COLUMNS",
    "DEFAULT_BITS",
    "DEFAULT_P",
    "METHODS",
    "BenchRecord",
    "CorpusEntry",
    "CorpusSpec",
    "InvalidChainError",
    "SweepRanges",
    "cell_seed",
    "emit_report",
    "gen_random",
    "gen_sptm_favorable",
    "generate",
    "optimization_degree",
    "run_sweep",
    "summarize",
]

DEFAULT_BITS = (160, 384, 512, 1024, 2048, 4096)
DEFAULT_P = (0.1, 0.2, 0.4, 0.5, 0.6, 0.8, 0.9)
METHODS = ("bm", "wm", "sptm", "cwm", "cwm-asa")
PAPER_METHODS = ("wm", "sptm", "cwm", "cwm-asa")

CSV_COLUMNS = (
    "e_hex", "bits", "p", "method", "k", "s", "m", "elements", "r", "v", "u",
    "w0_bits", "formula_ok", "runtime_ms",
)


# -- corpora -------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusSpec:
    bits: int
    p: float
    count: int
    seed: int
    kind: str = "random"  # random | sptm-favorable

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise ValueError(f"bits must be positive, got {self.bits}")
        if not 0 < self.p <= 1:
            raise ValueError(f"p must be in (0, 1], got {self.p}")
        if self.count < 1:
            raise ValueError(f"count must be positive, got {self.count}")
        if self.kind not in ("random", "sptm-favorable"):
            raise ValueError(f"unknown corpus kind {self.kind!r}")


@dataclass(frozen=True)
class CorpusEntry:
    e: int
    bits: int
    p: Optional[float]


def cell_seed(seed: int, bits: int, p: float) -> int:
    """Seed for one (bits, p) cell, independent of which other cells are run."""
    ss = np.random.SeedSequence([seed, bits, int(round(p * 1_000_000))])
    return int(ss.generate_state(1, np.uint64)[0])


def _with_top_bit(lower: np.ndarray) -> int:
    # lower[0] is the bit right below the forced top bit
    return int("1" + "".join("1" if b else "0" for b in lower), 2)


def gen_random(spec: CorpusSpec) -> list[int]:
    """Integers of exactly ``spec.bits`` bits; each lower bit is 1 with probability ``p``."""
    if spec.kind != "random":
        raise ValueError("gen_random needs a corpus of kind 'random'")
    rng = np.random.default_rng(spec.seed)
    out = []
    for _ in range(spec.count):
        lower = rng.random(spec.bits - 1) < spec.p
        out.append(_with_top_bit(lower))
    return out


def gen_sptm_favorable(spec: CorpusSpec, anchor_top: bool = True, retries: int = 1000) -> list[int]:
    """Integers made of ``k + 1`` bit-disjoint copies of one sparse window.

    Per integer: ``k`` in 4..6 and ``s`` in 40..60 are drawn uniformly, the
    window is a 1, ``s`` zeros and a random ``k``-bit value, and the copies
    are placed at positions at least ``k`` apart.  With ``anchor_top`` the
    first copy sits at the top of the frame.  Trailing zeros are stripped.
    """
    if spec.kind != "sptm-favorable":
        raise ValueError("gen_sptm_favorable needs a corpus of kind 'sptm-favorable'")
    rng = np.random.default_rng(spec.seed)
    out = []
    for _ in range(spec.count):
        k = int(rng.integers(4, 7))
        s = int(rng.integers(40, 61))
        v = (1 << (k - 1)) | int(rng.integers(0, 1 << (k - 1)))
        w = (1 << (k + s)) + v
        width = w.bit_length()
        if width > spec.bits:
            raise ValueError(f"window of {width} bits does not fit in {spec.bits} bits")
        span = spec.bits - width  # highest LSB position
        for _ in range(retries):
            positions = [span] if anchor_top else []
            acc = w << span if anchor_top else 0
            ok = True
            while len(positions) < k + 1:
                placed = False
                for _ in range(retries):
                    pos = int(rng.integers(0, span + 1))
                    if all(abs(pos - q) >= k for q in positions) and not acc & (w << pos):
                        positions.append(pos)
                        acc |= w << pos
                        placed = True
                        break
                if not placed:
                    ok = False
                    break
            if ok:
                break
        else:
            raise RuntimeError(f"could not place {k + 1} copies in {spec.bits} bits")
        out.append(acc >> ((acc & -acc).bit_length() - 1))
    return out


def generate(spec: CorpusSpec, **kwargs) -> list[int]:
    if spec.kind == "random":
        return gen_random(spec)
    return gen_sptm_favorable(spec, **kwargs)


# -- sweeps ------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRanges:
    wm_k: tuple[int, ...] = tuple(range(1, 21))
    sptm_m: tuple[int, ...] = DEFAULT_M
    cwm_k: tuple[int, ...] = tuple(range(1, 11))
    cwm_s: tuple[int, ...] = tuple(range(0, 11))
    asa_k: tuple[int, ...] = tuple(range(1, 21))
    asa_s: tuple[int, ...] = tuple(range(0, 21))

    def __post_init__(self) -> None:
        for name in ("wm_k", "sptm_m", "cwm_k", "cwm_s", "asa_k", "asa_s"):
            values = getattr(self, name)
            if not values:
                raise ValueError(f"empty range {name}")
            object.__setattr__(self, name, tuple(sorted(set(values))))
        if any(m < 1 or m % 2 == 0 for m in self.sptm_m):
            raise ValueError("SPTM offsets must be positive odd integers")


@dataclass
class BenchRecord:
    e_hex: str
    bits: int
    p: Optional[float]
    method: str
    k: Optional[int]
    s: Optional[int]
    m: Optional[int]
    elements: int
    r: int
    v: Optional[int]
    u: Optional[int]
    w0_bits: Optional[int]
    formula_ok: Optional[bool]
    runtime_ms: Optional[float]
    n: int = 0
    h: int = 0
    first_window_savings: Optional[int] = None  # descriptive, CWM-ASA only

    @property
    def e(self) -> int:
        return int(self.e_hex, 16)

    def csv_row(self) -> list[str]:
        out = []
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            if value is None:
                out.append("")
            elif isinstance(value, bool):
                out.append("true" if value else "false")
            elif isinstance(value, float):
                out.append(repr(value))
            else:
                out.append(str(value))
        return out


class InvalidChainError(RuntimeError):
    def __init__(self, method: str, params: dict, e: int, reason: str) -> None:
        super().__init__(f"{method} {params} produced an invalid chain for {e:#x}: {reason}")
        self.method, self.params, self.e = method, params, e


def _best(cells, count: Callable):
    best = None
    for cell in cells:
        result = count(cell)
        if best is None or result[0] < best[1][0]:
            best = (cell, result)
    return best


def _record(entry: CorpusEntry, method: str, chain: AdditionChain, expected: int, params: dict,
            **extra) -> BenchRecord:
    e = entry.e
    report = validate_chain(chain)
    if not report.ok or chain.target != e:
        raise InvalidChainError(method, params, e, report.reason or "wrong target")
    if len(chain) != expected:
        raise InvalidChainError(method, params, e,
                                f"built {len(chain)} elements, counted {expected}")
    return BenchRecord(
        e_hex=format(e, "x"), bits=entry.bits, p=entry.p, method=method,
        k=params.get("k"), s=params.get("s"), m=params.get("m"),
        elements=len(chain), r=chain.length, runtime_ms=None,
        n=e.bit_length(), h=e.bit_count(), **extra,
    )


def _sweep_bm(entry: CorpusEntry, ranges: SweepRanges) -> BenchRecord:
    e = entry.e
    expected = e.bit_length() + e.bit_count() - 1
    return _record(entry, "bm", bm(e), expected, {}, v=None, u=None, w0_bits=None,
                   formula_ok=expected == e.bit_length() + e.bit_count() - 1)


def _sweep_wm(entry: CorpusEntry, ranges: SweepRanges) -> BenchRecord:
    e = entry.e

    def count(k):
        windows = extract_windows(e, CwmParams(k, 0))
        return chain_stats(DefaultPrefix(CwmParams(k, 0)), windows, e).elements, windows

    k, (elements, windows) = _best(ranges.wm_k, count)
    stats = chain_stats(DefaultPrefix(CwmParams(k, 0)), windows, e)
    return _record(entry, "wm", wm(k, e), elements, {"k": k}, v=stats.v, u=stats.u,
                   w0_bits=stats.w0.bit_length(), formula_ok=stats.formula_holds)


def _sweep_sptm(entry: CorpusEntry, ranges: SweepRanges) -> BenchRecord:
    e = entry.e
    m, (elements, _) = _best(ranges.sptm_m, lambda m: sptm_count(m, e))
    return _record(entry, "sptm", sptm(m, e), elements, {"m": m}, v=None, u=None,
                   w0_bits=None, formula_ok=None)


def _grid(ks, ss):
    return [CwmParams(k, s) for k in ks for s in ss]


def _sweep_cwm(entry: CorpusEntry, ranges: SweepRanges) -> BenchRecord:
    e = entry.e

    def count(p):
        stats = cwm_stats(p, e)
        return stats.elements, stats

    params, (elements, stats) = _best(_grid(ranges.cwm_k, ranges.cwm_s), count)
    return _record(entry, "cwm", cwm(params, e), elements, {"k": params.k, "s": params.s},
                   v=stats.v, u=stats.u, w0_bits=stats.w0.bit_length(),
                   formula_ok=stats.formula_holds)


def _sweep_cwm_asa(entry: CorpusEntry, ranges: SweepRanges) -> BenchRecord:
    e = entry.e

    def count(p):
        result = cwm_asa_stats(p, e)
        return result.stats.elements, result

    params, (elements, result) = _best(_grid(ranges.asa_k, ranges.asa_s), count)
    stats = result.stats
    return _record(entry, "cwm-asa", cwm_asa(params, e), elements,
                   {"k": params.k, "s": params.s}, v=stats.v, u=stats.u,
                   w0_bits=stats.w0.bit_length(), formula_ok=stats.formula_holds,
                   first_window_savings=result.first_window_savings())


_SWEEPS = {
    "bm": _sweep_bm,
    "wm": _sweep_wm,
    "sptm": _sweep_sptm,
    "cwm": _sweep_cwm,
    "cwm-asa": _sweep_cwm_asa,
}


def _entries(corpus: Iterable) -> list[CorpusEntry]:
    out = []
    for item in corpus:
        if isinstance(item, CorpusEntry):
            out.append(item)
        else:
            e = int(item)
            if e < 1:
                raise ValueError(f"corpus values must be positive, got {e}")
            out.append(CorpusEntry(e, e.bit_length(), None))
    return out


def run_sweep(corpus: Iterable, methods: Sequence[str] = PAPER_METHODS,
              ranges: Optional[SweepRanges] = None, timing: bool = False) -> list[BenchRecord]:
    """Best-over-range record for each integer and method.

    ``corpus`` holds :class:`CorpusEntry` items or plain integers.  With
    ``timing`` the wall time of each (integer, method) sweep is recorded,
    which makes reports differ between runs.
    """
    ranges = ranges or SweepRanges()
    unknown = [m for m in methods if m not in _SWEEPS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}; choose from {', '.join(METHODS)}")
    records = []
    for entry in _entries(corpus):
        for method in methods:
            start = time.perf_counter()
            record = _SWEEPS[method](entry, ranges)
            if timing:
                record.runtime_ms = round((time.perf_counter() - start) * 1000, 3)
            records.append(record)
    return records


# -- aggregation and reports ---------------------------------------------------------

def optimization_degree(a: float, b: float) -> float:
    """Percentage by which mean ``b`` improves on the reference mean ``a``."""
    if a <= 0:
        raise ValueError("reference mean must be positive")
    return (a - b) / a * 100


def _sort_key(r: BenchRecord):
    return (r.bits, -1.0 if r.p is None else r.p, r.e, METHODS.index(r.method))


def _means(records: Iterable[BenchRecord], key: Callable) -> dict:
    groups: dict = {}
    for r in records:
        groups.setdefault(key(r), {}).setdefault(r.method, []).append(r.r)
    return {g: {m: sum(v) / len(v) for m, v in sorted(ms.items(), key=lambda kv: METHODS.index(kv[0]))}
            for g, ms in sorted(groups.items(), key=lambda kv: (kv[0] is None, kv[0]))}


def summarize(records: Iterable[BenchRecord], reference: str = "wm") -> dict:
    """Mean lengths by bit-length and by density, and degrees against ``reference``."""
    records = list(records)
    by_bits = _means(records, lambda r: r.bits)
    by_p = _means(records, lambda r: r.p)
    degrees = {}
    for bits, means in by_bits.items():
        if means.get(reference, 0) > 0:
            degrees[bits] = {m: optimization_degree(means[reference], v)
                             for m, v in means.items() if m != reference}
    return {
        "reference": reference,
        "mean_length_by_bits": {str(b): v for b, v in by_bits.items()},
        "mean_length_by_p": {("none" if p is None else repr(p)): v for p, v in by_p.items()},
        "optimization_degree_by_bits": {str(b): v for b, v in degrees.items()},
    }


def emit_report(records: Iterable[BenchRecord], csv_path=None, json_path=None) -> tuple[str, str]:
    """CSV and JSON texts for ``records``, also written to the given paths."""
    records = sorted(records, key=_sort_key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    csv_text = buf.getvalue()
    payload = {
        "records": [asdict(r) for r in records],
        "summary": summarize(records),
    }
    json_text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            fh.write(csv_text)
    if json_path is not None:
        with open(json_path, "w") as fh:
            fh.write(json_text)
    return csv_text, json_text
