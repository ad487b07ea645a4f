"""Exact shortest addition chains for small integers.

:func:`shortest_length` runs an iterative-deepening depth-first search over
general (not only star) ascending chains.  The depth bound starts at
``ceil(log2 e)`` and grows by one until a chain is found; at each node the
search gives up when no continuation of the remaining depth can reach ``e``.

Pruning used at each node, with ``left`` steps still available:

* the last element doubled ``left`` times must reach ``e``;
* a chain whose largest Hamming weight is ``M`` needs at least
  ``ceil(log2(h(e) / M))`` non-doubling steps, and the largest value
  reachable with that many non-doubling steps must still reach ``e``;
* candidates must be at least ``ceil(e / 2**(left - 1))``;
* the last one or two steps are solved directly by lookup.

Candidates at each level are visited in descending order, duplicates
removed, so the witness is the first minimum chain in that order.

The kernel is compiled with numba and works on int64, which the cap keeps
far out of overflow range.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from numba import njit

from .chain import AdditionChain

__all__ = [
    "DEFAULT_CAP",
    "FULL_CAP",
    "GapStats",
    "OracleCapError",
    "OracleTable",
    "gap_stats",
    "shortest_chain",
    "shortest_length",
    "table_upto",
]

DEFAULT_CAP = 1 << 20
FULL_CAP = 1 << 22

_MAXD = 64
_CAP = 4096  # candidates kept per level


class OracleCapError(ValueError):
    """Raised instead of starting a search above the configured cap."""


@njit(cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def _reach(last, second, steps, q):
    # Largest value after `steps` steps of which `q` are not doublings.
    if q > steps:
        return 0
    a, b = last, second
    for _ in range(q):
        a, b = a + b, a
    best = a << (steps - q)
    if 0 < q < steps:
        a, b = 2 * last, last
        for _ in range(q):
            a, b = a + b, a
        v = a << (steps - q - 1)
        if v > best:
            best = v
    return best


@njit(cache=True)
def _contains(chain, hi, r):
    lo = 0
    while lo <= hi:
        mid = (lo + hi) >> 1
        if chain[mid] == r:
            return True
        if chain[mid] < r:
            lo = mid + 1
        else:
            hi = mid - 1
    return False


@njit(cache=True)
def _feasible(e, d, chain, pops, cands, ncand, pos):
    # Is there an ascending chain of exactly d steps ending at e?  On success
    # chain[0..d] holds it.
    chain[0] = 1
    pops[0] = 1
    if d == 0:
        return e == 1
    ne = _popcount(e)
    level = 0
    fresh = True
    while True:
        if fresh:
            last = chain[level]
            left = d - level
            nc = 0
            ok = True
            if left == 1:
                for x in range(level + 1):
                    if _contains(chain, level, e - chain[x]):
                        chain[level + 1] = e
                        return True
                ok = False
            else:
                if (last << left) == e:
                    for q in range(level + 1, d + 1):
                        chain[q] = chain[q - 1] * 2
                    return True
                if (last << left) < e:
                    ok = False
                else:
                    M = pops[level]
                    qmin = 0
                    while (M << qmin) < ne:
                        qmin += 1
                    if qmin == 0:
                        qmin = 1
                    if qmin > left:
                        ok = False
                    else:
                        second = chain[level - 1] if level > 0 else 0
                        top = 0
                        for q in range(qmin, left + 1):
                            v = _reach(last, second, left, q)
                            if v > top:
                                top = v
                        if top < e:
                            ok = False
            if ok and left == 2:
                need = (e + 1) >> 1
                for x in range(level, -1, -1):
                    ax = chain[x]
                    if ax + ax <= last or ax + ax < need:
                        break
                    for y in range(x, -1, -1):
                        c = ax + chain[y]
                        if c <= last or c < need:
                            break
                        if c > e:
                            continue
                        r = e - c
                        if r == c or _contains(chain, level, r):
                            chain[level + 1] = c
                            chain[level + 2] = e
                            return True
                ok = False
            if ok:
                need = (e + (1 << (left - 1)) - 1) >> (left - 1)
                base = level * _CAP
                for x in range(level, -1, -1):
                    ax = chain[x]
                    if ax + ax <= last or ax + ax < need:
                        break
                    for y in range(x, -1, -1):
                        c = ax + chain[y]
                        if c <= last or c < need:
                            break
                        if c <= e:
                            # descending insertion without duplicates
                            p = nc
                            dup = False
                            while p > 0:
                                v = cands[base + p - 1]
                                if v == c:
                                    dup = True
                                    break
                                if v > c:
                                    break
                                p -= 1
                            if not dup:
                                for q in range(nc, p, -1):
                                    cands[base + q] = cands[base + q - 1]
                                cands[base + p] = c
                                nc += 1
            ncand[level] = nc
            pos[level] = 0
            fresh = False
        if pos[level] < ncand[level]:
            c = cands[level * _CAP + pos[level]]
            pos[level] += 1
            chain[level + 1] = c
            pc = _popcount(c)
            pops[level + 1] = pc if pc > pops[level] else pops[level]
            if c == e:
                if level + 1 == d:
                    return True
                continue
            level += 1
            fresh = True
        else:
            if level == 0:
                return False
            level -= 1


class _Workspace:
    __slots__ = ("chain", "pops", "cands", "ncand", "pos")

    def __init__(self) -> None:
        self.chain = np.zeros(_MAXD + 1, np.int64)
        self.pops = np.zeros(_MAXD + 1, np.int64)
        self.cands = np.zeros((_MAXD + 1) * _CAP, np.int64)
        self.ncand = np.zeros(_MAXD + 1, np.int64)
        self.pos = np.zeros(_MAXD + 1, np.int64)

    def search(self, e: int) -> tuple[int, tuple[int, ...]]:
        if e == 1:
            return 0, (1,)
        d = (e - 1).bit_length()  # ceil(log2 e)
        upper = e.bit_length() + e.bit_count() - 2
        while d <= upper:
            if _feasible(e, d, self.chain, self.pops, self.cands, self.ncand, self.pos):
                return d, tuple(int(v) for v in self.chain[: d + 1])
            d += 1
        raise AssertionError(f"search for {e} exceeded the binary-method bound")


_workspace: Optional[_Workspace] = None


def _check_cap(e: int, cap: int) -> None:
    if e < 1:
        raise ValueError(f"exponent must be positive, got {e}")
    if cap > FULL_CAP:
        raise OracleCapError(f"cap {cap} exceeds the supported maximum {FULL_CAP}")
    if e > cap:
        raise OracleCapError(f"{e} exceeds the oracle cap {cap}; raise the cap explicitly to search it")


def _search(e: int) -> tuple[int, tuple[int, ...]]:
    global _workspace
    if _workspace is None:
        _workspace = _Workspace()
    return _workspace.search(e)


def shortest_chain(e: int, cap: int = DEFAULT_CAP) -> AdditionChain:
    """One shortest addition chain for ``e`` (provenance derived by search)."""
    _check_cap(e, cap)
    _, witness = _search(e)
    return AdditionChain.from_values(witness, e)


def shortest_length(e: int, cap: int = DEFAULT_CAP) -> tuple[int, AdditionChain]:
    """``(l(e), witness)`` where the witness has ``l(e) + 1`` elements."""
    chain = shortest_chain(e, cap)
    return chain.length, chain


# -- tables ------------------------------------------------------------------

@dataclass
class OracleTable:
    limit: int
    lengths: list[int]  # lengths[e] = l(e); index 0 unused

    def __getitem__(self, e: int) -> int:
        if not 1 <= e <= self.limit:
            raise KeyError(e)
        return self.lengths[e]

    def __contains__(self, e: int) -> bool:
        return 1 <= e <= self.limit

    def items(self):
        return ((e, self.lengths[e]) for e in range(1, self.limit + 1))

    def as_dict(self) -> dict[int, int]:
        return dict(self.items())

    def extend(self, limit: int, cap: int = DEFAULT_CAP) -> "OracleTable":
        """Grow the table in place up to ``limit``; existing entries are kept."""
        _check_cap(limit, cap)
        for e in range(self.limit + 1, limit + 1):
            self.lengths.append(_search(e)[0])
        self.limit = max(self.limit, limit)
        return self

    def truncated(self, limit: int) -> "OracleTable":
        limit = min(limit, self.limit)
        return OracleTable(limit, self.lengths[: limit + 1])

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["e", "l"])
            writer.writerows(self.items())

    @classmethod
    def load(cls, path: str | os.PathLike) -> "OracleTable":
        """Read a CSV ``e,l`` table; entries must cover ``1..limit`` without holes."""
        lengths = [0]
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["e", "l"]:
                raise ValueError(f"{path}: expected header 'e,l', got {header}")
            for lineno, row in enumerate(reader, 2):
                if not row:
                    continue
                e, l = int(row[0]), int(row[1])
                if e != len(lengths):
                    raise ValueError(f"{path}:{lineno}: expected e={len(lengths)}, got {e}")
                lengths.append(l)
        return cls(len(lengths) - 1, lengths)


def table_upto(limit: int, cap: int = DEFAULT_CAP, cache: Optional[str | os.PathLike] = None) -> OracleTable:
    """``l(e)`` for ``1 <= e <= limit``.

    With ``cache``, an existing table file is reused and extended, and the
    result is written back when anything new was computed.
    """
    if limit < 1:
        raise ValueError(f"limit must be positive, got {limit}")
    _check_cap(limit, cap)
    table = OracleTable(0, [0])
    if cache is not None and os.path.exists(cache):
        table = OracleTable.load(cache)
    if table.limit >= limit:
        return table.truncated(limit)
    table.extend(limit, cap)
    if cache is not None:
        table.save(cache)
    return table


# -- gap statistics ------------------------------------------------------------

@dataclass(frozen=True)
class GapStats:
    counts: dict[int, int]
    total: int
    mean: float

    @property
    def proportions(self) -> dict[int, float]:
        return {g: c / self.total for g, c in self.counts.items()}

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "mean": self.mean,
            "counts": {str(g): c for g, c in sorted(self.counts.items())},
            "proportions": {str(g): p for g, p in sorted(self.proportions.items())},
        }


def gap_stats(results: Iterable[tuple[int, int]], table: OracleTable) -> GapStats:
    """Histogram of ``length - l(e)`` over ``(e, length)`` pairs; lengths are step counts."""
    counts: dict[int, int] = {}
    total = 0
    gap_sum = 0
    for e, length in results:
        if e not in table:
            raise ValueError(f"{e} is outside the oracle table (limit {table.limit})")
        gap = length - table[e]
        if gap < 0:
            raise AssertionError(f"chain of length {length} for {e} beats l(e) = {table[e]}")
        counts[gap] = counts.get(gap, 0) + 1
        total += 1
        gap_sum += gap
    if not total:
        raise ValueError("no results")
    return GapStats(dict(sorted(counts.items())), total, gap_sum / total)
