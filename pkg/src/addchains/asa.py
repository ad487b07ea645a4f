"""Addition sequences and the cross window method built on them.

:func:`asa` produces a short chain that contains every requested value.  It
walks the values from the top down: the current value ``y`` is written as
``t * x + C`` against its predecessor ``x``, the multiples ``x * bm(t)`` and
the remainder ``C`` are inserted, and the walk moves on to the next value
below ``y``.  :func:`cwm_asa` swaps such a sequence in for the default
cross-window pre-computation whenever it is shorter.
"""

from __future__ import annotations

import heapq
from functools import lru_cache
from dataclasses import dataclass
from typing import Iterable, Optional

from .chain import AdditionChain
from .classic import bm
from .cwm import (
    ChainStats,
    CwmParams,
    DefaultPrefix,
    Precomputation,
    WindowMap,
    _grid,
    build_chain,
    chain_stats,
    cwm_precompute,
    extract_windows,
)

__all__ = [
    "AdditionSequence",
    "AsaResult",
    "SequencePrefix",
    "asa",
    "asa_prefix",
    "best_cwm_asa_params",
    "cwm_asa",
    "cwm_asa_best",
    "cwm_asa_stats",
]


@dataclass(frozen=True)
class AdditionSequence:
    values: tuple[int, ...]
    targets: frozenset
    parents: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.values)

    def as_chain(self) -> AdditionChain:
        return AdditionChain(self.values, self.parents, self.values[-1])


@lru_cache(maxsize=4096)
def _bm_steps(t: int) -> tuple[tuple[int, int, int], ...]:
    """``(value, left, right)`` for every step of ``bm(t)``."""
    base = bm(t)
    return tuple((a, base.elements[i], base.elements[j])
                 for (i, j), a in zip(base.parents, base.elements[1:]))


def _walk(targets: frozenset, support: Optional[dict]) -> set[int]:
    present = set(targets) | {1, 2}
    if support is not None:
        support[2] = (1, 1)
    heap = [-v for v in present]
    heapq.heapify(heap)
    while heap:
        y = -heapq.heappop(heap)
        if y <= 2:
            break
        x = -heap[0]
        t, rest = divmod(y, x)
        for a, left, right in _bm_steps(t):
            value = a * x
            if support is not None and value not in support:
                support[value] = (left * x, right * x)
            if value not in present:
                present.add(value)
                heapq.heappush(heap, -value)
        if rest:
            if rest not in present:
                present.add(rest)
                heapq.heappush(heap, -rest)
            if support is not None:
                support.setdefault(y, (t * x, rest))
    return present


def _targets(targets: Iterable[int]) -> frozenset:
    targets = frozenset(int(t) for t in targets)
    if any(t < 1 for t in targets):
        raise ValueError("targets must be positive")
    return targets


def asa(targets: Iterable[int]) -> AdditionSequence:
    """Addition sequence containing ``targets``, built top-down.

    The largest pending value ``y`` is split against the next one ``x`` as
    ``y = t * x + C``; the multiples ``x * bm(t)`` and ``C`` become pending.
    """
    targets = _targets(targets)
    support: dict[int, tuple[int, int]] = {}
    values = tuple(sorted(_walk(targets, support)))
    where = {v: idx for idx, v in enumerate(values)}
    parents = tuple((where[support[v][0]], where[support[v][1]]) for v in values[1:])
    return AdditionSequence(values, targets, parents)


class SequencePrefix:
    """Value-only view of an addition sequence, enough for element counting."""

    __slots__ = ("_where", "u", "top")

    def __init__(self, values: Iterable[int]) -> None:
        ordered = sorted(values)
        self._where = {v: i for i, v in enumerate(ordered)}
        self.u = len(ordered)
        self.top = ordered[-1]

    def __len__(self) -> int:
        return self.u

    def __contains__(self, value: int) -> bool:
        return value in self._where

    def index(self, value: int) -> Optional[int]:
        return self._where.get(value)


def asa_prefix(targets: Iterable[int]) -> SequencePrefix:
    """The values :func:`asa` would produce, without provenance."""
    return SequencePrefix(_walk(_targets(targets), None))


def _asa_prefix(windows: WindowMap) -> Precomputation:
    return Precomputation.from_chain(asa(windows.values()).as_chain())


@dataclass(frozen=True)
class AsaResult:
    stats: ChainStats
    used_asa: bool
    windows: WindowMap
    prefix: object  # Precomputation or DefaultPrefix

    def first_window_savings(self) -> int:
        """Binary-method cost of the first window minus the steps the prefix spends on it."""
        w0 = self.windows.w0
        return w0.bit_length() + w0.bit_count() - 2 - self.prefix.index(w0)


def cwm_asa_stats(params: CwmParams, e: int, windows: Optional[WindowMap] = None) -> AsaResult:
    """Accounting for :func:`cwm_asa`.

    The sequence prefix replaces the default one only when the finished
    chain gets strictly shorter; ties keep the default.
    """
    if windows is None:
        windows = extract_windows(e, params)
    default = DefaultPrefix(params)
    base = chain_stats(default, windows, e)
    seq = asa_prefix(windows.values())
    stats = chain_stats(seq, windows, e)
    if stats.elements < base.elements:
        return AsaResult(stats, True, windows, seq)
    return AsaResult(base, False, windows, default)


def cwm_asa(params: CwmParams, e: int) -> AdditionChain:
    """Cross window method with the addition sequence of the used windows as prefix when that is shorter."""
    result = cwm_asa_stats(params, e)
    pre = _asa_prefix(result.windows) if result.used_asa else cwm_precompute(params)
    return build_chain(pre, result.windows, e)


def best_cwm_asa_params(e: int, k_range: Iterable[int] = range(1, 21),
                        s_range: Iterable[int] = range(0, 21)) -> tuple[CwmParams, AsaResult]:
    best = None
    for params in _grid(k_range, s_range):
        result = cwm_asa_stats(params, e)
        if best is None or result.stats.elements < best[1].stats.elements:
            best = (params, result)
    return best


def cwm_asa_best(e: int, k_range: Iterable[int] = range(1, 21),
                 s_range: Iterable[int] = range(0, 21)) -> AdditionChain:
    params, _ = best_cwm_asa_params(e, k_range, s_range)
    return cwm_asa(params, e)
