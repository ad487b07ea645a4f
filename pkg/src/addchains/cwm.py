"""Cross window method.

Windows are read MSB first from a residue.  A long window keeps its top and
bottom parts and zeroes an ``s``-bit gap anchored ``R`` bits above its lowest
bit, so the gap bits stay in the residue and are picked up by later windows.
Each window is recorded at its LSB position and cleared from the residue by
highest-bit-aligned subtraction; the chain is then rebuilt by doubling from
the highest recorded window and adding the window recorded at each position.

The pre-computation holds ``a || 0_s || b`` for ``1 <= a < 2**L`` and odd
``1 <= b < 2**R`` together with the ladder and the powers that produce them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .chain import AdditionChain, ChainBuilder
from .classic import MAX_WINDOW, odd_ladder

__all__ = [
    "MAX_GAP",
    "ChainStats",
    "CwmParams",
    "DefaultPrefix",
    "Precomputation",
    "WindowMap",
    "best_cwm_params",
    "build_chain",
    "chain_stats",
    "cwm",
    "cwm_best",
    "cwm_precompute",
    "cwm_stats",
    "extract_windows",
    "hba_subtract",
    "is_window_value",
]

MAX_GAP = 64


@dataclass(frozen=True)
class CwmParams:
    """Window length ``k`` and gap length ``s``; ``s = 0`` is the plain window method."""

    k: int
    s: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= MAX_WINDOW:
            raise ValueError(f"k must be in 1..{MAX_WINDOW}, got {self.k}")
        if not 0 <= self.s <= MAX_GAP:
            raise ValueError(f"s must be in 0..{MAX_GAP}, got {self.s}")

    @property
    def R(self) -> int:
        return (self.k + 1) // 2 if self.s else 0

    @property
    def L(self) -> int:
        return self.k - self.R

    @property
    def beta(self) -> int:
        return 1 if self.s else 0

    @property
    def has_duplicate(self) -> bool:
        """The gap powers start at ``2**R``; for ``R = 1`` that is the ladder's 2."""
        return self.s >= 1 and self.R == 1

    def formula_size(self) -> int:
        """Pre-computation size as counted before removing duplicates."""
        return (1 << (self.k - 1)) + self.s + 1 + self.beta


# -- pre-computation -------------------------------------------------------

class DefaultPrefix:
    """Arithmetic view of the default pre-computation (no materialization).

    Supports ``len``, membership, element position and the largest value,
    which is all the chain-length accounting needs.  :meth:`materialize`
    builds the actual chain.
    """

    def __init__(self, params: CwmParams) -> None:
        self.params = params
        k, s, R, L = params.k, params.s, params.R, params.L
        if s == 0:
            self.u = (1 << (k - 1)) + 1
            self.top = (1 << k) - 1 if k > 1 else 2
            return
        self._ladder = (1 << (R - 1)) + 1
        self._powers = s + 1 - (1 if R == 1 else 0)
        self._shift = R + s
        self.u = self._ladder + self._powers + ((1 << L) - 1) * (1 << (R - 1))
        if L:
            self.top = (((1 << L) - 1) << self._shift) + (1 << R) - 1
        else:
            self.top = 1 << self._shift

    def __len__(self) -> int:
        return self.u

    def __contains__(self, value: int) -> bool:
        return self.index(value) is not None

    def index(self, value: int) -> Optional[int]:
        if value == 1:
            return 0
        if value == 2:
            return 1
        if value < 1 or value > self.top:
            return None
        p = self.params
        if p.s == 0:
            return (value - 1) // 2 + 1 if value & 1 else None
        R = p.R
        if value & 1 == 0:
            if value & (value - 1):
                return None
            e = value.bit_length() - 1
            if R <= e <= R + p.s:
                return self._ladder + (e - R) - (1 if R == 1 else 0)
            return None
        if value < (1 << R):
            return (value - 1) // 2 + 1
        a, b = value >> self._shift, value & ((1 << self._shift) - 1)
        if b >= (1 << R) or not 1 <= a < (1 << p.L):
            return None
        return self._ladder + self._powers + (a - 1) * (1 << (R - 1)) + (b - 1) // 2

    def materialize(self) -> "Precomputation":
        return cwm_precompute(self.params)


@dataclass(frozen=True)
class Precomputation:
    """A materialized chain prefix holding every window value that may be added."""

    chain: AdditionChain
    members: frozenset = field(repr=False)
    beta: int = 0

    @property
    def u(self) -> int:
        return len(self.chain.elements)

    @property
    def top(self) -> int:
        return max(self.chain.elements)

    def __len__(self) -> int:
        return self.u

    def __contains__(self, value: int) -> bool:
        return value in self.members

    def index(self, value: int) -> Optional[int]:
        if value not in self.members:
            return None
        return self.chain.elements.index(value)

    @classmethod
    def from_chain(cls, chain: AdditionChain, beta: int = 0) -> "Precomputation":
        return cls(chain, frozenset(chain.elements), beta)


def cwm_precompute(params: CwmParams) -> Precomputation:
    k, s, R, L = params.k, params.s, params.R, params.L
    b = ChainBuilder()
    if s == 0:
        odd_ladder(b, (1 << k) - 1)
        return Precomputation.from_chain(b.build(), 0)
    odd_ladder(b, (1 << R) - 1)
    if R > 1:
        b.push(b.index((1 << R) - 1), 0)
    for _ in range(s):
        b.push(b.last, b.last)
    gap = 1 << (R + s)
    gap_idx = b.index(gap)
    for a in range(1, 1 << L):
        for low in range(1, 1 << R, 2):
            if a == 1:
                b.push(gap_idx, b.index(low))
            else:
                b.push(b.index(((a - 1) << (R + s)) + low), gap_idx)
    return Precomputation.from_chain(b.build(), 1)


def is_window_value(w: int, params: CwmParams) -> bool:
    """Whether ``w`` is an odd value of the form the pre-computation provides."""
    if w < 1 or w & 1 == 0:
        return False
    if params.s == 0:
        return w < (1 << params.k)
    R, s = params.R, params.s
    if w < (1 << R):
        return True
    if (w >> R) & ((1 << s) - 1):
        return False
    return 1 <= (w >> (R + s)) < (1 << params.L)


# -- window extraction -----------------------------------------------------

def hba_subtract(e: int, w: int) -> int:
    """Subtract ``w`` after aligning its top set bit with the top set bit of ``e``."""
    if w < 1 or e < w:
        raise ValueError("need e >= w >= 1")
    shifted = w << (e.bit_length() - w.bit_length())
    if shifted & e != shifted:
        raise ValueError(f"aligned window {shifted:b} is not contained in {e:b}")
    return e - shifted


@dataclass(frozen=True)
class WindowMap:
    """Recorded windows keyed by LSB position.

    ``w0`` is the first (most significant) window; ``j_max`` is the highest
    recorded position, where construction starts.  A window embedded in the
    gap of ``w0`` can sit above ``w0``'s own position.
    """

    entries: dict[int, int]  # lsb position -> window value
    w0: int
    w0_pos: int

    @property
    def j_max(self) -> int:
        return max(self.entries)

    @property
    def overhang(self) -> int:
        """Extra doublings caused by windows recorded above ``w0``."""
        return self.j_max - self.w0_pos

    @property
    def v(self) -> int:
        return len(self.entries)

    def values(self) -> set[int]:
        return set(self.entries.values())

    def total(self) -> int:
        return sum(w << j for j, w in self.entries.items())

    def to_json(self) -> dict[str, int]:
        return {str(j): w for j, w in sorted(self.entries.items(), reverse=True)}


def _top_window(residue: int, top: int, width: int) -> tuple[int, int]:
    """Longest bit string of at most ``width`` bits from ``top`` down that ends in a 1."""
    lo = max(0, top - width + 1)
    chunk = residue >> lo
    tz = (chunk & -chunk).bit_length() - 1
    return chunk >> tz, lo + tz


def extract_windows(e: int, params: CwmParams, trace: Optional[list] = None) -> WindowMap:
    """Split ``e`` into recorded windows.  ``trace`` collects the residues if given."""
    if e < 1:
        raise ValueError(f"exponent must be positive, got {e}")
    R, s = params.R, params.s
    span = params.k + s
    gap_mask = ((1 << s) - 1) << R
    entries: dict[int, int] = {}
    first = None
    residue = e
    while residue:
        i = residue.bit_length() - 1
        w, j = _top_window(residue, i, span)
        width = i - j + 1
        if s and width > R:
            if width <= R + s:
                w, j = _top_window(residue, i, R)
            else:
                w &= ~gap_mask
        entries[j] = w
        if first is None:
            first = (w, j)
        residue -= w << j
        if trace is not None:
            trace.append(residue)
    return WindowMap(entries, first[0], first[1])


# -- chain construction ----------------------------------------------------

@dataclass(frozen=True)
class ChainStats:
    """Element accounting for a prefix + window construction."""

    elements: int
    u: int
    v: int
    n: int
    w0: int
    collisions: int  # constructed values the prefix already held
    truncated: bool  # e itself was in the prefix
    overhang: int = 0  # doublings spent above the first window's position

    @property
    def formula_holds(self) -> bool:
        return self.elements == self.formula()

    @property
    def r(self) -> int:
        return self.elements - 1

    def formula(self) -> int:
        """``u + n(e) - n(w0) + v - 1``: one doubling per bit below ``w0``, one addition per later window."""
        return self.u + self.n - self.w0.bit_length() + self.v - 1


Prefix = Union[Precomputation, DefaultPrefix]


def chain_stats(prefix: Prefix, windows: WindowMap, e: int) -> ChainStats:
    """Element count of :func:`build_chain` without building the chain."""
    n = e.bit_length()
    if e <= prefix.top and e in prefix:
        return ChainStats(prefix.index(e) + 1, prefix.u, windows.v, n, windows.w0, 0, True,
                          windows.overhang)
    top = prefix.top
    entries = windows.entries
    acc = entries[windows.j_max]
    collisions = 0
    j = windows.j_max - 1
    while j >= 0 and acc <= top:
        acc <<= 1
        if acc <= top and acc in prefix:
            collisions += 1
        w = entries.get(j)
        if w is not None:
            acc += w
            if acc <= top and acc in prefix:
                collisions += 1
        j -= 1
    elements = prefix.u + windows.j_max + windows.v - 1 - collisions
    return ChainStats(elements, prefix.u, windows.v, n, windows.w0, collisions, False,
                      windows.overhang)


def build_chain(pre: Precomputation, windows: WindowMap, e: int) -> AdditionChain:
    """Append the doubling/adding schedule for ``windows`` to ``pre``.

    A constructed value already present in the prefix is reused instead of
    appended; if ``e`` itself is pre-computed the prefix is cut after it.
    """
    missing = [w for w in windows.values() if w not in pre]
    if missing:
        raise ValueError(f"window values {sorted(missing)} are not in the pre-computation")
    if windows.total() != e:
        raise ValueError("windows do not decompose e")
    b = ChainBuilder.from_chain(pre.chain)
    if e in b:
        b.truncate(b.index(e) + 1)
        return b.build(e)
    entries = windows.entries
    acc = b.index(entries[windows.j_max])
    for j in range(windows.j_max - 1, -1, -1):
        acc = b.reuse_or_push(acc, acc)
        w = entries.get(j)
        if w is not None:
            acc = b.reuse_or_push(acc, b.index(w))
    return b.build(e)


def cwm(params: CwmParams, e: int) -> AdditionChain:
    return build_chain(cwm_precompute(params), extract_windows(e, params), e)


def cwm_stats(params: CwmParams, e: int, windows: Optional[WindowMap] = None) -> ChainStats:
    if windows is None:
        windows = extract_windows(e, params)
    return chain_stats(DefaultPrefix(params), windows, e)


def _grid(k_range: Iterable[int], s_range: Iterable[int]) -> list[CwmParams]:
    cells = [CwmParams(k, s) for k in k_range for s in s_range]
    if not cells:
        raise ValueError("empty parameter grid")
    return sorted(cells, key=lambda p: (p.k, p.s))


def best_cwm_params(e: int, k_range: Iterable[int] = range(1, 11),
                    s_range: Iterable[int] = range(0, 11)) -> tuple[CwmParams, ChainStats]:
    """Grid cell with the fewest elements; ties go to the smaller ``(k, s)``."""
    best = None
    for params in _grid(k_range, s_range):
        stats = cwm_stats(params, e)
        if best is None or stats.elements < best[1].elements:
            best = (params, stats)
    return best


def cwm_best(e: int, k_range: Iterable[int] = range(1, 11),
             s_range: Iterable[int] = range(0, 11)) -> AdditionChain:
    params, _ = best_cwm_params(e, k_range, s_range)
    return cwm(params, e)
