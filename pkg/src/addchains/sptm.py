"""Simplified power-tree method.

For an odd offset ``m`` the tree has a root chain (``bm_star(m)``), a main
chain of powers ``2**n(m), ..., 2**(n(e)-1)`` and, hanging off each power
``2**i``, a branch ``c, 2c, 4c, ...`` with ``c = 2**i + m``.  A branch is
turned into a chain for ``e`` by doubling ``c`` as far as possible and then
walking the branch back towards the root, adding every node that still
fits.  The shortest branch result (or the binary method, if nothing beats
it) is returned.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .chain import AdditionChain, ChainBuilder
from .classic import bm, bm_star

__all__ = ["best_sptm_m", "sptm", "sptm_best", "sptm_branch", "sptm_branch_count", "sptm_count", "DEFAULT_M"]

DEFAULT_M = tuple(range(1, 64, 2))


def _check(m: int, e: int) -> None:
    if e < 1:
        raise ValueError(f"exponent must be positive, got {e}")
    if m < 1 or m % 2 == 0:
        raise ValueError(f"m must be a positive odd integer, got {m}")


def sptm_branch(m: int, i: int, e: int) -> Optional[AdditionChain]:
    """Chain for ``e`` grown from the branch at ``2**i``; ``None`` if ``2**i + m > e``."""
    _check(m, e)
    nm = m.bit_length()
    if not nm <= i < e.bit_length():
        raise ValueError(f"branch index {i} outside {nm}..{e.bit_length() - 1}")
    c = (1 << i) + m
    if c > e:
        return None
    root = bm_star(m)
    b = ChainBuilder.from_chain(root)
    p = nm - 1  # bm_star keeps 2**x at index x
    for _ in range(nm, i + 1):
        p = b.push(p, p)
    cur = b.push(p, len(root) - 1)
    total = c
    while total << 1 <= e:
        cur = b.push(cur, cur)
        total <<= 1
    elements = b.elements
    for j in range(len(elements) - 2, -1, -1):
        if total + elements[j] <= e:
            total += elements[j]
            cur = b.push(cur, j)
    if total != e:
        raise AssertionError(f"branch m={m} i={i} failed to reach {e}")
    return b.build(e)


def _small_part(m: int) -> tuple[int, ...]:
    return tuple(reversed(bm_star(m).elements))


def sptm_branch_count(m: int, i: int, e: int, _small: Optional[tuple] = None) -> Optional[int]:
    """Element count of :func:`sptm_branch` computed in O(1) big-int operations.

    Walking back over ``c * 2**x`` picks the binary digits of
    ``(e - c * 2**t) // c``; walking over the main-chain powers picks the
    remaining bits at or above ``n(m)``; the rest is covered by the root.
    """
    c = (1 << i) + m
    if c > e:
        return None
    nm = m.bit_length()
    t = e.bit_length() - c.bit_length()
    if c << t > e:
        t -= 1
    q, rest = divmod(e - (c << t), c)
    adds = q.bit_count() + (rest >> nm).bit_count()
    rest &= (1 << nm) - 1
    small = _small if _small is not None else _small_part(m)
    for value in small:
        if rest >= value:
            rest -= value
            adds += 1
    root = len(small)
    return root + (i - nm + 1) + (t + 1) + adds


def sptm_count(m: int, e: int) -> tuple[int, Optional[int]]:
    """``(elements, branch index)`` of the best branch; index ``None`` means the binary method."""
    _check(m, e)
    best = e.bit_length() + e.bit_count() - 1
    best_i = None
    if m >= e:
        return best, None
    small = _small_part(m)
    for i in range(m.bit_length(), e.bit_length()):
        count = sptm_branch_count(m, i, e, small)
        if count is not None and count < best:
            best, best_i = count, i
    return best, best_i


def sptm(m: int, e: int) -> AdditionChain:
    count, i = sptm_count(m, e)
    if i is None:
        return bm(e)
    chain = sptm_branch(m, i, e)
    assert len(chain) == count
    return chain


def best_sptm_m(e: int, m_values: Iterable[int] = DEFAULT_M) -> tuple[int, int]:
    """``(m, elements)`` minimizing the chain; ties go to the smaller ``m``."""
    best = None
    for m in sorted(set(m_values)):
        count, _ = sptm_count(m, e)
        if best is None or count < best[1]:
            best = (m, count)
    if best is None:
        raise ValueError("no m values given")
    return best


def sptm_best(e: int, m_values: Iterable[int] = DEFAULT_M) -> AdditionChain:
    m, _ = best_sptm_m(e, m_values)
    return sptm(m, e)
