"""Baseline constructions: binary method, its reordered form, and the window method."""

from __future__ import annotations

from dataclasses import dataclass

from .chain import AdditionChain, ChainBuilder

__all__ = ["MAX_WINDOW", "WmParams", "bm", "bm_star", "bm_scaled", "wm", "wm_windows", "odd_ladder"]

MAX_WINDOW = 30


def _check_exponent(e: int) -> None:
    if e < 1:
        raise ValueError(f"exponent must be positive, got {e}")


def bm(e: int) -> AdditionChain:
    """Left-to-right binary method: double per bit, add 1 on set bits."""
    _check_exponent(e)
    b = ChainBuilder()
    for bit in bin(e)[3:]:
        b.double()
        if bit == "1":
            b.push(b.last, 0)
    return b.build(e)


def bm_star(e: int) -> AdditionChain:
    """All powers ``1, 2, ..., 2**(n-1)`` first, then one addition per lower set bit.

    Element ``i`` of the power prefix is ``2**i``, which is what the
    additions index into.
    """
    _check_exponent(e)
    n = e.bit_length()
    b = ChainBuilder()
    for _ in range(n - 1):
        b.double()
    for i in range(n - 2, -1, -1):
        if (e >> i) & 1:
            b.push(b.last, i)
    return b.build(e)


def bm_scaled(x: int, t: int) -> list[int]:
    """``bm(t)`` with every element multiplied by ``x``."""
    if x < 1 or t < 1:
        raise ValueError("x and t must be positive")
    return [a * x for a in bm(t).elements]


@dataclass(frozen=True)
class WmParams:
    k: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= MAX_WINDOW:
            raise ValueError(f"window length must be in 1..{MAX_WINDOW}, got {self.k}")


def odd_ladder(b: ChainBuilder, top: int) -> None:
    """Append ``2, 3, 5, 7, ..., top`` to a builder holding only ``[1]``."""
    b.double()
    prev = 0  # index of the previous odd value
    for _ in range(3, top + 1, 2):
        prev = b.push(prev, 1)


def wm_windows(k: int, e: int) -> dict[int, int]:
    """Greedy MSB-first window split: ``{lsb position: window value}``.

    Each window is the longest run of at most ``k`` bits that starts at the
    current set bit and ends in a set bit; zeros between windows are skipped.
    """
    _check_exponent(e)
    bits = bin(e)[2:]
    n = len(bits)
    windows = {}
    i = 0  # index into the string, MSB first
    while i < n:
        if bits[i] == "0":
            i += 1
            continue
        end = min(i + k, n)
        while bits[end - 1] == "0":
            end -= 1
        windows[n - end] = int(bits[i:end], 2)
        i = end
    return windows


def wm(params: WmParams | int, e: int) -> AdditionChain:
    """Sliding-window method with the full odd pre-computation ``1, 2, 3, ..., 2**k - 1``.

    Each window costs one doubling per bit and one addition of its value; a
    run of zeros costs one doubling per zero.  A value that the
    pre-computation already holds is reused rather than appended again, and
    when ``e`` itself is pre-computed the chain stops there.
    """
    k = params.k if isinstance(params, WmParams) else WmParams(params).k
    _check_exponent(e)
    b = ChainBuilder()
    odd_ladder(b, (1 << k) - 1)
    if e in b:
        b.truncate(b.index(e) + 1)
        return b.build(e)

    bits = bin(e)[2:]
    n = len(bits)

    def window_at(i: int) -> int:
        end = min(i + k, n)
        while bits[end - 1] == "0":
            end -= 1
        return end

    end = window_at(0)
    acc = b.index(int(bits[:end], 2))
    i = end
    while i < n:
        if bits[i] == "0":
            acc = b.reuse_or_push(acc, acc)
            i += 1
            continue
        end = window_at(i)
        for _ in range(end - i):
            acc = b.reuse_or_push(acc, acc)
        acc = b.reuse_or_push(acc, b.index(int(bits[i:end], 2)))
        i = end
    return b.build(e)
