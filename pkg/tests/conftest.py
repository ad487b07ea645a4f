from __future__ import annotations

import functools
from pathlib import Path

import pytest

from addchains.oracle import OracleTable, table_upto

DATA = Path(__file__).parent / "data"

# e = (11111011100011001101001)_2 from the cross-window worked example
FIG7 = 0b11111011100011001101001


def brute_shortest(e: int) -> int:
    """Plain iterative deepening over ascending chains, no pruning beyond doubling reach."""
    if e == 1:
        return 0

    def extend(chain: list[int], left: int) -> bool:
        last = chain[-1]
        if last == e:
            return True
        if left == 0 or last << left < e:
            return False
        sums = sorted({a + b for a in chain for b in chain if last < a + b <= e}, reverse=True)
        for c in sums:
            chain.append(c)
            if extend(chain, left - 1):
                return True
            chain.pop()
        return False

    d = 0
    while not extend([1], d):
        d += 1
    return d


@functools.lru_cache(maxsize=None)
def live_table(limit: int = 4096) -> OracleTable:
    return table_upto(limit)


@functools.lru_cache(maxsize=None)
def frozen_table() -> OracleTable:
    return OracleTable.load(DATA / "oracle_10000.csv")


@pytest.fixture(scope="session")
def table4096() -> OracleTable:
    return live_table(4096)


@pytest.fixture(scope="session")
def table10000() -> OracleTable:
    return frozen_table()


_CRITERIA: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    _CRITERIA[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
