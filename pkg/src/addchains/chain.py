"""Addition chains: the shared value type, validation, bit helpers and I/O.

An addition chain for ``e`` is a sequence ``1 = a_0, a_1, ..., a_r = e`` in
which every element after the first is the sum of two earlier (possibly
equal) elements.  Its length is ``r``, one less than the element count.

Every method in this package records, for each element, the indices of the
two elements it was formed from.  That provenance makes validation linear
and lets :func:`exponentiate_with_chain` replay the chain as a schedule of
modular multiplications.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

__all__ = [
    "AdditionChain",
    "BitProfile",
    "ChainBuilder",
    "ChainFormatError",
    "ValidationReport",
    "bit_profile",
    "emit_chain",
    "exponentiate_with_chain",
    "parse_chain",
    "parse_natural",
    "square_and_multiply",
    "validate_chain",
]


@dataclass(frozen=True)
class AdditionChain:
    """Immutable addition chain with optional per-element provenance.

    ``parents[x - 1]`` holds the index pair ``(i, j)`` with
    ``elements[x] == elements[i] + elements[j]``.  Chains read from outside
    the package may carry ``parents=None``; :func:`validate_chain` then
    searches for supporting pairs instead.
    """

    elements: tuple[int, ...]
    parents: Optional[tuple[tuple[int, int], ...]] = None
    target: Optional[int] = None

    def __post_init__(self) -> None:
        if self.target is None and self.elements:
            object.__setattr__(self, "target", self.elements[-1])

    @property
    def length(self) -> int:
        """Number of steps ``r``."""
        return len(self.elements) - 1

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, index):
        return self.elements[index]

    @classmethod
    def from_values(cls, values: Iterable[int], target: Optional[int] = None) -> "AdditionChain":
        """Build a chain from bare values, deriving provenance by search.

        Raises ``ValueError`` when some element has no supporting pair.
        """
        elements = tuple(int(v) for v in values)
        report = validate_chain(cls(elements, None, target))
        if not report.ok:
            raise ValueError(report.reason)
        return cls(elements, _search_parents(elements), target)


class ValidationReport(NamedTuple):
    ok: bool
    index: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class BitProfile(NamedTuple):
    n: int  # bit length, floor(log2 e) + 1
    h: int  # Hamming weight


def bit_profile(e: int) -> BitProfile:
    if e < 1:
        raise ValueError(f"expected a positive integer, got {e}")
    return BitProfile(e.bit_length(), e.bit_count())


class ChainBuilder:
    """Append-only helper used by every chain constructor.

    Values are looked up by their most recent index, which is also how
    :func:`parse_chain` resolves the operands written in a chain file.
    """

    __slots__ = ("elements", "parents", "_where")

    def __init__(self) -> None:
        self.elements: list[int] = [1]
        self.parents: list[tuple[int, int]] = []
        self._where: dict[int, int] = {1: 0}

    @classmethod
    def from_chain(cls, chain: AdditionChain) -> "ChainBuilder":
        b = cls()
        b.elements = list(chain.elements)
        b.parents = list(chain.parents if chain.parents is not None
                         else _search_parents(chain.elements))
        b._where = {value: idx for idx, value in enumerate(b.elements)}
        return b

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, value: int) -> bool:
        return value in self._where

    @property
    def last(self) -> int:
        return len(self.elements) - 1

    def index(self, value: int) -> int:
        return self._where[value]

    def push(self, i: int, j: int) -> int:
        value = self.elements[i] + self.elements[j]
        self.parents.append((i, j))
        self.elements.append(value)
        self._where[value] = len(self.elements) - 1
        return len(self.elements) - 1

    def reuse_or_push(self, i: int, j: int) -> int:
        """Index of ``elements[i] + elements[j]``, appending it only if new."""
        value = self.elements[i] + self.elements[j]
        found = self._where.get(value)
        if found is not None:
            return found
        return self.push(i, j)

    def add(self, a: int, b: int) -> int:
        return self.push(self._where[a], self._where[b])

    def double(self) -> int:
        return self.push(self.last, self.last)

    def truncate(self, size: int) -> None:
        for value in self.elements[size:]:
            del self._where[value]
        del self.elements[size:]
        del self.parents[size - 1:]
        for idx, value in enumerate(self.elements):
            self._where[value] = idx

    def build(self, target: Optional[int] = None) -> AdditionChain:
        return AdditionChain(tuple(self.elements), tuple(self.parents), target)


def _search_parents(elements: Sequence[int]) -> tuple[tuple[int, int], ...]:
    where: dict[int, int] = {}
    parents = []
    for x, value in enumerate(elements):
        if x:
            for a, i in where.items():
                j = where.get(value - a)
                if j is not None:
                    parents.append((max(i, j), min(i, j)))
                    break
        where[value] = x
    return tuple(parents)


def validate_chain(chain: AdditionChain) -> ValidationReport:
    """Check every addition-chain invariant, reporting the first violation."""
    elements = chain.elements
    if not elements:
        return ValidationReport(False, None, "empty chain")
    if elements[0] != 1:
        return ValidationReport(False, 0, f"first element is {elements[0]}, expected 1")
    if chain.parents is not None:
        if len(chain.parents) != len(elements) - 1:
            return ValidationReport(False, None, "provenance count does not match element count")
        for x in range(1, len(elements)):
            i, j = chain.parents[x - 1]
            if not (0 <= i < x and 0 <= j < x):
                return ValidationReport(False, x, f"element {x} refers to a later index ({i}, {j})")
            if elements[i] + elements[j] != elements[x]:
                return ValidationReport(
                    False, x,
                    f"element {x} = {elements[x]} but a_{i} + a_{j} = {elements[i] + elements[j]}",
                )
    else:
        seen: set[int] = {1}
        for x in range(1, len(elements)):
            value = elements[x]
            if not any(value - a in seen for a in seen):
                return ValidationReport(False, x, f"element {x} = {value} has no supporting pair")
            seen.add(value)
    if chain.target is not None and elements[-1] != chain.target:
        return ValidationReport(
            False, len(elements) - 1,
            f"chain ends at {elements[-1]}, target is {chain.target}",
        )
    return ValidationReport(True)


def square_and_multiply(base: int, e: int, modulus: int) -> int:
    """Left-to-right binary exponentiation, kept independent of ``pow``."""
    result = 1 % modulus
    base %= modulus
    for bit in bin(e)[2:]:
        result = result * result % modulus
        if bit == "1":
            result = result * base % modulus
    return result


def exponentiate_with_chain(base: int, chain: AdditionChain, modulus: int) -> int:
    """``base ** chain.target % modulus`` with one multiplication per chain step."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    report = validate_chain(chain)
    if not report.ok:
        raise ValueError(f"invalid chain: {report.reason}")
    parents = chain.parents if chain.parents is not None else _search_parents(chain.elements)
    powers = [base % modulus]
    for i, j in parents:
        powers.append(powers[i] * powers[j] % modulus)
    return powers[-1]


# -- text format -----------------------------------------------------------

class ChainFormatError(ValueError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_NUMBER = r"(0[xX][0-9a-fA-F_]+|0[bB][01_]+|[0-9_]+)"
_HEADER = re.compile(r"#\s*target\s*=\s*" + _NUMBER + r"\s*$")
_FIRST = re.compile(r"(\d+)\s*:\s*" + _NUMBER + r"\s*$")
_STEP = re.compile(
    r"(\d+)\s*:\s*" + _NUMBER + r"\s*=\s*" + _NUMBER + r"\s*\+\s*" + _NUMBER + r"\s*$"
)


def parse_natural(text: str) -> int:
    """Read a non-negative integer written in decimal, ``0x`` hex or ``0b`` binary."""
    s = str(text).strip()
    try:
        if s[:2].lower() in ("0x", "0b", "0o"):
            value = int(s, 0)
        else:
            value = int(s, 10)
    except (ValueError, IndexError):
        raise ValueError(f"not a natural number: {text!r}") from None
    if value < 0:
        raise ValueError(f"not a natural number: {text!r}")
    return value


def emit_chain(chain: AdditionChain) -> str:
    parents = chain.parents if chain.parents is not None else _search_parents(chain.elements)
    elements = chain.elements
    lines = [f"# target={chain.target}", f"0: {elements[0]}"]
    for x in range(1, len(elements)):
        i, j = parents[x - 1]
        lines.append(f"{x}: {elements[x]} = {elements[i]} + {elements[j]}")
    return "\n".join(lines) + "\n"


def parse_chain(text: str) -> AdditionChain:
    """Inverse of :func:`emit_chain`; operands resolve to their latest occurrence."""
    lines = [(n, line.strip()) for n, line in enumerate(text.splitlines(), 1)]
    lines = [(n, line) for n, line in lines if line]
    if not lines:
        raise ChainFormatError(1, "empty chain file")
    lineno, header = lines[0]
    m = _HEADER.match(header)
    if not m:
        raise ChainFormatError(lineno, "expected '# target=<number>' header")
    target = parse_natural(m.group(1))
    if len(lines) < 2:
        raise ChainFormatError(lineno, "chain has no elements")

    lineno, first = lines[1]
    m = _FIRST.match(first)
    if not m or int(m.group(1)) != 0 or parse_natural(m.group(2)) != 1:
        raise ChainFormatError(lineno, "expected '0: 1'")
    builder = ChainBuilder()
    for lineno, line in lines[2:]:
        m = _STEP.match(line)
        if not m:
            raise ChainFormatError(lineno, f"malformed step {line!r}")
        idx, value, a, b = (parse_natural(g) for g in m.groups())
        if idx != len(builder):
            raise ChainFormatError(lineno, f"expected index {len(builder)}, got {idx}")
        if a not in builder or b not in builder:
            raise ChainFormatError(lineno, f"operand of {value} does not occur earlier")
        if a + b != value:
            raise ChainFormatError(lineno, f"{a} + {b} != {value}")
        builder.add(a, b)
    return builder.build(target)
