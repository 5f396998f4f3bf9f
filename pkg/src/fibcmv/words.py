"""Fibonacci substitution words, Fibonacci numbers and Zeckendorf sums.

The substitution is ``A -> AB, B -> A``; its fixed point ``ABAABABAABAAB...``
selects which Verblunsky coefficient sits on each site (``A`` for alpha,
``B`` for beta).  Fibonacci numbers are indexed by word length:
``f_1 = 1, f_2 = 2, f_3 = 3, f_4 = 5``, i.e. ``f_n = |S^(n-1)(A)|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, ResourceError

MAX_FIB_INDEX = 90
MAX_PREFIX = 10**7


@lru_cache(maxsize=1)
def _fib_table() -> tuple[int, ...]:
    table = [0, 1, 2]
    while len(table) <= MAX_FIB_INDEX:
        table.append(table[-1] + table[-2])
    return tuple(table)


def fib_number(n: int) -> int:
    """Return ``f_n`` with ``f_1 = 1``, ``f_2 = 2``."""
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_FIB_INDEX:
        raise InputError(f"fib_number needs an integer index in [1, {MAX_FIB_INDEX}], got {n!r}")
    return _fib_table()[int(n)]


def fib_numbers_upto(limit: int) -> list[int]:
    """All ``f_k`` (k >= 1) with ``f_k <= limit``, increasing."""
    return [f for f in _fib_table()[1:] if f <= limit]


@dataclass(frozen=True)
class FibWord:
    """A word over {A, B} stored as packed bits (bit set = ``B``)."""

    bits: bytes
    length: int

    @classmethod
    def from_array(cls, arr) -> "FibWord":
        arr = np.asarray(arr, dtype=np.uint8)
        return cls(np.packbits(arr).tobytes(), int(arr.size))

    @classmethod
    def from_string(cls, s: str) -> "FibWord":
        if set(s) - {"A", "B"}:
            raise InputError(f"words use the letters A and B only, got {s!r}")
        return cls.from_array(np.frombuffer(s.encode(), dtype=np.uint8) == ord("B"))

    def as_array(self) -> np.ndarray:
        """Letters as a uint8 array, 0 for ``A`` and 1 for ``B``."""
        raw = np.frombuffer(self.bits, dtype=np.uint8)
        return np.unpackbits(raw, count=self.length)

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return self.as_array().choose([ord("A"), ord("B")]).astype(np.uint8).tobytes().decode()

    def __getitem__(self, i):
        if isinstance(i, slice):
            return FibWord.from_array(self.as_array()[i])
        return "AB"[int(self.as_array()[i])]

    def count(self, letter: str) -> int:
        ones = int(self.as_array().sum())
        return ones if letter == "B" else self.length - ones

    def __add__(self, other: "FibWord") -> "FibWord":
        return FibWord.from_array(np.concatenate([self.as_array(), other.as_array()]))


def _fixed_point_bits(n: int) -> np.ndarray:
    prev = np.array([1], dtype=np.uint8)  # S^{-1}(A) := B keeps the concatenation law uniform
    cur = np.array([0], dtype=np.uint8)
    while cur.size < n:
        prev, cur = cur, np.concatenate([cur, prev])
    return cur[:n]


def fixed_point_prefix(n: int) -> FibWord:
    """First ``n`` letters of the substitution fixed point ``ABAAB...``."""
    if n < 0:
        raise InputError("prefix length must be non-negative")
    if n > MAX_PREFIX:
        raise ResourceError(f"prefix length {n} exceeds the limit {MAX_PREFIX}")
    if n == 0:
        return FibWord(b"", 0)
    return FibWord.from_array(_fixed_point_bits(n))


def fixed_point_letters(n: int) -> np.ndarray:
    """Unpacked 0/1 letters of the length-``n`` prefix (0 = A, 1 = B)."""
    if n > MAX_PREFIX:
        raise ResourceError(f"prefix length {n} exceeds the limit {MAX_PREFIX}")
    if n <= 0:
        return np.zeros(0, dtype=np.uint8)
    return _fixed_point_bits(n)


@dataclass(frozen=True)
class Zeckendorf:
    """``value = sum(fib_number(i) for i in indices)``, indices decreasing and non-adjacent."""

    indices: tuple[int, ...]
    value: int

    @property
    def terms(self) -> tuple[int, ...]:
        return tuple(fib_number(i) for i in self.indices)


def zeckendorf(n: int) -> Zeckendorf:
    """Greedy Zeckendorf decomposition of a positive integer."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InputError(f"zeckendorf needs a positive integer, got {n!r}")
    table = _fib_table()
    if n > table[-1]:
        raise InputError(f"{n} is beyond the supported Fibonacci range")
    rest = int(n)
    idx = MAX_FIB_INDEX
    out = []
    while rest:
        while table[idx] > rest:
            idx -= 1
        out.append(idx)
        rest -= table[idx]
        idx -= 2
    return Zeckendorf(tuple(out), int(n))


def is_cyclic_permutation(u, v) -> bool:
    """True iff ``u`` and ``v`` have equal length and ``u`` is a factor of ``v v``."""
    su, sv = str(u), str(v)
    return len(su) == len(sv) and su in sv + sv
