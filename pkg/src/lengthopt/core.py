"""Frequency-length tables and the three length statistics built on them.

A table holds one row per word type: its surface form (possibly empty), its
absolute frequency ``f_i`` and its length ``l_i``.  Probabilities are always
derived as ``f_i / T`` and never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateType,
    EmptyTable,
    InvalidFrequency,
    NegativeLength,
    NonFiniteLength,
)

__all__ = [
    "TypeEntry",
    "FrequencyLengthTable",
    "LengthStats",
    "MinArrangement",
    "mean_token_length",
    "random_baseline",
    "minimum_baseline",
    "length_stats",
    "apply_length_transform",
    "affine",
    "power",
]


def _check_length(length) -> float:
    length = float(length)
    if not math.isfinite(length):
        raise NonFiniteLength(f"length must be finite, got {length!r}")
    if length < 0:
        raise NegativeLength(f"length must be >= 0, got {length!r}")
    return length


@dataclass(frozen=True)
class TypeEntry:
    form: str
    frequency: int
    length: float

    def __post_init__(self):
        freq = self.frequency
        if isinstance(freq, float) and freq.is_integer():
            freq = int(freq)
        if isinstance(freq, bool) or not isinstance(freq, (int, np.integer)):
            raise InvalidFrequency(f"frequency must be an integer, got {freq!r}")
        if freq < 1:
            raise InvalidFrequency(f"frequency must be >= 1, got {freq}")
        object.__setattr__(self, "frequency", int(freq))
        object.__setattr__(self, "length", _check_length(self.length))
        object.__setattr__(self, "form", self.form or "")


@dataclass(frozen=True)
class FrequencyLengthTable:
    """Immutable collection of distinct word types.

    Use :meth:`from_columns` to build one from parallel sequences.
    """

    entries: tuple[TypeEntry, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise EmptyTable("a frequency-length table needs at least one type")
        seen = set()
        for e in entries:
            if e.form:
                if e.form in seen:
                    raise DuplicateType(f"type {e.form!r} appears more than once")
                seen.add(e.form)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_columns(
        cls,
        frequencies: Sequence[int],
        lengths: Sequence[float],
        forms: Sequence[str] | None = None,
    ) -> "FrequencyLengthTable":
        frequencies = list(frequencies)
        lengths = list(lengths)
        if len(frequencies) != len(lengths):
            raise ValueError("frequencies and lengths differ in size")
        if forms is None:
            forms = [""] * len(frequencies)
        elif len(forms) != len(frequencies):
            raise ValueError("forms and frequencies differ in size")
        return cls(tuple(TypeEntry(s, f, l) for s, f, l in zip(forms, frequencies, lengths)))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @cached_property
    def T(self) -> int:
        return sum(e.frequency for e in self.entries)

    @cached_property
    def frequencies(self) -> np.ndarray:
        out = np.array([e.frequency for e in self.entries], dtype=np.int64)
        out.flags.writeable = False
        return out

    @cached_property
    def lengths(self) -> np.ndarray:
        out = np.array([e.length for e in self.entries], dtype=np.float64)
        out.flags.writeable = False
        return out

    @property
    def probabilities(self) -> np.ndarray:
        return self.frequencies / self.T

    @property
    def forms(self) -> tuple[str, ...]:
        return tuple(e.form for e in self.entries)

    @property
    def has_forms(self) -> bool:
        return all(e.form for e in self.entries)

    def with_lengths(self, lengths: Iterable[float]) -> "FrequencyLengthTable":
        """Same types and frequencies, new length column (validated)."""
        lengths = list(lengths)
        if len(lengths) != self.n:
            raise ValueError("new length column has the wrong size")
        return FrequencyLengthTable(
            tuple(TypeEntry(e.form, e.frequency, l) for e, l in zip(self.entries, lengths))
        )


@dataclass(frozen=True)
class LengthStats:
    L: float
    L_r: float
    L_min: float


@dataclass(frozen=True)
class MinArrangement:
    """The pairing that minimises mean token length.

    ``frequencies`` is sorted decreasingly and ``lengths`` increasingly; the
    two arrays are aligned so row ``k`` is the ``k``-th most frequent type
    carrying the ``k``-th shortest length.
    """

    frequencies: np.ndarray
    lengths: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return self.frequencies / self.frequencies.sum()


def _exact_dot(frequencies, lengths) -> Fraction:
    return sum((int(f) * Fraction(float(l)) for f, l in zip(frequencies, lengths)), Fraction(0))


def mean_token_length(table: FrequencyLengthTable, exact: bool = False):
    """Mean length of tokens, ``sum_i p_i l_i``.

    With ``exact=True`` the value is returned as a :class:`~fractions.Fraction`
    computed from the binary values of the lengths.
    """
    if exact:
        return _exact_dot(table.frequencies, table.lengths) / table.T
    return math.fsum(table.frequencies * table.lengths) / table.T


def random_baseline(table: FrequencyLengthTable, exact: bool = False):
    """Expected mean token length under random pairing: the mean type length."""
    if exact:
        return sum((Fraction(float(l)) for l in table.lengths), Fraction(0)) / table.n
    return math.fsum(table.lengths) / table.n


def minimum_arrangement(table: FrequencyLengthTable) -> MinArrangement:
    order = np.argsort(-table.frequencies, kind="stable")
    freqs = table.frequencies[order]
    lengths = np.sort(table.lengths, kind="stable")
    freqs.flags.writeable = False
    lengths.flags.writeable = False
    return MinArrangement(freqs, lengths)


def minimum_baseline(table: FrequencyLengthTable, exact: bool = False):
    """Rank-ordering minimum of the mean token length.

    Returns ``(L_min, arrangement)``.
    """
    arr = minimum_arrangement(table)
    if exact:
        value = _exact_dot(arr.frequencies, arr.lengths) / table.T
    else:
        value = math.fsum(arr.frequencies * arr.lengths) / table.T
    return value, arr


def length_stats(table: FrequencyLengthTable) -> LengthStats:
    L_min, _ = minimum_baseline(table)
    return LengthStats(mean_token_length(table), random_baseline(table), L_min)


def apply_length_transform(
    table: FrequencyLengthTable, transform: Callable[[float], float]
) -> FrequencyLengthTable:
    """Replace every length ``l`` by ``transform(l)``; forms and frequencies are kept."""
    new = []
    for l in table.lengths:
        try:
            value = transform(float(l))
        except OverflowError:
            raise NonFiniteLength(f"transform overflowed at length {l!r}") from None
        new.append(_check_length(value))
    return table.with_lengths(new)


def affine(a: float, b: float = 0.0) -> Callable[[float], float]:
    return lambda l: a * l + b


def power(base: float) -> Callable[[float], float]:
    return lambda l: base ** l
