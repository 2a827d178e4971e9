"""Reading corpora and turning token streams into frequency-length tables.

Three on-disk formats are supported (all UTF-8, LF or CRLF line endings):

``fl``
    TSV with header ``type<TAB>frequency<TAB>length``; ``type`` may be ``-``
    for anonymous rows.
``tokens``
    one token per line, optionally followed by ``<TAB>tag`` (e.g. ``PUNCT``).
``aligned``
    ``token<TAB>duration_seconds``, one row per occurrence.

Lengths in characters count Unicode code points, not grapheme clusters.
"""

from __future__ import annotations

import math
import statistics
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import FrequencyLengthTable, TypeEntry
from .errors import (
    EmptyAlphabet,
    EmptyTable,
    MalformedRow,
    MissingDuration,
    MissingForms,
    NegativeDuration,
    NonUTF8,
)
from .nullmodel import replicate_rng

__all__ = [
    "TokenRecord",
    "WorkingAlphabet",
    "ConvergenceCurve",
    "read_table",
    "read_fl_table",
    "read_tokens",
    "read_aligned",
    "write_fl_table",
    "mandatory_filter",
    "character_frequencies",
    "working_alphabet",
    "apply_alphabet_filter",
    "cjk_filter",
    "aggregate",
    "drop_vowels",
    "load_vowels",
    "DEFAULT_VOWELS",
    "DEFAULT_STRIP",
    "DEFAULT_DROP_TAGS",
    "convergence_curve",
]

LENGTH_MODES = ("chars", "duration-median", "duration-mean")
DEFAULT_STRIP = frozenset("=")
DEFAULT_DROP_TAGS = frozenset({"PUNCT", "<unk>", "unk", "null"})
_NULL_SURFACES = frozenset({"<unk>", "<null>"})


@dataclass(frozen=True)
class TokenRecord:
    surface: str
    duration: float | None = None
    tag: str | None = None


# -- readers -----------------------------------------------------------------

def _lines(path) -> Iterator[tuple[int, str]]:
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise NonUTF8(f"{path}: line {lineno} is not valid UTF-8 ({exc.reason})") from None
            if lineno == 1 and text.startswith("\ufeff"):
                text = text[1:]
            yield lineno, text.rstrip("\r\n")


def read_fl_table(path) -> FrequencyLengthTable:
    entries = []
    header_seen = False
    for lineno, line in _lines(path):
        if not line.strip():
            continue
        cols = line.split("\t")
        if not header_seen:
            header_seen = True
            if [c.strip().lower() for c in cols] != ["type", "frequency", "length"]:
                raise MalformedRow("expected header 'type<TAB>frequency<TAB>length'", lineno)
            continue
        if len(cols) != 3:
            raise MalformedRow(f"expected 3 columns, found {len(cols)}", lineno)
        form, freq, length = cols
        try:
            freq = int(freq)
            length = float(length)
        except ValueError:
            raise MalformedRow(f"cannot parse frequency/length from {line!r}", lineno) from None
        try:
            entries.append(TypeEntry("" if form == "-" else form, freq, length))
        except ValueError as exc:
            raise MalformedRow(str(exc), lineno) from None
    return FrequencyLengthTable(tuple(entries))


def read_tokens(path) -> Iterator[TokenRecord]:
    for lineno, line in _lines(path):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) > 2:
            raise MalformedRow(f"expected 'token[<TAB>tag]', found {len(cols)} columns", lineno)
        yield TokenRecord(cols[0], None, cols[1] if len(cols) == 2 else None)


def read_aligned(path) -> Iterator[TokenRecord]:
    for lineno, line in _lines(path):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise MalformedRow(f"expected 'token<TAB>duration', found {len(cols)} columns", lineno)
        try:
            duration = float(cols[1])
        except ValueError:
            raise MalformedRow(f"cannot parse duration {cols[1]!r}", lineno) from None
        if not math.isfinite(duration):
            raise MalformedRow(f"non-finite duration {cols[1]!r}", lineno)
        if duration < 0:
            raise NegativeDuration(f"{path}: line {lineno}: negative duration {duration}")
        yield TokenRecord(cols[0], duration)


def read_table(path, format: str):
    """Dispatch on ``format``: a table for ``fl``, a token iterator otherwise."""
    if format in ("fl", "fl-table"):
        return read_fl_table(path)
    if format in ("tokens", "token-list"):
        return read_tokens(path)
    if format in ("aligned", "aligned-durations"):
        return read_aligned(path)
    raise ValueError(f"unknown format {format!r}")


def write_fl_table(table: FrequencyLengthTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("type\tfrequency\tlength\n")
        for e in table:
            fh.write(f"{e.form or '-'}\t{e.frequency}\t{e.length!r}\n")


# -- filtering ---------------------------------------------------------------

def _simple_lower(text: str) -> str:
    # per-codepoint mapping; multi-codepoint full mappings (e.g. U+0130) are left alone
    out = []
    for ch in text:
        low = ch.lower()
        out.append(low if len(low) == 1 else ch)
    return "".join(out)


def _has_ascii_digit(text: str) -> bool:
    return any("0" <= ch <= "9" for ch in text)


def mandatory_filter(
    tokens: Iterable[TokenRecord],
    strip: Iterable[str] = DEFAULT_STRIP,
    drop_tags: Iterable[str] = DEFAULT_DROP_TAGS,
) -> Iterator[TokenRecord]:
    """Drop tagged punctuation/unknown tokens and tokens with ASCII digits, then lowercase.

    Configured special characters are stripped after lowercasing and tokens
    left empty are dropped.
    """
    strip = frozenset(strip)
    drop_tags = frozenset(drop_tags)
    for tok in tokens:
        if tok.tag is not None and tok.tag in drop_tags:
            continue
        if tok.surface in _NULL_SURFACES or _has_ascii_digit(tok.surface):
            continue
        surface = "".join(ch for ch in _simple_lower(tok.surface) if ch not in strip)
        if not surface.strip():
            continue
        yield TokenRecord(surface, tok.duration, tok.tag)


def character_frequencies(source) -> Counter:
    """Occurrence-weighted character counts of a token stream or a table with forms."""
    counts: Counter = Counter()
    if isinstance(source, FrequencyLengthTable):
        if not source.has_forms:
            raise MissingForms("character frequencies need surface forms")
        for e in source:
            for ch in e.form:
                counts[ch] += e.frequency
        return counts
    for tok in source:
        surface = tok.surface if isinstance(tok, TokenRecord) else tok
        counts.update(surface)
    return counts


@dataclass(frozen=True)
class WorkingAlphabet:
    """Split of the observed characters into a kept (frequent) and an excluded cluster.

    ``log_frequency`` maps every observed character to the natural log of its
    count; ``threshold`` lies halfway between the two clusters and is ``None``
    when nothing was excluded.
    """

    kept: frozenset
    excluded: frozenset
    log_frequency: dict
    threshold: float | None
    sse: tuple[float, float]

    @property
    def size_before(self) -> int:
        return len(self.kept) + len(self.excluded)

    @property
    def size_after(self) -> int:
        return len(self.kept)


def best_two_means_split(values: Sequence[float]) -> tuple[int, float, float]:
    """Exact 1-D 2-means on sorted ``values``.

    Returns ``(k, sse_low, sse_high)`` where ``values[:k]`` and ``values[k:]``
    are the optimal clusters.  Only splits between distinct values are
    considered, so equal values never end up in different clusters.  ``k`` is
    0 when all values are equal.
    """
    v = np.asarray(values, dtype=np.float64)
    m = v.size
    if m == 0:
        raise EmptyAlphabet("no values to cluster")
    v = v - v.mean()
    csum = np.concatenate(([0.0], np.cumsum(v)))
    csq = np.concatenate(([0.0], np.cumsum(v * v)))
    best = (0, 0.0, float(csq[m] - csum[m] ** 2 / m))
    best_total = math.inf
    for k in range(1, m):
        if v[k - 1] == v[k]:
            continue
        low = csq[k] - csum[k] ** 2 / k
        high = (csq[m] - csq[k]) - (csum[m] - csum[k]) ** 2 / (m - k)
        low = max(0.0, float(low))
        high = max(0.0, float(high))
        if low + high < best_total:
            best_total = low + high
            best = (k, low, high)
    return best


def working_alphabet(source) -> WorkingAlphabet:
    """Keep the high-frequency cluster of characters (by log frequency).

    ``source`` is a token stream or a table with surface forms.
    """
    counts = character_frequencies(source)
    if not counts:
        raise EmptyAlphabet("no characters observed")
    chars = sorted(counts, key=lambda ch: (counts[ch], ch))
    logs = {ch: math.log(counts[ch]) for ch in chars}
    k, sse_low, sse_high = best_two_means_split([logs[ch] for ch in chars])
    if k == 0:
        return WorkingAlphabet(frozenset(chars), frozenset(), logs, None, (0.0, sse_high))
    threshold = 0.5 * (logs[chars[k - 1]] + logs[chars[k]])
    return WorkingAlphabet(frozenset(chars[k:]), frozenset(chars[:k]), logs, threshold, (sse_low, sse_high))


def apply_alphabet_filter(tokens: Iterable[TokenRecord], alphabet: WorkingAlphabet) -> Iterator[TokenRecord]:
    excluded = alphabet.excluded
    for tok in tokens:
        if not any(ch in excluded for ch in tok.surface):
            yield tok


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return (
        0x4E00 <= cp <= 0x9FFF          # unified ideographs
        or 0x3400 <= cp <= 0x4DBF       # extension A
        or 0x20000 <= cp <= 0x323AF     # extensions B-H
        or 0xF900 <= cp <= 0xFAFF       # compatibility ideographs
        or 0x3040 <= cp <= 0x30FF       # hiragana, katakana
        or 0x31F0 <= cp <= 0x31FF       # katakana phonetic extensions
        or 0xFF66 <= cp <= 0xFF9F       # half-width katakana
        or cp in (0x3005, 0x3006, 0x3007)  # iteration / closing marks
    )


def cjk_filter(tokens: Iterable[TokenRecord]) -> Iterator[TokenRecord]:
    """Alternate optional filter for Chinese/Japanese: drop tokens with any non-CJK character."""
    for tok in tokens:
        if all(_is_cjk(ch) for ch in tok.surface):
            yield tok


# -- aggregation -------------------------------------------------------------

def aggregate(tokens: Iterable[TokenRecord], length_mode: str = "chars") -> FrequencyLengthTable:
    """Group occurrences by surface form into a frequency-length table.

    ``chars`` counts code points; the duration modes take the median or the
    mean of the per-occurrence durations.
    """
    if length_mode not in LENGTH_MODES:
        raise ValueError(f"unknown length mode {length_mode!r}")
    counts: dict[str, int] = {}
    durations: dict[str, list[float]] = {}
    for tok in tokens:
        counts[tok.surface] = counts.get(tok.surface, 0) + 1
        if length_mode != "chars":
            if tok.duration is None:
                raise MissingDuration(f"token {tok.surface!r} has no duration")
            durations.setdefault(tok.surface, []).append(tok.duration)
    if not counts:
        raise EmptyTable("no tokens left to aggregate")
    entries = []
    for form, freq in counts.items():
        if length_mode == "chars":
            length = len(form)
        elif length_mode == "duration-median":
            length = statistics.median(durations[form])
        else:
            length = math.fsum(durations[form]) / freq
        entries.append(TypeEntry(form, freq, length))
    return FrequencyLengthTable(tuple(entries))


# -- weak recoding -----------------------------------------------------------

def _accented_vowels(bases: str = "aeiou") -> frozenset:
    found = set(bases)
    for block in ((0x00C0, 0x024F), (0x1E00, 0x1EFF)):
        for cp in range(block[0], block[1] + 1):
            ch = chr(cp)
            decomposed = unicodedata.normalize("NFD", ch)
            if decomposed[0] in bases and len(decomposed) > 1 and ch == _simple_lower(ch):
                found.add(ch)
    return frozenset(found)


DEFAULT_VOWELS = _accented_vowels()


def load_vowels(path) -> frozenset:
    """Vowel set from a UTF-8 file; characters are separated by whitespace."""
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(ch for item in text.split() for ch in item)


def _strip_vowels(form: str, vowels: frozenset) -> str:
    out = []
    dropping = False
    for ch in form:
        if ch in vowels:
            dropping = True
            continue
        # combining marks attached to a dropped vowel go with it
        if dropping and unicodedata.combining(ch):
            continue
        dropping = False
        out.append(ch)
    return "".join(out)


def drop_vowels(table: FrequencyLengthTable, vowels: Iterable[str] = DEFAULT_VOWELS) -> FrequencyLengthTable:
    """Recompute each length as the number of non-vowel code points.

    Types and frequencies are preserved, so two forms sharing a consonant
    skeleton remain distinct types and lengths of zero are allowed.
    """
    if not table.has_forms:
        raise MissingForms("vowel removal needs surface forms")
    vowels = frozenset(vowels)
    return table.with_lengths(len(_strip_vowels(e.form, vowels)) for e in table)


# -- convergence -------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceCurve:
    t: tuple[int, ...]
    reps: int
    seed: int
    mean: dict          # score name -> tuple of per-t means (None when no replicate was valid)
    valid: dict         # score name -> tuple of per-t valid replicate counts


def _sample_sizes(T: int) -> list[int]:
    sizes = []
    t = 2
    while t <= T:
        sizes.append(t)
        t *= 2
    if not sizes or sizes[-1] != T:
        sizes.append(T)
    return sizes


def convergence_curve(
    tokens: Sequence[TokenRecord],
    reps: int = 100,
    seed: int = 0,
    length_mode: str = "chars",
    workers: int = 1,
    scores: Sequence[str] = ("eta", "psi", "omega"),
) -> ConvergenceCurve:
    """Average scores over random sub-samples of ``t`` tokens, ``t = 2, 4, 8, ...``.

    The full corpus size ``T`` is always included as the last ``t``.
    Replicate ``r`` at the ``j``-th size uses generator ``(seed, j, r)``.
    """
    from concurrent.futures import ThreadPoolExecutor

    from . import scores as score_mod
    from .errors import LengthOptError

    tokens = list(tokens)
    T = len(tokens)
    if T < 2:
        raise EmptyTable("convergence needs at least two tokens")
    fns = {name: getattr(score_mod, name) for name in scores}

    def one(j, t, r):
        idx = replicate_rng(seed, j, r).choice(T, size=t, replace=False)
        idx.sort()
        table = aggregate((tokens[i] for i in idx), length_mode)
        row = {}
        for name, fn in fns.items():
            try:
                value = fn(table)
            except LengthOptError:
                value = None
            row[name] = value
        return row

    sizes = _sample_sizes(T)
    jobs = [(j, t, r) for j, t in enumerate(sizes) for r in range(reps)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda a: one(*a), jobs))
    else:
        rows = [one(*a) for a in jobs]

    mean = {name: [] for name in scores}
    valid = {name: [] for name in scores}
    for j, _ in enumerate(sizes):
        block = rows[j * reps:(j + 1) * reps]
        for name in scores:
            vals = [row[name] for row in block if row[name] is not None]
            valid[name].append(len(vals))
            mean[name].append(math.fsum(vals) / len(vals) if vals else None)
    return ConvergenceCurve(
        tuple(sizes), reps, seed,
        {k: tuple(v) for k, v in mean.items()},
        {k: tuple(v) for k, v in valid.items()},
    )
