"""Batteries over a collection of languages.

* :func:`law_battery` tests the law of abbreviation in every language with a
  left-sided test and Holm-corrects across languages.
* :func:`recoding_comparison` regresses recoded scores on original scores.
* :func:`parameter_correlogram` correlates scores with basic parameters
  (alphabet size ``A``, types ``n``, tokens ``T``) using two-sided tests.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .core import FrequencyLengthTable
from .correlation import AdjustedBattery, CorrelationTest, correlation_test, holm_bonferroni
from .errors import LabelMismatch, LengthOptError, TooFewPoints
from .scores import ScoreReport, score_report

__all__ = [
    "RegressionFit",
    "LanguageResult",
    "alphabet_size",
    "law_battery",
    "recoding_comparison",
    "fit_line",
    "parameter_correlogram",
]

CORRELOGRAM_SCORES = ("eta", "psi", "omega")
CORRELOGRAM_PARAMS = ("A", "n", "T")


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r: float | None
    S: float
    n: int


@dataclass(frozen=True)
class LanguageResult:
    label: str
    report: ScoreReport
    tests: dict = field(default_factory=dict)   # method -> CorrelationTest
    failures: dict = field(default_factory=dict)  # method -> reason
    A: int | None = None
    n: int = 0
    T: int = 0


def alphabet_size(table: FrequencyLengthTable) -> int | None:
    """Number of distinct characters over all forms, or ``None`` without forms."""
    if not table.has_forms:
        return None
    return len(set("".join(table.forms)))


def _language(label: str, table: FrequencyLengthTable, methods) -> LanguageResult:
    tests, failures = {}, {}
    for method in methods:
        try:
            tests[method] = correlation_test(table.probabilities, table.lengths, method, "less")
        except LengthOptError as exc:
            failures[method] = f"{type(exc).__name__}: {exc}"
    return LanguageResult(
        label, score_report(table), tests, failures, alphabet_size(table), table.n, table.T
    )


def law_battery(
    tables: Mapping[str, FrequencyLengthTable], method: str = "kendall", workers: int = 1
) -> tuple[AdjustedBattery, list[LanguageResult]]:
    """Left-sided frequency-length test per language, Holm-adjusted across languages.

    Languages whose test cannot be computed keep a row with mark ``-``.
    Rows are sorted by label.
    """
    if not tables:
        raise TooFewPoints("the battery needs at least one language")
    labels = sorted(tables)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda l: _language(l, tables[l], (method,)), labels))
    else:
        results = [_language(l, tables[l], (method,)) for l in labels]
    raw = [r.tests[method].p_value if method in r.tests else None for r in results]
    return holm_bonferroni(raw, labels), results


def fit_line(x, y) -> RegressionFit:
    """Ordinary least squares of ``y`` on ``x``; ``S = sqrt(SSE / (n - 2))``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    if n < 3 or y.size != n:
        raise TooFewPoints("a regression needs at least three matched points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = math.fsum(dx * dx)
    if sxx == 0:
        raise TooFewPoints("all x values are equal")
    sxy = math.fsum(dx * dy)
    syy = math.fsum(dy * dy)
    slope = sxy / sxx
    intercept = y.mean() - slope * x.mean()
    resid = y - (intercept + slope * x)
    S = math.sqrt(math.fsum(resid * resid) / (n - 2))
    r = None if syy == 0 else max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    return RegressionFit(slope, intercept, r, S, n)


def _score_value(entry, name):
    if isinstance(entry, ScoreReport):
        return getattr(entry, name)
    return entry.get(name)


def recoding_comparison(
    original: Mapping[str, object],
    recoded: Mapping[str, object],
    scores=("eta", "psi", "omega"),
) -> dict[str, RegressionFit]:
    """Fit ``recoded = slope * original + intercept`` per score over matched labels.

    Values may be :class:`ScoreReport` objects or plain ``{score: value}``
    mappings.  Labels where either side lacks a score are skipped.
    """
    if set(original) != set(recoded):
        raise LabelMismatch(
            f"labels differ: {sorted(set(original) ^ set(recoded))}"
        )
    labels = sorted(original)
    fits = {}
    for name in scores:
        pairs = [
            (_score_value(original[l], name), _score_value(recoded[l], name)) for l in labels
        ]
        pairs = [(a, b) for a, b in pairs if a is not None and b is not None]
        if len(pairs) < 3:
            raise TooFewPoints(f"score {name!r}: fewer than three matched languages")
        xs, ys = zip(*pairs)
        fits[name] = fit_line(xs, ys)
    return fits


def parameter_correlogram(
    results: list[LanguageResult], method: str = "kendall"
) -> tuple[AdjustedBattery, dict[str, CorrelationTest]]:
    """Two-sided correlation of each score with each basic parameter.

    Holm adjustment runs over the whole matrix.  Cell labels are
    ``"<score>~<param>"``; cells with fewer than three usable languages or a
    degenerate sample are reported with mark ``-``.
    """
    if len(results) < 3:
        raise TooFewPoints("a correlogram needs at least three languages")
    labels, raw, tests = [], [], {}
    for score in CORRELOGRAM_SCORES:
        for param in CORRELOGRAM_PARAMS:
            cell = f"{score}~{param}"
            labels.append(cell)
            xs, ys = [], []
            for res in results:
                s = getattr(res.report, score)
                v = getattr(res, param)
                if s is not None and v is not None:
                    xs.append(s)
                    ys.append(v)
            try:
                if len(xs) < 3:
                    raise TooFewPoints(f"{cell}: fewer than three languages")
                test = correlation_test(xs, ys, method, "two-sided")
            except LengthOptError:
                raw.append(None)
                continue
            tests[cell] = test
            raw.append(test.p_value)
    return holm_bonferroni(raw, labels), tests
