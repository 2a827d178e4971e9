"""Pair counting, correlation coefficients and their significance tests.

Kendall's tau is the tau-a variant ``(n_c - n_d) / C(n, 2)``.  The fast path
sorts by ``(x, y)`` and counts the inversions left in ``y`` with a bottom-up
merge sort, so the concordant/discordant counts are exact integers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._special import normal_cdf, student_t_cdf
from .errors import (
    AllPairsTied,
    DegenerateSample,
    LengthMismatch,
    OutOfRangeP,
    TooFewPoints,
    ZeroVariance,
)

__all__ = [
    "PairCounts",
    "CorrelationTest",
    "AdjustedBattery",
    "pair_counts_naive",
    "kendall_tau_fast",
    "kendall_tau_b",
    "pearson_r",
    "midranks",
    "spearman_rho",
    "goodman_kruskal_gamma",
    "correlation_test",
    "test_left_sided",
    "holm_bonferroni",
    "significance_mark",
]

METHODS = ("kendall", "pearson", "spearman")
ALTERNATIVES = ("less", "greater", "two-sided")


@dataclass(frozen=True)
class PairCounts:
    """Classification of all ``C(n, 2)`` pairs.

    ``ties_x`` counts pairs tied in x only, ``ties_y`` pairs tied in y only
    and ``ties_xy`` pairs tied in both, so the five counts partition the
    pairs exactly.
    """

    n_c: int
    n_d: int
    ties_x: int
    ties_y: int
    ties_xy: int
    total: int

    @property
    def tied_x_any(self) -> int:
        return self.ties_x + self.ties_xy

    @property
    def tied_y_any(self) -> int:
        return self.ties_y + self.ties_xy

    @property
    def tau_a(self) -> float:
        return (self.n_c - self.n_d) / self.total


@dataclass(frozen=True)
class CorrelationTest:
    method: str
    coefficient: float
    statistic: float
    p_value: float
    p_value_left: float
    alternative: str
    n: int
    counts: PairCounts | None = None
    exact: bool = False


def _as_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"x has {x.size} values, y has {y.size}")
    if x.size < 2:
        raise TooFewPoints("at least two points are needed")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("inputs must be finite")
    return x, y


def pair_counts_naive(x: Sequence[float], y: Sequence[float]) -> PairCounts:
    """Classify every pair by direct enumeration (quadratic)."""
    x, y = _as_pair(x, y)
    n = x.size
    i, j = np.triu_indices(n, 1)
    sx = np.sign(x[i] - x[j])
    sy = np.sign(y[i] - y[j])
    prod = sx * sy
    return PairCounts(
        n_c=int(np.count_nonzero(prod > 0)),
        n_d=int(np.count_nonzero(prod < 0)),
        ties_x=int(np.count_nonzero((sx == 0) & (sy != 0))),
        ties_y=int(np.count_nonzero((sx != 0) & (sy == 0))),
        ties_xy=int(np.count_nonzero((sx == 0) & (sy == 0))),
        total=n * (n - 1) // 2,
    )


def _run_lengths(sorted_values: np.ndarray) -> np.ndarray:
    if sorted_values.size == 0:
        return np.zeros(0, dtype=np.int64)
    breaks = np.flatnonzero(sorted_values[1:] != sorted_values[:-1]) + 1
    edges = np.concatenate(([0], breaks, [sorted_values.size]))
    return np.diff(edges)


def _tied_pairs(run_lengths: np.ndarray) -> int:
    t = run_lengths.astype(np.int64)
    return int((t * (t - 1) // 2).sum())


def _count_inversions(values: np.ndarray) -> int:
    """Number of pairs ``i < j`` with ``values[i] > values[j]`` (strict)."""
    n = values.size
    if n < 2:
        return 0
    _, ranks = np.unique(values, return_inverse=True)
    ranks = ranks.astype(np.int64).ravel()
    m = int(ranks.max()) + 1
    idx = np.arange(n, dtype=np.int64)
    inversions = 0
    width = 1
    # each pass merges neighbouring sorted runs of size `width`; keys are
    # offset by block id so one global sort performs every merge at once
    while width < n:
        block = idx // (2 * width)
        is_left = (idx % (2 * width)) < width
        keys = block * m + ranks
        left = keys[is_left]
        right = keys[~is_left]
        right_block = block[~is_left]
        block_end = np.searchsorted(left, (right_block + 1) * m, side="left")
        not_greater = np.searchsorted(left, right, side="right")
        inversions += int((block_end - not_greater).sum())
        ranks = np.sort(keys, kind="stable") - block * m
        width *= 2
    return inversions


def kendall_tau_fast(x: Sequence[float], y: Sequence[float]) -> tuple[float, PairCounts]:
    """Kendall tau-a with exact pair counts in ``O(n log n)`` comparisons."""
    x, y = _as_pair(x, y)
    n = x.size
    order = np.lexsort((y, x))
    xs = x[order]
    ys = y[order]
    tied_x = _tied_pairs(_run_lengths(xs))
    same_x = np.concatenate(([False], xs[1:] == xs[:-1]))
    same_xy = same_x & np.concatenate(([False], ys[1:] == ys[:-1]))
    # runs of equal (x, y) are contiguous after the lexsort
    starts = np.flatnonzero(~same_xy)
    joint_runs = np.diff(np.concatenate((starts, [n])))
    tied_xy = _tied_pairs(joint_runs)
    tied_y = _tied_pairs(_run_lengths(np.sort(y)))
    n_d = _count_inversions(ys)
    total = n * (n - 1) // 2
    n_c = total - n_d - tied_x - tied_y + tied_xy
    counts = PairCounts(n_c, n_d, tied_x - tied_xy, tied_y - tied_xy, tied_xy, total)
    return (n_c - n_d) / total, counts


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-adjusted tau-b, kept as a diagnostic next to tau-a."""
    _, c = kendall_tau_fast(x, y)
    denom = math.sqrt((c.total - c.tied_x_any) * (c.total - c.tied_y_any))
    if denom == 0:
        raise ZeroVariance("tau-b is undefined when one variable is constant")
    return (c.n_c - c.n_d) / denom


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation ``s_xy / (s_x s_y)``."""
    x, y = _as_pair(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0 or syy == 0:
        raise ZeroVariance("Pearson r is undefined for a constant variable")
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def midranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties replaced by their average rank."""
    values = np.asarray(values, dtype=np.float64).ravel()
    order = np.argsort(values, kind="stable")
    runs = _run_lengths(values[order])
    ends = np.cumsum(runs)
    starts = ends - runs
    avg = (starts + 1 + ends) / 2.0
    ranks = np.empty(values.size, dtype=np.float64)
    ranks[order] = np.repeat(avg, runs)
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    x, y = _as_pair(x, y)
    return pearson_r(midranks(x), midranks(y))


def goodman_kruskal_gamma(x, y=None) -> float:
    """``(n_c - n_d) / (n_c + n_d)``; accepts two samples or a :class:`PairCounts`."""
    counts = x if isinstance(x, PairCounts) else kendall_tau_fast(x, y)[1]
    untied = counts.n_c + counts.n_d
    if untied == 0:
        raise AllPairsTied("gamma is undefined when every pair is tied")
    return (counts.n_c - counts.n_d) / untied


def _kendall_variance(x: np.ndarray, y: np.ndarray) -> float:
    n = x.size
    t = _run_lengths(np.sort(x)).astype(np.float64)
    u = _run_lengths(np.sort(y)).astype(np.float64)
    v0 = n * (n - 1) * (2 * n + 5)
    vt = float((t * (t - 1) * (2 * t + 5)).sum())
    vu = float((u * (u - 1) * (2 * u + 5)).sum())
    v1 = float((t * (t - 1)).sum()) * float((u * (u - 1)).sum()) / (2 * n * (n - 1))
    v2 = 0.0
    if n > 2:
        v2 = (
            float((t * (t - 1) * (t - 2)).sum())
            * float((u * (u - 1) * (u - 2)).sum())
            / (9 * n * (n - 1) * (n - 2))
        )
    return (v0 - vt - vu) / 18.0 + v1 + v2


def _tails(stat_left: float, stat_right: float, alternative: str) -> float:
    if alternative == "less":
        return stat_left
    if alternative == "greater":
        return stat_right
    return min(1.0, 2.0 * min(stat_left, stat_right))


def _kendall_exact(x, y, s_obs: int, alternative: str) -> tuple[float, float]:
    n = x.size
    if n > 8:
        raise ValueError("exact permutation p-values are limited to n <= 8")
    left = right = extreme = 0
    total = 0
    for perm in itertools.permutations(range(n)):
        _, c = kendall_tau_fast(x, y[list(perm)])
        s = c.n_c - c.n_d
        total += 1
        left += s <= s_obs
        right += s >= s_obs
        extreme += abs(s) >= abs(s_obs)
    p_left = left / total
    if alternative == "two-sided":
        return p_left, extreme / total
    return p_left, p_left if alternative == "less" else right / total


def correlation_test(
    x: Sequence[float],
    y: Sequence[float],
    method: str = "kendall",
    alternative: str = "less",
    exact: bool = False,
) -> CorrelationTest:
    """Correlation coefficient with its p-value.

    Kendall uses the tie-corrected normal approximation of ``n_c - n_d``
    (or full enumeration with ``exact=True`` for ``n <= 8``); Pearson and
    Spearman use the Student-t statistic on ``n - 2`` degrees of freedom.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if alternative not in ALTERNATIVES:
        raise ValueError(f"unknown alternative {alternative!r}")
    x, y = _as_pair(x, y)
    n = x.size

    if method == "kendall":
        tau, counts = kendall_tau_fast(x, y)
        s = counts.n_c - counts.n_d
        var = _kendall_variance(x, y)
        if var <= 0:
            raise DegenerateSample("Kendall statistic has zero variance (constant input)")
        z = s / math.sqrt(var)
        if exact:
            p_left, p = _kendall_exact(x, y, s, alternative)
        else:
            p_left = normal_cdf(z)
            p = _tails(p_left, normal_cdf(-z), alternative)
        return CorrelationTest("kendall", tau, z, p, p_left, alternative, n, counts, exact)

    if n < 3:
        raise TooFewPoints(f"{method} test needs at least three points")
    if method == "pearson":
        r = pearson_r(x, y)
    else:
        r = spearman_rho(x, y)
    df = n - 2
    if abs(r) >= 1.0:
        t = math.copysign(math.inf, r)
    else:
        t = r * math.sqrt(df / (1.0 - r * r))
    p_left = student_t_cdf(t, df)
    p = _tails(p_left, student_t_cdf(-t, df), alternative)
    return CorrelationTest(method, r, t, p, p_left, alternative, n)


def test_left_sided(x, y, method: str = "kendall", exact: bool = False) -> CorrelationTest:
    """Test against a negative association between ``x`` and ``y``."""
    return correlation_test(x, y, method, "less", exact)


test_left_sided.__test__ = False  # not a pytest test despite the name


def significance_mark(p: float | None) -> str:
    if p is None:
        return "-"
    if p <= 0.01:
        return "***"
    if p <= 0.05:
        return "**"
    if p <= 0.1:
        return "*"
    return "x"


@dataclass(frozen=True)
class AdjustedBattery:
    """A family of p-values with their Holm step-down adjustment.

    Entries whose raw p-value is ``None`` (a test that could not be run) are
    kept for reporting but excluded from the family; their mark is ``-``.
    """

    labels: tuple[str, ...]
    raw: tuple[float | None, ...]
    adjusted: tuple[float | None, ...]
    marks: tuple[str, ...]

    def rows(self):
        return list(zip(self.labels, self.raw, self.adjusted, self.marks))

    def __len__(self) -> int:
        return len(self.labels)


def holm_bonferroni(raw: Sequence[float | None], labels: Sequence[str] | None = None) -> AdjustedBattery:
    raw = list(raw)
    if labels is None:
        labels = [str(i) for i in range(len(raw))]
    labels = [str(l) for l in labels]
    if len(labels) != len(raw):
        raise LengthMismatch("labels and p-values differ in size")
    for p in raw:
        if p is not None and not (0.0 <= p <= 1.0):
            raise OutOfRangeP(f"p-value {p!r} outside [0, 1]")
    valid = [i for i, p in enumerate(raw) if p is not None]
    m = len(valid)
    adjusted: list[float | None] = [None] * len(raw)
    running = 0.0
    for k, i in enumerate(sorted(valid, key=lambda i: raw[i])):
        running = max(running, min(1.0, (m - k) * raw[i]))
        adjusted[i] = running
    return AdjustedBattery(
        tuple(labels),
        tuple(raw),
        tuple(adjusted),
        tuple(significance_mark(p) for p in adjusted),
    )
