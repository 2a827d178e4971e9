"""Optimality scores of a frequency-length table.

``eta = L_min / L``, ``psi = (L_r - L) / (L_r - L_min)`` and
``omega = tau / tau_min``.  Scores whose denominator vanishes raise
:class:`~lengthopt.errors.DegenerateTable`; :func:`score_report` turns those
errors into recorded absences.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .core import (
    FrequencyLengthTable,
    mean_token_length,
    minimum_arrangement,
    minimum_baseline,
    random_baseline,
)
from .correlation import PairCounts, goodman_kruskal_gamma, kendall_tau_fast, pearson_r, spearman_rho
from .errors import DegenerateTable, LengthOptError, ZeroLength, ZeroVariance

__all__ = [
    "ScoreReport",
    "PsiDecomposition",
    "eta",
    "psi",
    "omega",
    "omega_exact",
    "tau",
    "tau_min",
    "rho_min",
    "omega_rho",
    "psi_decomposition",
    "score_report",
    "SCORE_FIELDS",
]


def _constant(values: np.ndarray) -> bool:
    return bool(np.all(values == values[0]))


def eta(table: FrequencyLengthTable) -> float:
    L = mean_token_length(table)
    if L == 0:
        raise ZeroLength("eta is undefined when every length is zero")
    L_min, _ = minimum_baseline(table)
    return L_min / L


def _psi_parts(table: FrequencyLengthTable) -> tuple[float, float]:
    # L_r - L and L_r - L_min scaled by n*T, summed term by term so that
    # equal arrangements give bit-identical numerator and denominator
    if table.n < 2 or _constant(table.frequencies) or _constant(table.lengths):
        raise DegenerateTable("L_r equals L_min (constant frequencies or lengths)")
    n, T = table.n, table.T
    arr = minimum_arrangement(table)
    num = math.fsum((T - n * table.frequencies) * table.lengths)
    den = math.fsum((T - n * arr.frequencies) * arr.lengths)
    return num, den


def psi(table: FrequencyLengthTable) -> float:
    num, den = _psi_parts(table)
    return num / den


def tau(table: FrequencyLengthTable) -> tuple[float, PairCounts]:
    if table.n < 2:
        raise DegenerateTable("Kendall tau needs at least two types")
    return kendall_tau_fast(table.frequencies, table.lengths)


def tau_min(table: FrequencyLengthTable) -> tuple[float, PairCounts]:
    """Kendall tau between probabilities and the length-minimising arrangement."""
    if table.n < 2:
        raise DegenerateTable("Kendall tau needs at least two types")
    arr = minimum_arrangement(table)
    return kendall_tau_fast(arr.frequencies, arr.lengths)


def omega_exact(table: FrequencyLengthTable) -> Fraction:
    """``(n_d - n_c) / n_d,min`` as an exact rational."""
    _, counts = tau(table)
    _, counts_min = tau_min(table)
    if counts_min.n_d == 0:
        raise DegenerateTable("tau_min is 0: the minimum arrangement has no discordant pairs")
    assert counts_min.n_c == 0
    return Fraction(counts.n_d - counts.n_c, counts_min.n_d)


def omega(table: FrequencyLengthTable) -> float:
    t, _ = tau(table)
    t_min, counts_min = tau_min(table)
    if counts_min.n_d == 0:
        raise DegenerateTable("tau_min is 0: the minimum arrangement has no discordant pairs")
    value = t / t_min
    dual = omega_exact(table)
    assert abs(value - float(dual)) <= 1e-12 * max(1.0, abs(value)), (value, dual)
    return float(dual)


def rho_min(table: FrequencyLengthTable) -> float:
    arr = minimum_arrangement(table)
    return spearman_rho(arr.frequencies, arr.lengths)


def omega_rho(table: FrequencyLengthTable) -> float:
    """Spearman analogue of omega, ``rho / rho_min``."""
    if table.n < 2:
        raise DegenerateTable("Spearman rho needs at least two types")
    try:
        r_min = rho_min(table)
        r = spearman_rho(table.frequencies, table.lengths)
    except ZeroVariance as exc:
        raise DegenerateTable(str(exc)) from None
    if r_min >= 0:
        raise DegenerateTable("rho_min is not negative")
    return r / r_min


@dataclass(frozen=True)
class PsiDecomposition:
    """Psi written as ``-a * r`` with ``a = (n-1) s_p s_l / (L_r - L_min)``."""

    a: float
    r: float
    s_p: float
    s_l: float
    s_pl: float
    psi: float
    L_min: float
    L: float
    L_r: float


def psi_decomposition(table: FrequencyLengthTable) -> PsiDecomposition:
    n = table.n
    if n < 2:
        raise ZeroVariance("sample deviations need at least two types")
    p = table.probabilities
    l = table.lengths
    s_p = float(np.std(p, ddof=1))
    s_l = float(np.std(l, ddof=1))
    if s_p == 0 or s_l == 0:
        raise ZeroVariance("probabilities or lengths are constant")
    s_pl = math.fsum((p - p.mean()) * (l - l.mean())) / (n - 1)
    L = mean_token_length(table)
    L_r = random_baseline(table)
    L_min, _ = minimum_baseline(table)
    r = pearson_r(p, l)
    a = (n - 1) * s_p * s_l / (L_r - L_min)
    value = psi(table)
    scale = max(1.0, abs(value))
    if abs(value + a * r) > 1e-9 * scale:
        raise ArithmeticError(f"psi={value} disagrees with -a*r={-a * r}")
    return PsiDecomposition(a, r, s_p, s_l, s_pl, value, L_min, L, L_r)


SCORE_FIELDS = (
    "L_min", "L", "L_r", "tau", "tau_min", "eta", "psi", "omega",
    "rho", "rho_min", "omega_rho", "pearson_r", "gamma",
)


@dataclass(frozen=True)
class ScoreReport:
    """All scores for one table.

    A field is ``None`` when it was not requested or could not be computed;
    in the latter case ``absent`` maps the field name to the reason.
    """

    n: int
    T: int
    L: float
    L_min: float
    L_r: float
    tau: float | None = None
    tau_min: float | None = None
    eta: float | None = None
    psi: float | None = None
    omega: float | None = None
    rho: float | None = None
    rho_min: float | None = None
    omega_rho: float | None = None
    pearson_r: float | None = None
    gamma: float | None = None
    absent: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def all_scores_absent(self) -> bool:
        return self.eta is None and self.psi is None and self.omega is None


def _attempt(absent: dict, name: str, fn):
    try:
        return fn()
    except LengthOptError as exc:
        absent[name] = f"{type(exc).__name__}: {exc}"
        return None


def score_report(
    table: FrequencyLengthTable,
    with_rho: bool = False,
    with_gamma: bool = False,
    with_pearson: bool = True,
) -> ScoreReport:
    absent: dict[str, str] = {}
    L = mean_token_length(table)
    L_r = random_baseline(table)
    L_min, _ = minimum_baseline(table)
    values = dict(
        tau=_attempt(absent, "tau", lambda: tau(table)[0]),
        tau_min=_attempt(absent, "tau_min", lambda: tau_min(table)[0]),
        eta=_attempt(absent, "eta", lambda: eta(table)),
        psi=_attempt(absent, "psi", lambda: psi(table)),
        omega=_attempt(absent, "omega", lambda: omega(table)),
    )
    if with_pearson:
        values["pearson_r"] = _attempt(
            absent, "pearson_r", lambda: pearson_r(table.probabilities, table.lengths)
        )
    if with_rho:
        values["rho"] = _attempt(absent, "rho", lambda: spearman_rho(table.frequencies, table.lengths))
        values["rho_min"] = _attempt(absent, "rho_min", lambda: rho_min(table))
        values["omega_rho"] = _attempt(absent, "omega_rho", lambda: omega_rho(table))
    if with_gamma:
        values["gamma"] = _attempt(absent, "gamma", lambda: goodman_kruskal_gamma(tau(table)[1]))
    return ScoreReport(n=table.n, T=table.T, L=L, L_min=L_min, L_r=L_r, absent=absent, **values)
