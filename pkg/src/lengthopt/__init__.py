"""Optimality of word lengths: baselines, scores, tests and null models."""

__version__ = "0.1.0"

from .core import (
    FrequencyLengthTable,
    TypeEntry,
    apply_length_transform,
    mean_token_length,
    minimum_baseline,
    random_baseline,
)
from .correlation import (
    holm_bonferroni,
    kendall_tau_fast,
    pair_counts_naive,
    pearson_r,
    spearman_rho,
    test_left_sided,
)
from .scores import ScoreReport, eta, omega, psi, score_report, tau_min

__all__ = [
    "FrequencyLengthTable",
    "TypeEntry",
    "apply_length_transform",
    "mean_token_length",
    "minimum_baseline",
    "random_baseline",
    "holm_bonferroni",
    "kendall_tau_fast",
    "pair_counts_naive",
    "pearson_r",
    "spearman_rho",
    "test_left_sided",
    "ScoreReport",
    "eta",
    "omega",
    "psi",
    "score_report",
    "tau_min",
]
