"""Permutation null model: random re-pairing of frequencies and lengths.

Replicate ``i`` draws its permutation from its own generator, seeded with
``SeedSequence(seed, spawn_key=(i,))``.  Results are therefore a function of
``(seed, R)`` only, whatever the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import FrequencyLengthTable, mean_token_length, minimum_arrangement, minimum_baseline, random_baseline
from .correlation import kendall_tau_fast

__all__ = [
    "NullEstimate",
    "PermutationTestResult",
    "replicate_rng",
    "shuffle_lengths",
    "monte_carlo_null",
    "permutation_test_L",
]

# replicates per work unit; also bounds memory of the batched pair counting
_CHUNK = 512
_PAIR_BUDGET = 4_000_000


def replicate_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for replicate ``key`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def shuffle_lengths(table: FrequencyLengthTable, rng: np.random.Generator) -> FrequencyLengthTable:
    """Uniformly random permutation of the length column; frequencies stay put."""
    return table.with_lengths(rng.permutation(table.lengths))


@dataclass(frozen=True)
class NullEstimate:
    R: int
    seed: int
    mean_eta: float | None
    sd_eta: float | None
    valid_eta: int
    mean_psi: float | None
    sd_psi: float | None
    valid_psi: int
    mean_omega: float | None
    sd_omega: float | None
    valid_omega: int
    L_min: float
    L_r: float

    @property
    def eta_bound(self) -> float | None:
        """Jensen lower bound ``L_min / L_r`` for the expected eta."""
        return self.L_min / self.L_r if self.L_r > 0 else None


@dataclass(frozen=True)
class PermutationTestResult:
    observed_L: float
    R: int
    left_tail: int
    p_value: float
    seed: int


def _permutations(n: int, seed: int, start: int, stop: int) -> np.ndarray:
    out = np.empty((stop - start, n), dtype=np.int64)
    for k, i in enumerate(range(start, stop)):
        out[k] = replicate_rng(seed, i).permutation(n)
    return out


def _kendall_s_batch(freqs: np.ndarray, lengths: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """``n_c - n_d`` between ``freqs`` and each permuted length column."""
    n = freqs.size
    if n * n <= _PAIR_BUDGET:
        iu, ju = np.triu_indices(n, 1)
        sign_f = np.sign(freqs[iu] - freqs[ju]).astype(np.int8)
        out = np.empty(perms.shape[0], dtype=np.int64)
        step = max(1, _PAIR_BUDGET // max(1, iu.size))
        for a in range(0, perms.shape[0], step):
            lp = lengths[perms[a:a + step]]
            sign_l = np.sign(lp[:, iu] - lp[:, ju]).astype(np.int8)
            out[a:a + step] = (sign_l.astype(np.int64) * sign_f).sum(axis=1)
        return out
    out = np.empty(perms.shape[0], dtype=np.int64)
    for k, perm in enumerate(perms):
        _, c = kendall_tau_fast(freqs, lengths[perm])
        out[k] = c.n_c - c.n_d
    return out


def _run(n_reps: int, workers: int, job):
    bounds = [(a, min(a + _CHUNK, n_reps)) for a in range(0, n_reps, _CHUNK)]
    if workers <= 1 or len(bounds) == 1:
        parts = [job(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: job(*ab), bounds))
    return parts


def _summary(values: np.ndarray) -> tuple[float | None, float | None, int]:
    values = values[~np.isnan(values)]
    k = values.size
    if k == 0:
        return None, None, 0
    mean = math.fsum(values) / k
    sd = math.sqrt(math.fsum((values - mean) ** 2) / (k - 1)) if k > 1 else 0.0
    return mean, sd, k


def monte_carlo_null(
    table: FrequencyLengthTable, R: int, seed: int, workers: int = 1
) -> NullEstimate:
    """Means and SDs of eta, psi and omega over ``R`` length shuffles.

    Replicates where a score is undefined are left out of that score's mean.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    n, T = table.n, table.T
    freqs = table.frequencies
    lengths = table.lengths
    L_min, _ = minimum_baseline(table)
    L_r = random_baseline(table)
    arr = minimum_arrangement(table)
    psi_defined = n >= 2 and not (np.all(freqs == freqs[0]) or np.all(lengths == lengths[0]))
    psi_den = math.fsum((T - n * arr.frequencies) * arr.lengths) if psi_defined else 0.0
    nd_min = kendall_tau_fast(arr.frequencies, arr.lengths)[1].n_d if n >= 2 else 0
    weights = (T - n * freqs).astype(np.float64)

    def job(a, b):
        perms = _permutations(n, seed, a, b)
        lp = lengths[perms]
        L = (lp * freqs).sum(axis=1) / T
        with np.errstate(divide="ignore", invalid="ignore"):
            eta = np.where(L > 0, L_min / L, np.nan)
        if psi_defined:
            psi = np.array([math.fsum(weights * row) for row in lp]) / psi_den
        else:
            psi = np.full(b - a, np.nan)
        if nd_min > 0:
            omega = -_kendall_s_batch(freqs, lengths, perms) / nd_min
        else:
            omega = np.full(b - a, np.nan)
        return eta, psi, omega

    parts = _run(R, workers, job)
    eta_all = np.concatenate([p[0] for p in parts])
    psi_all = np.concatenate([p[1] for p in parts])
    omega_all = np.concatenate([p[2] for p in parts]).astype(np.float64)
    m_eta, s_eta, k_eta = _summary(eta_all)
    m_psi, s_psi, k_psi = _summary(psi_all)
    m_om, s_om, k_om = _summary(omega_all)
    return NullEstimate(R, seed, m_eta, s_eta, k_eta, m_psi, s_psi, k_psi, m_om, s_om, k_om, L_min, L_r)


def permutation_test_L(
    table: FrequencyLengthTable, R: int, seed: int, workers: int = 1
) -> PermutationTestResult:
    """Left-tailed permutation test of the mean token length.

    ``p = (b + 1) / (R + 1)`` where ``b`` counts shuffles with ``L <= L_obs``.
    """
    if R < 99:
        raise ValueError("use at least 99 randomizations")
    L_obs = mean_token_length(table)
    freqs = table.frequencies
    lengths = table.lengths
    tol = 1e-12 * max(1.0, abs(L_obs))

    def job(a, b):
        perms = _permutations(table.n, seed, a, b)
        L = np.array([math.fsum(row) for row in lengths[perms] * freqs]) / table.T
        return int(np.count_nonzero(L <= L_obs + tol))

    b = sum(_run(R, workers, job))
    return PermutationTestResult(L_obs, R, b, (b + 1) / (R + 1), seed)
