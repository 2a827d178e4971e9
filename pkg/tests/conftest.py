import numpy as np
import pytest

from lengthopt.core import FrequencyLengthTable


@pytest.fixture
def three_types():
    return FrequencyLengthTable.from_columns([100, 20, 5], [2, 1, 3], ["aa", "b", "ccc"])


def zipf_fixture(n=100, seed=0):
    """Zipfian frequencies with word-like lengths (1 + Poisson(5))."""
    rng = np.random.default_rng(seed)
    freqs = [max(1, round(10_000 / i)) for i in range(1, n + 1)]
    lengths = (1 + rng.poisson(5, n)).tolist()
    return FrequencyLengthTable.from_columns(freqs, lengths)


def random_table(rng, n_max=60, n_min=2, float_lengths=False):
    n = int(rng.integers(n_min, n_max + 1))
    freqs = rng.zipf(1.6, n).clip(max=5000)
    if float_lengths:
        lengths = np.round(rng.uniform(0.05, 2.0, n), 3)
    else:
        lengths = rng.integers(1, int(rng.integers(2, 15)) + 1, n)
    return FrequencyLengthTable.from_columns(freqs.tolist(), lengths.tolist())


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in getattr(rep, "nodeid", "") and rep.when == "call":
                rows.append((rep.nodeid.split("::")[-1], outcome))
    if rows:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in sorted(rows):
            terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


PLANTED_FOREIGN = frozenset("жукщиё")


def bimodal_tokens(seed=0, n_tokens=3000):
    """Latin-letter words plus a handful of rare Cyrillic words.

    Returns ``(tokens, foreign_words)``; the Cyrillic characters are the
    planted low-frequency cluster.
    """
    from lengthopt.ingest import TokenRecord

    rng = np.random.default_rng(seed)
    letters = list("etaoinshrdlcumwfgypb")
    words = ["".join(rng.choice(letters, int(rng.integers(1, 8)))) for _ in range(400)]
    weights = 1.0 / np.arange(1, len(words) + 1)
    picks = rng.choice(len(words), n_tokens, p=weights / weights.sum())
    foreign = ["жук", "щи", "ёж", "жи"]
    tokens = [TokenRecord(words[i]) for i in picks] + [TokenRecord(w) for w in foreign]
    order = rng.permutation(len(tokens))
    return [tokens[i] for i in order], foreign
