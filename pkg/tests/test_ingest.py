import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lengthopt.core import FrequencyLengthTable
from lengthopt.errors import (
    EmptyAlphabet,
    EmptyTable,
    MalformedRow,
    MissingDuration,
    MissingForms,
    NegativeDuration,
    NonUTF8,
)
from lengthopt.ingest import (
    DEFAULT_VOWELS,
    TokenRecord,
    aggregate,
    apply_alphabet_filter,
    best_two_means_split,
    character_frequencies,
    cjk_filter,
    convergence_curve,
    drop_vowels,
    load_vowels,
    mandatory_filter,
    read_aligned,
    read_fl_table,
    read_table,
    read_tokens,
    working_alphabet,
    write_fl_table,
)
from lengthopt.scores import eta, omega, psi

from conftest import PLANTED_FOREIGN, bimodal_tokens
from oracles import brute_two_means, sse


def toks(*surfaces):
    return [TokenRecord(s) for s in surfaces]


def surfaces(records):
    return [t.surface for t in records]


# -- readers ------------------------------------------------------------------

def test_read_fl_table(tmp_path):
    p = tmp_path / "small.tsv"
    p.write_text("type\tfrequency\tlength\naa\t100\t2\nb\t20\t1\nccc\t5\t3\n", encoding="utf-8")
    t = read_table(p, "fl-table")
    assert t.n == 3 and t.T == 125
    assert t.forms == ("aa", "b", "ccc")


def test_fl_roundtrip_and_anonymous(tmp_path):
    t = FrequencyLengthTable.from_columns([3, 1], [0.25, 1.5])
    p = tmp_path / "anon.tsv"
    write_fl_table(t, p)
    assert read_fl_table(p) == t


def test_crlf_and_bom_are_normalised(tmp_path):
    p = tmp_path / "crlf.tsv"
    p.write_bytes("﻿type\tfrequency\tlength\r\nx\t2\t1\r\n".encode("utf-8"))
    t = read_fl_table(p)
    assert t.forms == ("x",) and t.lengths.tolist() == [1.0]
    q = tmp_path / "tok.txt"
    q.write_bytes(b"one\r\ntwo\r\n")
    assert surfaces(read_tokens(q)) == ["one", "two"]


def test_read_aligned_median(tmp_path):
    p = tmp_path / "al.tsv"
    p.write_text("hello\t0.31\nhello\t0.29\nhello\t0.40\n", encoding="utf-8")
    t = aggregate(read_table(p, "aligned"), "duration-median")
    assert t.forms == ("hello",) and t.frequencies.tolist() == [3]
    assert t.lengths[0] == 0.31


@pytest.mark.parametrize(
    "content, reader, exc, line",
    [
        ("type\tfrequency\tlength\na\t1\n", read_fl_table, MalformedRow, 2),
        ("type\tfrequency\tlength\na\tx\t1\n", read_fl_table, MalformedRow, 2),
        ("word\tcount\n", read_fl_table, MalformedRow, 1),
        ("type\tfrequency\tlength\na\t1\t1\nb\t0\t1\n", read_fl_table, MalformedRow, 3),
        ("a\t0.1\nb\tfast\n", read_aligned, MalformedRow, 2),
        ("a\t0.1\nb\t-0.2\n", read_aligned, NegativeDuration, 2),
        ("a\tb\tc\n", read_tokens, MalformedRow, 1),
    ],
)
def test_reader_errors(tmp_path, content, reader, exc, line):
    p = tmp_path / "bad.tsv"
    p.write_text(content, encoding="utf-8")
    with pytest.raises(exc, match=f"line {line}"):
        result = reader(p)
        list(result) if not isinstance(result, FrequencyLengthTable) else None


def test_non_utf8(tmp_path):
    p = tmp_path / "latin1.txt"
    p.write_bytes(b"ok\ncaf\xe9\n")
    with pytest.raises(NonUTF8, match="line 2"):
        list(read_tokens(p))


def test_empty_token_list_fails_downstream(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("", encoding="utf-8")
    with pytest.raises(EmptyTable):
        aggregate(read_tokens(p))


# -- mandatory filter ---------------------------------------------------------

def test_mandatory_filter_examples():
    out = list(mandatory_filter(toks("Can't", "abc123", "ÀLA", "x=y", "=", "Ünï")))
    assert surfaces(out) == ["can't", "àla", "xy", "ünï"]


def test_mandatory_filter_tags():
    records = [TokenRecord(".", tag="PUNCT"), TokenRecord("word", tag="NOUN"), TokenRecord("<unk>")]
    assert surfaces(mandatory_filter(records)) == ["word"]


def test_simple_lowercase_leaves_multi_codepoint_mappings():
    # U+0130 lowercases to two code points under the full mapping
    assert surfaces(mandatory_filter(toks("İ"))) == ["İ"]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.text(min_size=0, max_size=8), max_size=20))
def test_mandatory_filter_idempotent(words):
    once = list(mandatory_filter(toks(*words)))
    assert list(mandatory_filter(once)) == once
    assert all(t.surface for t in once)


# -- alphabet -----------------------------------------------------------------

def test_two_means_example():
    k, low, high = best_two_means_split([0, 0.1, 0.2, 5.0, 5.1])
    assert k == 3
    ranked = brute_two_means([0, 0.1, 0.2, 5.0, 5.1])
    assert ranked[0][1] == 3
    assert low + high == pytest.approx(ranked[0][0])


def test_two_means_all_equal():
    assert best_two_means_split([2.0, 2.0, 2.0])[0] == 0
    with pytest.raises(EmptyAlphabet):
        best_two_means_split([])


def test_two_means_against_brute_force():
    rng = np.random.default_rng(31)
    for _ in range(300):
        m = int(rng.integers(2, 60))
        values = sorted(np.round(rng.exponential(2.0, m), int(rng.integers(0, 3))).tolist())
        ranked = brute_two_means(values)
        k, low, high = best_two_means_split(values)
        if not ranked:
            assert k == 0
            continue
        best = ranked[0][0]
        assert low + high == pytest.approx(best, rel=1e-9, abs=1e-9)
        assert sse(values[:k]) + sse(values[k:]) == pytest.approx(best, rel=1e-9, abs=1e-9)


def test_working_alphabet_equal_frequencies():
    a = working_alphabet(toks("abc", "cab", "bca"))
    assert a.kept == frozenset("abc") and a.excluded == frozenset()
    assert a.threshold is None


def test_working_alphabet_two_characters():
    stream = toks(*(["a"] * 1000 + ["q"]))
    a = working_alphabet(stream)
    assert a.kept == {"a"} and a.excluded == {"q"}
    assert 0 < a.threshold < math.log(1000)
    kept = list(apply_alphabet_filter(toks("aa", "aq", "q", "a"), a))
    assert surfaces(kept) == ["aa", "a"]


def test_working_alphabet_cluster_contiguity():
    tokens, _ = bimodal_tokens(seed=3)
    a = working_alphabet(tokens)
    assert min(a.log_frequency[c] for c in a.kept) > max(a.log_frequency[c] for c in a.excluded)
    assert a.size_before == len(character_frequencies(tokens))


def test_bimodal_corpus_excludes_planted_characters():
    tokens, foreign = bimodal_tokens(seed=0)
    a = working_alphabet(tokens)
    assert a.excluded == PLANTED_FOREIGN
    kept = set(surfaces(apply_alphabet_filter(tokens, a)))
    assert not kept & set(foreign)


def test_loanword_with_rare_character_removed():
    words = ["the", "strasse", "and", "then", "a", "hat", "sea", "ten"] * 50 + ["straße"]
    a = working_alphabet(toks(*words))
    assert "ß" in a.excluded
    assert "straße" not in surfaces(apply_alphabet_filter(toks(*words), a))


def test_full_alphabet_is_identity():
    stream = toks("ab", "ba", "ab")
    a = working_alphabet(stream)
    assert list(apply_alphabet_filter(stream, a)) == stream


def test_working_alphabet_from_table_is_occurrence_weighted():
    t = FrequencyLengthTable.from_columns([10, 1], [2, 1], ["ab", "c"])
    assert character_frequencies(t) == {"a": 10, "b": 10, "c": 1}
    with pytest.raises(MissingForms):
        working_alphabet(FrequencyLengthTable.from_columns([1], [1]))
    with pytest.raises(EmptyAlphabet):
        working_alphabet([])


def test_cjk_filter():
    out = cjk_filter(toks("中文", "ひらがな", "中a", "abc", "カタカナ"))
    assert surfaces(out) == ["中文", "ひらがな", "カタカナ"]


# -- aggregation --------------------------------------------------------------

def test_aggregate_chars_counts_code_points():
    t = aggregate(toks("naïve", "naïve", "a"))
    assert dict(zip(t.forms, t.lengths.tolist())) == {"naïve": 5.0, "a": 1.0}
    assert t.frequencies.tolist() == [2, 1]
    # decomposed form has an extra combining code point
    assert aggregate(toks("naïve")).lengths.tolist() == [6.0]


def test_aggregate_duration_modes():
    recs = [TokenRecord("x", d) for d in (0.1, 0.4, 0.2, 0.9)]
    assert aggregate(recs, "duration-median").lengths[0] == pytest.approx(0.3)
    assert aggregate(recs, "duration-mean").lengths[0] == pytest.approx(0.4)
    assert aggregate(recs, "duration-median").lengths[0] == statistics.median([0.1, 0.4, 0.2, 0.9])
    with pytest.raises(MissingDuration):
        aggregate([TokenRecord("x", 0.1), TokenRecord("y")], "duration-median")
    with pytest.raises(ValueError):
        aggregate(recs, "syllables")


@settings(max_examples=100, deadline=None)
@given(st.lists(st.text(min_size=1, max_size=6), min_size=1, max_size=30))
def test_aggregate_length_is_filtered_code_points(words):
    filtered = list(mandatory_filter(toks(*words)))
    if not filtered:
        return
    t = aggregate(filtered)
    for form, length in zip(t.forms, t.lengths):
        assert length == len(form)
    assert t.T == len(filtered)


# -- vowels -------------------------------------------------------------------

def test_drop_vowels_examples():
    t = FrequencyLengthTable.from_columns([5, 2, 1, 1], [4, 5, 1, 3], ["casa", "aeiou", "à", "sòl"])
    d = drop_vowels(t)
    assert d.lengths.tolist() == [2, 0, 0, 2]
    assert d.forms == t.forms and d.frequencies.tolist() == t.frequencies.tolist()
    assert drop_vowels(d) == d


def test_default_vowels_include_accents():
    for ch in "aeiouàáâãäåèéêëìíîïòóôõöùúûüāēīōūǎěǐǒǔạẹịọụ":
        assert ch in DEFAULT_VOWELS
    for ch in "bcnñçy":
        assert ch not in DEFAULT_VOWELS


def test_drop_vowels_decomposed_accents():
    t = FrequencyLengthTable.from_columns([1], [4], ["càsa"])
    assert drop_vowels(t).lengths.tolist() == [2]


def test_drop_vowels_needs_forms(tmp_path):
    with pytest.raises(MissingForms):
        drop_vowels(FrequencyLengthTable.from_columns([1], [2]))
    p = tmp_path / "v.txt"
    p.write_text("a e\ny\n", encoding="utf-8")
    custom = load_vowels(p)
    assert custom == {"a", "e", "y"}
    t = FrequencyLengthTable.from_columns([1], [4], ["yoyo"])
    assert drop_vowels(t, custom).lengths.tolist() == [2]


# -- convergence --------------------------------------------------------------

def _corpus(seed=2):
    tokens, _ = bimodal_tokens(seed=seed, n_tokens=300)
    return tokens


def test_convergence_last_size_is_full_corpus():
    tokens = _corpus()
    curve = convergence_curve(tokens, reps=5, seed=1)
    T = len(tokens)
    assert curve.t[-1] == T and curve.t[:3] == (2, 4, 8)
    assert all(a < b for a, b in zip(curve.t, curve.t[1:]))
    full = aggregate(tokens)
    for name, fn in (("eta", eta), ("psi", psi), ("omega", omega)):
        assert curve.mean[name][-1] == pytest.approx(fn(full), rel=1e-12)
        assert curve.valid[name][-1] == 5
    assert all(v <= 5 for vals in curve.valid.values() for v in vals)


def test_convergence_excludes_single_type_samples():
    tokens = toks("ab", "ab", "ab", "c")
    curve = convergence_curve(tokens, reps=40, seed=0)
    assert curve.t == (2, 4)
    # two tokens give either one type or two types with equal frequency:
    # psi is never defined at t = 2, eta always is
    assert curve.valid["psi"][0] == 0 and curve.mean["psi"][0] is None
    assert curve.valid["eta"][0] == 40
    # at t = T = 4 every replicate is the full corpus
    assert curve.valid["psi"][1] == 40


def test_convergence_is_deterministic():
    tokens = _corpus(5)
    a = convergence_curve(tokens, reps=8, seed=11)
    b = convergence_curve(tokens, reps=8, seed=11, workers=4)
    assert a == b
    assert convergence_curve(tokens, reps=8, seed=12) != a
    with pytest.raises(EmptyTable):
        convergence_curve(toks("a"), reps=2)
