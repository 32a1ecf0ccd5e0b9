from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clpd.lexicon import (Lexicon, LexiconFormatError, PivotConfig, SimulationConfig,
                          build_contexts, format_contexts, format_lexicon, parse_frequencies,
                          parse_lexicon, read_contexts, select_pivots, simulate_corpus)


def test_parse_lexicon_man_example(man_lexicon):
    entry = man_lexicon.entries["man"]
    assert entry.translations == {"fr": ["homme"], "de": ["mann"], "es": ["hombre"]}
    assert man_lexicon.languages == ["fr", "de", "es"]


def test_parse_lexicon_empty_and_comments():
    assert len(parse_lexicon("")) == 0
    assert len(parse_lexicon("# header\n\n")) == 0


def test_parse_lexicon_case_folds_and_accumulates():
    lex = parse_lexicon("Friend\tFR\tAmi\nfriend\tfr\tcopain\nfriend\tfr\tami\n")
    assert lex.entries["friend"].translations == {"fr": ["ami", "copain"]}


@pytest.mark.parametrize("text,lineno", [("man\tfr\n", 1), ("# c\nman\tfr\thomme\nx\t\ty\n", 3),
                                         ("a\tb\tc\td\n", 1)])
def test_parse_lexicon_errors_report_line(text, lineno):
    with pytest.raises(LexiconFormatError) as err:
        parse_lexicon(text)
    assert err.value.lineno == lineno


def test_parse_frequencies_sorted_with_ties():
    freqs = parse_frequencies("b\t5\na\t5\nc\t9\n")
    assert freqs == [("c", 9), ("a", 5), ("b", 5)]


def test_select_pivots_rank_window():
    freqs = [(w, 100 - i) for i, w in enumerate("abcdefg")]
    assert select_pivots(freqs, PivotConfig(top_k=5, exclude_top=2)) == ["c", "d", "e"]


def test_select_pivots_full_scale():
    freqs = [(f"w{i:05d}", 30000 - i) for i in range(30000)]
    assert len(select_pivots(freqs, PivotConfig(top_k=25000, exclude_top=100))) == 24900


def test_select_pivots_short_list():
    with pytest.raises(ValueError, match="only 3 words"):
        select_pivots([("a", 3), ("b", 2), ("c", 1)], PivotConfig(top_k=5, exclude_top=0))


def test_pivot_config_invariant():
    with pytest.raises(ValueError):
        PivotConfig(top_k=100, exclude_top=100)


def test_build_contexts(man_lexicon):
    contexts, skipped = build_contexts(man_lexicon, ["man"])
    assert contexts == [["man", "homme", "mann", "hombre"]] and skipped == 0
    assert build_contexts(man_lexicon, ["zzz"]) == ([], 1)
    assert build_contexts(man_lexicon, []) == ([], 0)


def test_build_contexts_alternatives_share_pivot():
    lex = parse_lexicon("friend\tfr\tami\nfriend\tfr\tcopain\nfriend\tde\tfreund\n")
    contexts, _ = build_contexts(lex, ["friend"])
    assert contexts == [["friend", "ami", "freund"], ["friend", "copain", "freund"]]


def test_build_contexts_missing_language_skipped():
    lex = parse_lexicon("man\tfr\thomme\nman\tde\tmann\ndog\tde\thund\n")
    contexts, _ = build_contexts(lex, ["dog"])
    assert contexts == [["dog", "hund"]]


def test_simulate_corpus_counts():
    contexts = [["a", "b", "c"], ["d", "e"]]
    corpus = simulate_corpus(contexts, SimulationConfig(replicas=3, rng_seed=1))
    assert len(corpus) == 6
    assert Counter(tuple(sorted(l)) for l in corpus.lines()) == {("a", "b", "c"): 3, ("d", "e"): 3}


def test_simulate_corpus_unshuffled_lines_verbatim():
    contexts = [["a", "b", "c"], ["d", "e", "f", "g"]]
    corpus = simulate_corpus(contexts, SimulationConfig(replicas=4, shuffle_tokens=False, rng_seed=5))
    assert all(l in contexts for l in corpus.lines())


def test_simulate_corpus_full_scale_line_count():
    contexts = [[f"p{i}", f"f{i}", f"d{i}", f"s{i}", f"a{i}", f"z{i}"] for i in range(25000)]
    corpus = simulate_corpus(contexts, SimulationConfig(replicas=100, rng_seed=0))
    assert len(corpus) == 2_500_000


def test_simulate_corpus_shuffles_some_lines():
    contexts = [list("abcdef")]
    corpus = simulate_corpus(contexts, SimulationConfig(replicas=50, rng_seed=3))
    assert len({tuple(l) for l in corpus.lines()}) > 1


words = st.text(alphabet="abcdefghij", min_size=1, max_size=6)
contexts_st = st.lists(st.lists(words, min_size=2, max_size=6), min_size=1, max_size=8)


@given(contexts_st, st.integers(1, 5), st.booleans(), st.integers(0, 2**64 - 1))
@settings(max_examples=50, deadline=None)
def test_simulate_corpus_token_multiset(contexts, replicas, shuffle, seed):
    cfg = SimulationConfig(replicas=replicas, shuffle_tokens=shuffle, rng_seed=seed)
    corpus = simulate_corpus(contexts, cfg)
    expected = Counter()
    for c in contexts:
        for t in c:
            expected[t] += replicas
    assert Counter(t for l in corpus.lines() for t in l) == expected
    again = simulate_corpus(contexts, cfg)
    assert np.array_equal(corpus.ids, again.ids) and np.array_equal(corpus.offsets, again.offsets)


@given(st.lists(st.tuples(words, st.sampled_from(["fr", "de", "es"]), words), max_size=20))
@settings(max_examples=50)
def test_lexicon_tsv_roundtrip(rows):
    lex = Lexicon()
    for p, l, w in rows:
        lex.add(p, l, w)
    again = parse_lexicon(format_lexicon(lex))
    assert set(again.entries) == set(lex.entries)
    for p, e in lex.entries.items():
        assert {l: sorted(ws) for l, ws in e.translations.items()} == \
            {l: sorted(ws) for l, ws in again.entries[p].translations.items()}


@given(st.integers(1, 40), st.integers(0, 39))
def test_select_pivots_length(top_k, exclude):
    if top_k <= exclude:
        return
    freqs = [(f"w{i:03d}", 1000 - i) for i in range(50)]
    assert len(select_pivots(freqs, PivotConfig(top_k, exclude))) == top_k - exclude


def test_contexts_file_roundtrip():
    contexts = [["man", "homme", "mann"], ["dog", "chien"]]
    assert read_contexts(format_contexts(contexts)) == contexts
