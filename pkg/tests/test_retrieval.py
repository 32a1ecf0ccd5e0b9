import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clpd.lexicon import stoplist
from clpd.mtm import SimilarityThresholds
from clpd.pipeline import CollectionDetector
from clpd.retrieval import (Document, expand_query, extract_keywords, index_documents,
                            load_documents, retrieve_candidates, segment_sentences, tokenize)


def _surfaces(tokens):
    return [(t.surface, t.offset) for t in tokens]


def test_tokenize_examples():
    assert _surfaces(tokenize("The Man ran.")) == [("the", 0), ("man", 4), ("ran", 8)]
    assert tokenize("") == []
    assert _surfaces(tokenize("l'ami")) == [("l", 0), ("ami", 2)]
    assert _surfaces(tokenize("Über-Straße 42")) == [("über", 0), ("strasse", 5), ("42", 12)]


@given(st.text(max_size=200))
def test_token_offsets_recoverable(text):
    for tok in tokenize(text):
        assert text[tok.offset:tok.end].casefold() == tok.surface


@pytest.mark.parametrize("text,n", [("A b. C d.", 2), ("No terminator", 1), ("Mr. Smith ran.", 2),
                                    ("One.\n\nTwo", 2), ("Para one\n\nPara two", 2), ("", 0)])
def test_segment_sentences_examples(text, n):
    assert len(segment_sentences(text)) == n


@given(st.text(alphabet="ab .!?\n", max_size=120))
def test_sentences_tile_text_and_own_every_token(text):
    doc = Document.from_text("d", text)
    pos = 0
    for off, length in doc.sentences:
        assert off == pos and length > 0
        pos += length
    assert pos == len(text)
    owner = doc.sentence_of()
    assert len(owner) == len(doc.tokens)
    for tok, i in zip(doc.tokens, owner):
        off, length = doc.sentences[i]
        assert off <= tok.offset and tok.end <= off + length


def test_index_small_example():
    index = index_documents([Document.from_text("d1", "a b a")])
    assert index.lookup("a") == [("d1", [0, 2])]
    assert index.lookup("b") == [("d1", [1])]
    assert index.doc_lengths == {"d1": 3}
    assert len(index_documents([])) == 0


def test_index_rejects_duplicate_ids():
    with pytest.raises(ValueError, match="duplicate"):
        index_documents([Document.from_text("d", "x"), Document.from_text("d", "y")])


def test_index_agrees_with_linear_scan(small_world):
    from clpd.synth import make_corpus

    corpus = make_corpus(small_world.lexicon, small_world.freqs,
                         small_world.cfg.replace(n_sources=200, n_cases=0).corpus_spec())
    docs = [Document.from_text(d.id, d.text) for d in corpus.sources]
    index = index_documents(docs)
    rng = random.Random(3)
    for _ in range(50):
        doc = rng.choice(docs)
        term = rng.choice(doc.tokens).surface if rng.random() < 0.7 else rng.choice(docs).tokens[0].surface
        scan = [p for p, t in enumerate(doc.tokens) if t.surface == term]
        postings = dict(index.lookup(term))
        assert postings.get(doc.id, []) == scan
        assert [d for d, _ in index.lookup(term)] == sorted(postings)


def test_index_completeness(small_world):
    docs = small_world.sources[:10]
    index = index_documents(docs)
    for doc in docs:
        for tok in doc.tokens[:30]:
            hits = retrieve_candidates(index, {tok.surface: {tok.surface}}, min_matches=1)
            assert doc.id in {h.doc_id for h in hits}


def test_extract_keywords_examples():
    doc = Document.from_text("d", "alpha alpha beta beta beta beta beta gamma gamma gamma the")
    assert extract_keywords(doc) == {"alpha", "gamma", "the"}
    assert extract_keywords(doc, {"the"}) == {"alpha", "gamma"}


def test_expand_query(toy, toy_model):
    model, _ = toy_model
    th = SimilarityThresholds()
    sets = toy.context_sets()
    pivot = toy.pivots[10]
    expanded = expand_query([pivot, "zzz"], model, th)
    assert expanded["zzz"] == {"zzz"}
    assert sets[pivot] | {pivot} <= expanded[pivot]
    assert expand_query([], model, th) == {}
    assert all(kw in terms for kw, terms in expand_query(toy.pivots, model, th).items())


def test_candidates_threshold():
    six = Document.from_text("six", "k1 k2 k3 k4 k5 k6")
    four = Document.from_text("four", "k1 k2 x3 k4 k5")
    index = index_documents([six, four])
    expanded = {f"q{i}": {f"k{i}"} for i in range(1, 7)}
    found = retrieve_candidates(index, expanded, 5)
    assert [(c.doc_id, c.match_count) for c in found] == [("six", 6)]
    assert {c.doc_id for c in retrieve_candidates(index, expanded, 4)} == {"six", "four"}
    with pytest.raises(ValueError):
        retrieve_candidates(index, expanded, 0)


def _brute_candidates(docs, expanded, min_matches):
    out = []
    for doc in docs:
        words = {t.surface for t in doc.tokens}
        n = sum(1 for kw, terms in expanded.items() if terms & words)
        if n >= min_matches:
            out.append((doc.id, n))
    return sorted(out, key=lambda t: (-t[1], t[0]))


@given(st.lists(st.lists(st.sampled_from("abcdefghij"), max_size=12), min_size=1, max_size=50),
       st.dictionaries(st.sampled_from("abcdefghijk"), st.sets(st.sampled_from("abcdefghijxyz"), max_size=3),
                       max_size=8),
       st.integers(1, 4))
@settings(max_examples=60)
def test_candidates_equal_brute_force(doc_words, expanded, min_matches):
    docs = [Document.from_text(f"d{i:02d}", " ".join(w)) for i, w in enumerate(doc_words)]
    index = index_documents(docs)
    got = retrieve_candidates(index, expanded, min_matches)
    assert [(c.doc_id, c.match_count) for c in got] == _brute_candidates(docs, expanded, min_matches)
    for c in got:
        assert all(index.lookup(term) for _, term, _ in c.matched)


def test_true_source_among_candidates(small_world):
    w = small_world
    det = CollectionDetector(w.model, w.sources, stoplist(w.freqs, w.cfg.pivot()), w.cfg)
    total = found = 0
    for suspect in w.suspects:
        ids = {c.doc_id for c in det.candidates(suspect)}
        for case in w.corpus.cases[suspect.id]:
            total += 1
            found += case.source.doc in ids
    assert total and found / total >= 0.9


def test_load_documents_manifest_and_glob(tmp_path):
    (tmp_path / "a.txt").write_text("Hello there.", encoding="utf-8")
    (tmp_path / "b.txt").write_bytes(b"\xff\xfe bad")
    docs, warnings = load_documents(tmp_path)
    assert [d.id for d in docs] == ["a"] and len(warnings) == 1
    (tmp_path / "manifest.tsv").write_text("x\tfr\ta.txt\n", encoding="utf-8")
    docs, _ = load_documents(tmp_path)
    assert [(d.id, d.language) for d in docs] == [("x", "fr")]
    (tmp_path / "manifest.tsv").write_text("x\tfr\n", encoding="utf-8")
    with pytest.raises(ValueError, match=":1:"):
        load_documents(tmp_path)
