from pathlib import Path

import numpy as np
import pytest
from tripx.extract.config import SynthConfig
from tripx.extract.core import AnnotatedSentence, EntitySpan, RelationSet, Sentence, Triple
from tripx.extract.data import (
    classifypattern,
    datasetstats,
    loaddataset,
    loadrelations,
    readrecords,
    readsentences,
    resolvespan,
    savedataset,
    split,
)
from tripx.extract.errors import ParseError, UnresolvableEntity
from tripx.extract.synthetic import gensynthetic

FIXTURES = Path(__file__).parent / "fixtures"
SAMPLE = FIXTURES / "sample.json"


def triple(s, k, o):
    return Triple(EntitySpan(*s), k, EntitySpan(*o))


def annotated(n, triples):
    return AnnotatedSentence(
        Sentence("x", [f"t{i}" for i in range(n)]), [triple(*t) for t in triples]
    )


def test_loaddataset_sample():
    dataset = loaddataset(SAMPLE)
    assert len(dataset) == 4
    assert dataset.relations.names == ("lives_in", "works_for", "located_in", "spouse")
    assert [s.id for s in dataset.sentences] == ["s1", "s2", "s3", "s4"]
    assert [(r.index, r.id) for r in dataset.skipped] == [(4, "s5")]
    assert "Zed" in dataset.skipped[0].reason

    first = dataset.sentences[0]
    assert first.sentence.tokens == ("Alice", "lives", "in", "Paris", ".")
    assert first.triples == {triple((0, 0), 0, (3, 3))}
    overlap = dataset.sentences[2]
    assert overlap.triples == {triple((0, 2), 2, (2, 2))}


def test_loaddataset_last_word_mode():
    dataset = loaddataset(SAMPLE, mode="last_word")
    assert dataset.sentences[2].triples == {triple((2, 2), 2, (2, 2))}
    assert dataset.sentences[1].triples == {
        triple((0, 0), 1, (3, 3)),
        triple((0, 0), 1, (5, 5)),
    }


def test_loaddataset_fixed_relation_vocabulary():
    dataset = loaddataset(SAMPLE, relations=RelationSet(("lives_in",)))
    assert [s.id for s in dataset.sentences] == ["s1"]
    reasons = {r.id: r.reason for r in dataset.skipped}
    assert set(reasons) == {"s2", "s3", "s4", "s5"}
    assert "relation vocabulary" in reasons["s2"]

    dataset = loaddataset(SAMPLE, relations=FIXTURES / "relations.txt")
    assert len(dataset) == 4
    assert dataset.relations == loadrelations(FIXTURES / "relations.txt")


def test_loaddataset_skips_bad_records(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text(
        "\n".join(
            [
                '{"id": "ok", "text": "A hit B", "triple_list": []}',
                '{"id": "blank", "text": "   ", "triple_list": []}',
                '{"id": "long", "text": "a b c d e f", "triple_list": []}',
                '{"id": "broken", "text": "A hit B", "triple_list": [["A", "hit"]]}',
            ]
        ),
        encoding="utf-8",
    )
    dataset = loaddataset(path, maxlen=5)
    assert [s.id for s in dataset.sentences] == ["ok"]
    assert dataset.sentences[0].triples == frozenset()
    assert [r.id for r in dataset.skipped] == ["blank", "long", "broken"]
    with pytest.raises(ValueError):
        loaddataset(path, mode="middle_word")


def test_resolvespan_first_occurrence():
    tokens = ["Paris", "loves", "Paris", "Hilton"]
    assert resolvespan(tokens, "Paris") == EntitySpan(0, 0)
    assert resolvespan(tokens, "Paris Hilton") == EntitySpan(2, 3)
    assert resolvespan(tokens, "Paris Hilton", mode="last_word") == EntitySpan(3, 3)
    with pytest.raises(UnresolvableEntity):
        resolvespan(tokens, "London")
    with pytest.raises(UnresolvableEntity):
        resolvespan(tokens, "   ")


def test_readrecords_formats_and_errors(tmp_path):
    lines = tmp_path / "lines.jsonl"
    lines.write_text('{"id": 1}\n\n{"id": 2}\n', encoding="utf-8")
    assert readrecords(lines) == [{"id": 1}, {"id": 2}]
    empty = tmp_path / "empty.json"
    empty.write_text("", encoding="utf-8")
    assert readrecords(empty) == []
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": 1}\n{"id":\n', encoding="utf-8")
    with pytest.raises(ParseError, match="line 2"):
        readrecords(bad)
    scalars = tmp_path / "scalars.json"
    scalars.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ParseError):
        readrecords(scalars)
    with pytest.raises(FileNotFoundError):
        readrecords(tmp_path / "missing.json")


def test_readsentences_ignores_triples(tmp_path):
    sentences, skipped = readsentences(SAMPLE)
    assert [s.id for s in sentences] == ["s1", "s2", "s3", "s4", "s5"]
    path = tmp_path / "raw.jsonl"
    path.write_text('{"id": "a", "text": "Hi there"}\n{"id": "b"}\n', encoding="utf-8")
    sentences, skipped = readsentences(path)
    assert [s.tokens for s in sentences] == [("Hi", "there")]
    assert [r.id for r in skipped] == ["b"]


def test_loadrelations_rejects_duplicates(tmp_path):
    path = tmp_path / "relations.txt"
    path.write_text("a\nb\na\n", encoding="utf-8")
    with pytest.raises(ParseError):
        loadrelations(path)


def test_classifypattern_examples():
    assert classifypattern(annotated(5, [((0, 0), 0, (2, 2))])) == {"Normal"}
    assert classifypattern(annotated(5, [])) == {"Normal"}
    seo = annotated(5, [((0, 0), 0, (2, 2)), ((0, 0), 0, (4, 4))])
    assert classifypattern(seo) == {"SEO"}
    epo = annotated(5, [((0, 0), 0, (2, 2)), ((0, 0), 1, (2, 2))])
    assert classifypattern(epo) == {"EPO"}
    assert classifypattern(epo, seo="at_least_one") == {"EPO", "SEO"}
    reversed = annotated(5, [((0, 0), 0, (2, 2)), ((2, 2), 0, (0, 0))])
    assert classifypattern(reversed) == {"EPO"}
    soo = annotated(5, [((0, 2), 0, (2, 2))])
    assert classifypattern(soo) == {"SOO"}


def test_classifypattern_cross_overlap():
    cross = annotated(6, [((0, 1), 0, (4, 4)), ((3, 3), 1, (1, 2))])
    assert "SOO" not in classifypattern(cross)
    assert "SOO" in classifypattern(cross, soo="cross")


def spanset(span):
    return set(range(span.start, span.end + 1))


def bruteforcepatterns(triples, seo, soo):
    triples = list(triples)
    found = set()
    for i in range(len(triples)):
        for j in range(i + 1, len(triples)):
            a, b = triples[i], triples[j]
            samepair = (a.subject == b.subject and a.object == b.object) or (
                a.subject == b.object and a.object == b.subject
            )
            touching = a.subject in (b.subject, b.object) or a.object in (b.subject, b.object)
            if samepair:
                found.add("EPO")
                if seo == "at_least_one":
                    found.add("SEO")
            elif touching:
                found.add("SEO")
    for i, a in enumerate(triples):
        if spanset(a.subject) & spanset(a.object):
            found.add("SOO")
        if soo == "cross":
            for j, b in enumerate(triples):
                if i != j and a.subject != b.object and spanset(a.subject) & spanset(b.object):
                    found.add("SOO")
    return found or {"Normal"}


def randomsentence(generator, index):
    length = int(generator.integers(1, 13))
    triples = set()
    for _ in range(int(generator.integers(0, 6))):
        spans = []
        for _ in range(2):
            start = int(generator.integers(length))
            end = int(generator.integers(start, min(start + 3, length)))
            spans.append(EntitySpan(start, end))
        triples.add(Triple(spans[0], int(generator.integers(3)), spans[1]))
    return AnnotatedSentence(Sentence(f"r{index}", [f"t{i}" for i in range(length)]), triples)


@pytest.mark.parametrize("seo", ["exactly_one", "at_least_one"])
@pytest.mark.parametrize("soo", ["within", "cross"])
def test_classifypattern_matches_bruteforce(seo, soo):
    counts = {"Normal": 250, "SEO": 250, "EPO": 250, "SOO": 250}
    corpus = gensynthetic(SynthConfig(seed=17, counts=counts, clauses=(1, 3), lengthrange=(5, 40)))
    generator = np.random.default_rng(17)
    sentences = corpus.sentences + [randomsentence(generator, i) for i in range(1000)]
    for sentence in sentences:
        assert classifypattern(sentence, seo, soo) == bruteforcepatterns(sentence.triples, seo, soo)


def test_datasetstats_sample():
    dataset = loaddataset(SAMPLE)
    stats = datasetstats(dataset.sentences, dataset.relations)
    assert stats.asdict() == {
        "sentences": 4,
        "Normal": 1,
        "SEO": 1,
        "EPO": 1,
        "SOO": 1,
        "N=1": 2,
        "N>1": 2,
        "triples": 6,
        "relations": 4,
    }
    header, values = stats.table().splitlines()
    assert header.split() == list(stats.asdict())
    assert values.split() == [str(v) for v in stats.asdict().values()]


def test_datasetstats_counts_used_relations_without_a_set():
    sentences = [annotated(5, [((0, 0), 3, (2, 2))]), annotated(3, [])]
    stats = datasetstats(sentences)
    assert stats.relations == 1
    assert stats.single == 1
    assert stats.normal == 2


def test_savedataset_roundtrip(tmp_path):
    dataset = loaddataset(SAMPLE)
    path = tmp_path / "saved.jsonl"
    savedataset(dataset.sentences, dataset.relations, path)
    reloaded = loaddataset(path)
    assert reloaded.relations.names == dataset.relations.names
    assert [a.triples for a in reloaded.sentences] == [a.triples for a in dataset.sentences]
    assert not reloaded.skipped


def test_split_is_seeded_and_disjoint():
    sentences = [annotated(3, []) for _ in range(10)]
    train, valid = split(sentences, 0.3, np.random.default_rng(0))
    assert len(train) == 7 and len(valid) == 3
    again = split(sentences, 0.3, np.random.default_rng(0))
    assert [id(s) for s in again[1]] == [id(s) for s in valid]
    assert not {id(s) for s in train} & {id(s) for s in valid}
    assert split(sentences, 0.0)[1] == []
    with pytest.raises(ValueError):
        split(sentences, 1.0)
