from collections import Counter

import pytest
from tripx.extract.config import SynthConfig
from tripx.extract.data import classifypattern, loaddataset, savedataset
from tripx.extract.errors import InfeasibleConfig
from tripx.extract.synthetic import gensynthetic, manifestdict

COUNTS = {"Normal": 30, "SEO": 25, "EPO": 20, "SOO": 15}


def test_gensynthetic_counts_and_patterns():
    corpus = gensynthetic(SynthConfig(seed=0, counts=COUNTS))
    assert len(corpus) == sum(COUNTS.values())
    assert Counter(entry.pattern for entry in corpus.manifest) == COUNTS
    assert corpus.relations.size == 6
    for annotated, entry in zip(corpus.sentences, corpus.manifest):
        assert annotated.id == entry.id
        assert classifypattern(annotated) == {entry.pattern}
        assert annotated.triples == set(entry.triples)


def test_gensynthetic_shapes():
    config = SynthConfig(seed=1, counts=COUNTS, lengthrange=(6, 12))
    for annotated in gensynthetic(config).sentences:
        assert 6 <= annotated.sentence.length <= 12
        n = len(annotated.triples)
        assert 1 <= n <= 3
        for t in annotated.triples:
            assert 0 <= t.relation < config.relations


def test_gensynthetic_is_deterministic():
    config = SynthConfig(seed=5, counts=COUNTS)
    a, b = gensynthetic(config), gensynthetic(config)
    assert [s.sentence.tokens for s in a.sentences] == [s.sentence.tokens for s in b.sentences]
    assert [s.triples for s in a.sentences] == [s.triples for s in b.sentences]
    assert manifestdict(a) == manifestdict(b)
    c = gensynthetic(SynthConfig(seed=6, counts=COUNTS))
    assert [s.sentence.tokens for s in a.sentences] != [s.sentence.tokens for s in c.sentences]


def test_gensynthetic_survives_serialization(tmp_path):
    corpus = gensynthetic(SynthConfig(seed=2, counts=COUNTS))
    path = tmp_path / "synth.jsonl"
    savedataset(corpus.sentences, corpus.relations, path)
    dataset = loaddataset(path, relations=corpus.relations)
    assert not dataset.skipped
    assert [a.triples for a in dataset.sentences] == [a.triples for a in corpus.sentences]


def test_manifestdict_uses_relation_names():
    corpus = gensynthetic(SynthConfig(seed=3, counts={"EPO": 2}))
    entries = manifestdict(corpus)
    assert [e["pattern"] for e in entries] == ["EPO", "EPO"]
    for entry in entries:
        assert len(entry["triples"]) == 2
        for subject, name, obj in entry["triples"]:
            assert name in corpus.relations
            assert len(subject) == len(obj) == 2


@pytest.mark.parametrize(
    "config, tagging",
    [
        (SynthConfig(counts={"SOO": 1}), "single"),
        (SynthConfig(relations=1, counts={"EPO": 1}), "dual"),
        (SynthConfig(entities=3), "dual"),
        (SynthConfig(entities=10, clauses=(3, 3)), "dual"),
        (SynthConfig(counts={"SEO": 1}, triplerange=(1, 3)), "dual"),
        (SynthConfig(counts={"SEO": 1}, triplerange=(3, 2)), "dual"),
        (SynthConfig(counts={"SEO": 1}, triplerange=(2, 4), lengthrange=(5, 12)), "dual"),
        (SynthConfig(lengthrange=(5, 10), clauses=(2, 2)), "dual"),
    ],
)
def test_gensynthetic_rejects_infeasible_configs(config, tagging):
    with pytest.raises(InfeasibleConfig):
        gensynthetic(config, tagging)


def test_gensynthetic_single_tagging_without_overlap():
    corpus = gensynthetic(SynthConfig(counts={"Normal": 3, "SEO": 2}), "single")
    assert len(corpus) == 5


def test_gensynthetic_triplerange_only_binds_seo():
    corpus = gensynthetic(SynthConfig(counts={"Normal": 5}, triplerange=(1, 1)))
    assert len(corpus) == 5
    for annotated in corpus.sentences:
        assert len(annotated.triples) == 1


def test_gensynthetic_large_seo_clauses():
    config = SynthConfig(seed=4, counts={"SEO": 20}, triplerange=(4, 6), lengthrange=(10, 30))
    sizes = [len(a.triples) for a in gensynthetic(config).sentences]
    assert all(4 <= n <= 6 for n in sizes)
    assert 4 in sizes
    assert any(n >= 5 for n in sizes)


def test_gensynthetic_mixes_clauses():
    config = SynthConfig(seed=8, counts=COUNTS, clauses=(1, 3), lengthrange=(5, 40))
    corpus = gensynthetic(config)
    sizes, mixed = [], 0
    for annotated, entry in zip(corpus.sentences, corpus.manifest):
        assert 5 <= annotated.sentence.length <= 40
        assert 1 <= len(entry.clauses) <= 3
        assert entry.clauses[0] == entry.pattern
        patterns = classifypattern(annotated)
        assert entry.pattern in patterns
        assert patterns == (set(entry.clauses) - {"Normal"} or {"Normal"})
        if entry.pattern == "Normal":
            assert set(entry.clauses) == {"Normal"}
        sizes.append(len(annotated.triples))
        mixed += len(patterns) > 1
    assert max(sizes) > 3
    assert mixed > 0
    assert manifestdict(corpus)[0]["clauses"] == list(corpus.manifest[0].clauses)


def test_gensynthetic_mixed_corpus_survives_serialization(tmp_path):
    corpus = gensynthetic(SynthConfig(seed=9, counts=COUNTS, clauses=(2, 3), lengthrange=(5, 40)))
    path = tmp_path / "mixed.jsonl"
    savedataset(corpus.sentences, corpus.relations, path)
    dataset = loaddataset(path, relations=corpus.relations)
    assert not dataset.skipped
    assert [a.triples for a in dataset.sentences] == [a.triples for a in corpus.sentences]
