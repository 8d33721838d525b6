import numpy as np
import pytest
from tripx.extract.config import SynthConfig
from tripx.extract.core import (
    B,
    I,
    O,
    AnnotatedSentence,
    EntitySpan,
    RelationSet,
    Sentence,
    Triple,
)
from tripx.extract.errors import InfeasibleTagging, OverlappingSpans
from tripx.extract.inference import decodebundle
from tripx.extract.labeling import (
    buildgold,
    detectinterference,
    goldbundle,
    samplenegatives,
    singletargets,
)
from tripx.extract.synthetic import gensynthetic

RELATIONS = RelationSet(("r0", "r1", "r2", "r3"))


def span(start, end=None):
    return EntitySpan(start, start if end is None else end)


def annotate(n, triples):
    return AnnotatedSentence(Sentence("s", [f"t{i}" for i in range(n)]), triples)


def interference():
    s1, o1, s2, o2 = span(0), span(1), span(2), span(3)
    triples = [Triple(s1, 0, o1), Triple(s2, 0, o2), Triple(s1, 1, o2)]
    return annotate(6, triples), Triple(s1, 0, o2)


def test_buildgold_single_triple():
    gold = buildgold(annotate(5, [Triple(span(0, 1), 2, span(3))]), RELATIONS)
    np.testing.assert_array_equal(gold.relvector, [0, 0, 1, 0])
    assert gold.tagtargets == {2: ((B, I, O, O, O), (O, O, O, B, O))}
    expected = np.zeros((5, 5))
    expected[0, 3] = 1.0
    np.testing.assert_array_equal(gold.corrmatrix, expected)
    assert gold.potential == 1
    assert gold.length == 5


def test_buildgold_no_triples():
    gold = buildgold(annotate(3, []), RELATIONS)
    np.testing.assert_array_equal(gold.relvector, np.zeros(4))
    assert gold.tagtargets == {}
    np.testing.assert_array_equal(gold.corrmatrix, np.zeros((3, 3)))


def test_buildgold_entity_pair_overlap():
    s, o = span(0), span(2, 3)
    gold = buildgold(annotate(4, [Triple(s, 1, o), Triple(s, 3, o)]), RELATIONS)
    assert gold.relations == (1, 3)
    assert gold.tagtargets[1] == gold.tagtargets[3]
    assert gold.corrmatrix.sum() == 1


def test_buildgold_shared_starts_collapse():
    triples = [Triple(span(0), 0, span(2)), Triple(span(0, 1), 1, span(2, 3))]
    gold = buildgold(annotate(5, triples), RELATIONS)
    assert gold.corrmatrix.sum() == 1
    triples = [Triple(span(0), 0, span(2)), Triple(span(3), 1, span(4))]
    assert buildgold(annotate(5, triples), RELATIONS).corrmatrix.sum() == 2


def test_buildgold_rejects_nested_subjects():
    triples = [Triple(span(0, 2), 0, span(4)), Triple(span(1), 0, span(4))]
    with pytest.raises(OverlappingSpans):
        buildgold(annotate(5, triples), RELATIONS)


def test_buildgold_subject_object_overlap_is_representable():
    gold = buildgold(annotate(4, [Triple(span(0, 1), 0, span(0))]), RELATIONS)
    assert gold.tagtargets[0] == ((B, I, O, O), (B, O, O, O))


def test_buildgold_rejects_unknown_relation():
    with pytest.raises(LookupError):
        buildgold(annotate(3, [Triple(span(0), 7, span(2))]), RELATIONS)


def test_tagids_and_jointids():
    gold = buildgold(annotate(5, [Triple(span(0, 1), 2, span(3))]), RELATIONS)
    sub, obj = gold.tagids(2)
    np.testing.assert_array_equal(sub, [0, 1, 2, 2, 2])
    np.testing.assert_array_equal(obj, [2, 2, 2, 0, 2])
    np.testing.assert_array_equal(singletargets(gold)[2], [0, 1, 4, 2, 4])


def test_jointids_refuse_subject_object_overlap():
    gold = buildgold(annotate(4, [Triple(span(0, 1), 0, span(1))]), RELATIONS)
    with pytest.raises(InfeasibleTagging):
        gold.jointids(0)


def test_withnegatives_adds_all_outside_targets():
    gold = buildgold(annotate(3, [Triple(span(0), 1, span(2))]), RELATIONS)
    extended = gold.withnegatives([3, 1])
    assert extended.relations == (1, 3)
    assert extended.potential == 2
    assert extended.tagtargets[3] == ((O, O, O), (O, O, O))
    assert extended.tagtargets[1] == gold.tagtargets[1]
    assert gold.potential == 1


def test_samplenegatives():
    generator = np.random.default_rng(0)
    picked = samplenegatives({1, 2}, 6, 2, generator)
    assert len(picked) == 2
    assert not set(picked) & {1, 2}
    assert samplenegatives({0, 1}, 2, 3, generator) == ()
    assert samplenegatives({0}, 4, 0, generator) == ()
    assert set(samplenegatives({0}, 4, 10, generator)) == {1, 2, 3}


def test_detectinterference():
    annotated, spurious = interference()
    assert detectinterference(annotated) == {spurious}
    clean = annotate(5, [Triple(span(0), 0, span(2)), Triple(span(3), 1, span(4))])
    assert detectinterference(clean) == frozenset()


def test_goldbundle_is_hard_probabilities():
    annotated = annotate(5, [Triple(span(0, 1), 2, span(3))])
    bundle = goldbundle(annotated, RELATIONS)
    np.testing.assert_array_equal(bundle.prel, [0, 0, 1, 0])
    assert bundle.relations == (0, 1, 2, 3)
    assert bundle.selected == {2}
    sub, obj = bundle.tags[2]
    np.testing.assert_array_equal(sub.argmax(-1), [0, 1, 2, 2, 2])
    np.testing.assert_array_equal(obj.argmax(-1), [2, 2, 2, 0, 2])
    for k in (0, 1, 3):
        np.testing.assert_array_equal(bundle.tags[k][0].argmax(-1), np.full(5, 2))


def test_gold_roundtrip_on_interference_instance():
    annotated, spurious = interference()
    bundle = goldbundle(annotated, RELATIONS)
    triples = decodebundle(bundle, 0.5).triples
    assert triples == annotated.triples | {spurious}


def test_gold_roundtrip_on_synthetic_corpus():
    config = SynthConfig(
        seed=3,
        relations=5,
        counts={"Normal": 40, "SEO": 40, "EPO": 40, "SOO": 40},
    )
    corpus = gensynthetic(config)
    for annotated in corpus.sentences:
        bundle = goldbundle(annotated, corpus.relations)
        for lambda2 in (0.1, 0.5, 0.9):
            triples = decodebundle(bundle, lambda2).triples
            assert triples >= annotated.triples
            if not detectinterference(annotated):
                assert triples == annotated.triples
            else:
                assert triples == annotated.triples | detectinterference(annotated)
