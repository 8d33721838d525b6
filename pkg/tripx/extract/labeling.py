from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

import numpy as np

from tripx.extract.core import (
    B,
    I,
    O,
    TAGS,
    AnnotatedSentence,
    RelationSet,
    TagSeq,
    Triple,
    bioencode,
)
from tripx.extract.decoder import PredictionBundle
from tripx.extract.errors import InfeasibleTagging

# dual tag ids follow TAGS order; single ids pack both roles into five classes
TAGIDS = {tag: i for i, tag in enumerate(TAGS)}
JOINTIDS = {("sub", B): 0, ("sub", I): 1, ("obj", B): 2, ("obj", I): 3}
JOINTO = 4


@dataclass(frozen=True)
class GoldLabels:
    relvector: np.ndarray
    tagtargets: Dict[int, Tuple[TagSeq, TagSeq]]
    corrmatrix: np.ndarray

    @property
    def length(self) -> int:
        return self.corrmatrix.shape[0]

    @property
    def potential(self) -> int:
        return len(self.tagtargets)

    @property
    def relations(self) -> Tuple[int, ...]:
        return tuple(sorted(self.tagtargets))

    def tagids(self, relation: int) -> Tuple[np.ndarray, np.ndarray]:
        sub, obj = self.tagtargets[relation]
        return _ids(sub), _ids(obj)

    def jointids(self, relation: int) -> np.ndarray:
        sub, obj = self.tagtargets[relation]
        ids = np.full(len(sub), JOINTO, dtype=np.int64)
        for i, (s, o) in enumerate(zip(sub, obj)):
            if s != O and o != O:
                raise InfeasibleTagging(
                    f"Cannot build single-sequence targets, token {i} is both subject and object of relation {relation}"
                )
            if s != O:
                ids[i] = JOINTIDS[("sub", s)]
            elif o != O:
                ids[i] = JOINTIDS[("obj", o)]
        return ids

    def withnegatives(self, relations: Iterable[int]) -> "GoldLabels":
        empty = (O,) * self.length
        targets = dict(self.tagtargets)
        for k in relations:
            targets.setdefault(int(k), (empty, empty))
        return replace(self, tagtargets=targets)


def buildgold(annotated: AnnotatedSentence, relations: RelationSet) -> GoldLabels:
    n = annotated.sentence.length
    relvector = np.zeros(relations.size)
    corrmatrix = np.zeros((n, n))
    subjects: Dict[int, set] = {}
    objects: Dict[int, set] = {}
    for t in annotated.sortedtriples():
        relations.name(t.relation)
        relvector[t.relation] = 1.0
        subjects.setdefault(t.relation, set()).add(t.subject)
        objects.setdefault(t.relation, set()).add(t.object)
        corrmatrix[t.subject.start, t.object.start] = 1.0
    tagtargets = {
        k: (bioencode(subjects[k], n), bioencode(objects[k], n))
        for k in sorted(subjects)
    }
    return GoldLabels(relvector, tagtargets, corrmatrix)


def singletargets(gold: GoldLabels) -> Dict[int, np.ndarray]:
    return {k: gold.jointids(k) for k in gold.relations}


def detectinterference(annotated: AnnotatedSentence) -> FrozenSet[Triple]:
    starts = {(t.subject.start, t.object.start) for t in annotated.triples}
    subjects: Dict[int, set] = {}
    objects: Dict[int, set] = {}
    for t in annotated.triples:
        subjects.setdefault(t.relation, set()).add(t.subject)
        objects.setdefault(t.relation, set()).add(t.object)
    spurious = set()
    for k in subjects:
        for s in subjects[k]:
            for o in objects[k]:
                candidate = Triple(s, k, o)
                if candidate in annotated.triples:
                    continue
                if (s.start, o.start) in starts:
                    spurious.add(candidate)
    return frozenset(spurious)


def goldbundle(annotated: AnnotatedSentence, relations: RelationSet) -> PredictionBundle:
    gold = buildgold(annotated, relations)
    n = gold.length
    outside = _onehot(np.full(n, TAGIDS[O]))
    tags = {k: (outside, outside) for k in range(relations.size)}
    for k in gold.relations:
        sub, obj = gold.tagids(k)
        tags[k] = (_onehot(sub), _onehot(obj))
    selected = frozenset(gold.relations)
    return PredictionBundle(gold.relvector.copy(), tags, gold.corrmatrix.copy(), selected)


def samplenegatives(
    gold: Iterable[int],
    relations: int,
    count: int,
    generator: Optional[np.random.Generator] = None,
) -> Tuple[int, ...]:
    if count <= 0:
        return ()
    if generator is None:
        generator = np.random.default_rng()
    gold = set(gold)
    pool = np.array([k for k in range(relations) if k not in gold], dtype=np.int64)
    if not len(pool):
        return ()
    picked = generator.choice(pool, size=min(count, len(pool)), replace=False)
    return tuple(sorted(int(k) for k in picked))


def _ids(tags: TagSeq) -> np.ndarray:
    return np.array([TAGIDS[t] for t in tags], dtype=np.int64)


def _onehot(ids: np.ndarray) -> np.ndarray:
    return np.eye(len(TAGS))[ids]
