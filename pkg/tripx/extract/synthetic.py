import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from tripx.extract.config import PATTERNS, SynthConfig
from tripx.extract.core import AnnotatedSentence, EntitySpan, RelationSet, Sentence, Triple
from tripx.extract.errors import InfeasibleConfig

logger = logging.getLogger(__name__)

NORMAL, SEO, EPO, SOO = PATTERNS
AND, SELF, SEPARATOR = "and", "self", ";"

Placed = Tuple[Tuple[int, int], int, Tuple[int, int]]


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    pattern: str
    triples: Tuple[Triple, ...]
    clauses: Tuple[str, ...]


@dataclass
class SynthCorpus:
    sentences: List[AnnotatedSentence]
    relations: RelationSet
    manifest: List[ManifestEntry]

    def __len__(self) -> int:
        return len(self.sentences)


def gensynthetic(config: SynthConfig, tagging: str = "dual") -> SynthCorpus:
    counts = {p: config.counts.get(p, 0) for p in PATTERNS}
    if tagging == "single" and counts[SOO]:
        raise InfeasibleConfig(
            f"Cannot generate {counts[SOO]} SOO sentences, single-sequence tagging cannot represent subject/object overlap"
        )
    if config.relations < 2 and counts[EPO]:
        raise InfeasibleConfig("Cannot generate EPO sentences, they need at least 2 relations")
    if counts[SEO]:
        low, high = config.triplerange
        if low < 2 or high < low:
            raise InfeasibleConfig(
                f"Cannot generate SEO sentences, triple range must be increasing and start at 2 or more, received {config.triplerange}"
            )
    requested = [p for p in PATTERNS if counts[p]]
    if requested:
        _checksizes(requested, config)

    generator = np.random.default_rng(config.seed)
    relations = RelationSet(tuple(f"rel{k}" for k in range(config.relations)))
    patterns = [p for p in PATTERNS for _ in range(counts[p])]
    order = generator.permutation(len(patterns))
    fewest, most = config.clauses

    sentences, manifest = [], []
    for i, index in enumerate(order):
        pattern = patterns[index]
        id = f"synth-{i:05d}"
        pool = iter(generator.permutation(config.entities).tolist())
        extra = fewest - 1 if fewest == most else int(generator.integers(fewest, most + 1)) - 1
        # extra clauses of another pattern would hide a Normal sentence
        others = [NORMAL] if pattern == NORMAL else requested
        clauses = [pattern] + [others[int(generator.integers(len(others)))] for _ in range(extra)]
        tokens: List[str] = []
        placed: List[Placed] = []
        for j, clause in enumerate(clauses):
            if j:
                tokens.append(SEPARATOR)
            placed.extend(_clause(clause, tokens, pool, config, generator))
        tokens, triples = _pad(tokens, placed, config, generator)
        sentences.append(AnnotatedSentence(Sentence(id, tokens), frozenset(triples)))
        manifest.append(ManifestEntry(id, pattern, tuple(sorted(triples)), tuple(clauses)))
    logger.info("generated %d synthetic sentences (%s)", len(sentences), counts)
    return SynthCorpus(sentences, relations, manifest)


def _checksizes(requested: Sequence[str], config: SynthConfig) -> None:
    longest = config.entitylength[1]
    most = config.clauses[1]
    objects = config.triplerange[1]
    # entity tokens and total tokens of the largest clause per pattern
    sizes = {
        NORMAL: (2 * longest, 2 * longest + 1),
        SEO: ((1 + objects) * longest, (1 + objects) * longest + objects),
        EPO: (2 * longest, 2 * longest + 2),
        SOO: (2, 4),
    }
    entities = most * max(sizes[p][0] for p in requested)
    length = most * max(sizes[p][1] for p in requested) + most - 1
    if config.entities < entities:
        raise InfeasibleConfig(
            f"Cannot generate sentences, {config.entities} entity tokens cannot fill {entities} distinct entity positions"
        )
    if config.lengthrange[1] < length:
        raise InfeasibleConfig(
            f"Cannot generate sentences, clauses can reach {length} tokens but lengthrange ends at {config.lengthrange[1]}"
        )


def _clause(
    pattern: str,
    tokens: List[str],
    pool: Iterator[int],
    config: SynthConfig,
    generator: np.random.Generator,
) -> List[Placed]:
    def entity(length: Optional[int] = None) -> List[str]:
        if length is None:
            low, high = config.entitylength
            length = int(generator.integers(low, high + 1))
        return [f"e{next(pool)}" for _ in range(length)]

    def trigger(k: int) -> str:
        return f"t{k}"

    triples = []

    def place(words: Sequence[str]) -> Tuple[int, int]:
        start = len(tokens)
        tokens.extend(words)
        return start, len(tokens) - 1

    if pattern == NORMAL:
        k = int(generator.integers(config.relations))
        s = place(entity())
        place([trigger(k)])
        o = place(entity())
        triples.append((s, k, o))
    elif pattern == SEO:
        k = int(generator.integers(config.relations))
        low, high = config.triplerange
        count = int(generator.integers(low, high + 1))
        s = place(entity())
        place([trigger(k)])
        for j in range(count):
            if j:
                place([AND])
            triples.append((s, k, place(entity())))
    elif pattern == EPO:
        first, second = generator.choice(config.relations, size=2, replace=False)
        s = place(entity())
        place([trigger(int(first)), trigger(int(second))])
        o = place(entity())
        triples.append((s, int(first), o))
        triples.append((s, int(second), o))
    else:
        k = int(generator.integers(config.relations))
        head = place(entity(1))
        tail = place(entity(1))
        place([SELF, trigger(k)])
        triples.append(((head[0], tail[1]), k, head))
    return triples


def _pad(
    tokens: List[str],
    triples: List[Placed],
    config: SynthConfig,
    generator: np.random.Generator,
) -> Tuple[List[str], List[Triple]]:
    low, high = config.lengthrange
    length = max(int(generator.integers(low, high + 1)), len(tokens))
    extra = length - len(tokens)
    before = int(generator.integers(0, extra + 1))
    fillers = [f"w{j}" for j in generator.integers(config.fillers, size=extra).tolist()]
    padded = fillers[:before] + tokens + fillers[before:]
    shifted = [
        Triple(
            EntitySpan(s[0] + before, s[1] + before),
            k,
            EntitySpan(o[0] + before, o[1] + before),
        )
        for s, k, o in triples
    ]
    return padded, shifted


def manifestdict(corpus: SynthCorpus) -> List[Dict[str, object]]:
    names = corpus.relations.names
    return [
        {
            "id": entry.id,
            "pattern": entry.pattern,
            "clauses": list(entry.clauses),
            "triples": [
                [t.subject.tolist(), names[t.relation], t.object.tolist()]
                for t in entry.triples
            ],
        }
        for entry in corpus.manifest
    ]
