import json
import logging
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from tripx.extract.config import PATTERNS
from tripx.extract.core import (
    AnnotatedSentence,
    EntitySpan,
    RelationSet,
    Sentence,
    Triple,
    spantext,
)
from tripx.extract.encoder import tokenize
from tripx.extract.errors import ParseError, UnresolvableEntity

logger = logging.getLogger(__name__)

NORMAL, SEO, EPO, SOO = PATTERNS
MODES = ("last_word", "full_span")


@dataclass(frozen=True)
class SkippedRecord:
    index: int
    id: str
    reason: str


@dataclass
class Dataset:
    sentences: List[AnnotatedSentence]
    relations: RelationSet
    skipped: List[SkippedRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.sentences)


def loaddataset(
    path: Union[str, Path],
    mode: str = "full_span",
    tokenizer: str = "punct",
    maxlen: int = 100,
    relations: Optional[Union[str, Path, RelationSet]] = None,
) -> Dataset:
    if mode not in MODES:
        raise ValueError(f"Cannot load dataset, unknown annotation mode {mode!r}")
    records = readrecords(path)
    if relations is not None and not isinstance(relations, RelationSet):
        relations = loadrelations(relations)
    fixed = relations is not None
    relationset = relations if fixed else RelationSet(())

    sentences, skipped = [], []
    for index, record in enumerate(records):
        id = str(record.get("id", index))
        try:
            sentence, resolved = _resolve(record, id, mode, tokenizer, maxlen)
            names = [r for _, r, _ in resolved]
            unknown = sorted(set(n for n in names if n not in relationset))
            if unknown and fixed:
                raise _Skip(f"relations {unknown} are not in the relation vocabulary")
            relationset = relationset.extend(names)
            triples = frozenset(
                Triple(s, relationset.index(r), o) for s, r, o in resolved
            )
            sentences.append(AnnotatedSentence(sentence, triples))
        except (_Skip, UnresolvableEntity) as e:
            skipped.append(SkippedRecord(index, id, str(e)))
            logger.warning("skipping record %d (%s): %s", index, id, e)
    logger.info(
        "loaded %d sentences from %s (%d skipped, %d relations)",
        len(sentences),
        path,
        len(skipped),
        relationset.size,
    )
    return Dataset(sentences, relationset, skipped)


class _Skip(Exception):
    pass


def _resolve(
    record: Dict[str, Any], id: str, mode: str, tokenizer: str, maxlen: int
) -> Tuple[Sentence, List[Tuple[EntitySpan, str, EntitySpan]]]:
    text = record.get("text")
    if not isinstance(text, str) or not text.strip():
        raise _Skip("record has no text")
    tokens = tokenize(text, tokenizer)
    if not tokens:
        raise _Skip("text has no tokens")
    if len(tokens) > maxlen:
        raise _Skip(f"sentence has {len(tokens)} tokens but maxlen is {maxlen}")
    triplelist = record.get("triple_list", [])
    if not isinstance(triplelist, list):
        raise _Skip("triple_list is not a list")
    resolved = []
    for entry in triplelist:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise _Skip(f"malformed triple {entry!r}")
        subject, relation, obj = (str(v) for v in entry)
        s = resolvespan(tokens, subject, tokenizer, mode)
        o = resolvespan(tokens, obj, tokenizer, mode)
        resolved.append((s, relation, o))
    return Sentence(id, tokens), resolved


def resolvespan(
    tokens: Sequence[str], entity: str, tokenizer: str = "punct", mode: str = "full_span"
) -> EntitySpan:
    pieces = tokenize(entity, tokenizer)
    if not pieces:
        raise UnresolvableEntity(f"Cannot resolve entity {entity!r}, it has no tokens")
    width = len(pieces)
    for start in range(len(tokens) - width + 1):
        if list(tokens[start : start + width]) == pieces:
            end = start + width - 1
            if mode == "last_word":
                return EntitySpan(end, end)
            return EntitySpan(start, end)
    raise UnresolvableEntity(f"Cannot resolve entity {entity!r}, it does not occur in the sentence")


def readrecords(path: Union[str, Path]) -> List[Dict[str, Any]]:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return []
    if text.lstrip().startswith("["):
        try:
            records = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"Cannot parse {path}, invalid JSON at line {e.lineno} ({e.msg})") from None
    else:
        records = []
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ParseError(f"Cannot parse {path}, invalid JSON on line {number} ({e.msg})") from None
    if not all(isinstance(r, dict) for r in records):
        raise ParseError(f"Cannot parse {path}, every record must be a JSON object")
    return records


def readsentences(
    path: Union[str, Path], tokenizer: str = "punct"
) -> Tuple[List[Sentence], List[SkippedRecord]]:
    sentences, skipped = [], []
    for index, record in enumerate(readrecords(path)):
        id = str(record.get("id", index))
        text = record.get("text")
        tokens = tokenize(text, tokenizer) if isinstance(text, str) else []
        if not tokens:
            skipped.append(SkippedRecord(index, id, "record has no text"))
            logger.warning("skipping record %d (%s): record has no text", index, id)
            continue
        sentences.append(Sentence(id, tokens))
    return sentences, skipped


def loadrelations(path: Union[str, Path]) -> RelationSet:
    names = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()]
    names = [n for n in names if n]
    try:
        return RelationSet(names)
    except ValueError as e:
        raise ParseError(f"Cannot parse relation file {path}, {e}") from None


def savedataset(
    sentences: Iterable[AnnotatedSentence], relations: RelationSet, path: Union[str, Path]
) -> None:
    with open(path, mode="w", encoding="utf-8") as file:
        for annotated in sentences:
            file.write(json.dumps(torecord(annotated, relations), ensure_ascii=False) + "\n")


def torecord(annotated: AnnotatedSentence, relations: RelationSet) -> Dict[str, Any]:
    sentence = annotated.sentence
    return {
        "id": sentence.id,
        "text": sentence.text,
        "triple_list": [
            [spantext(sentence, t.subject), relations.name(t.relation), spantext(sentence, t.object)]
            for t in annotated.sortedtriples()
        ],
    }


def classifypattern(
    annotated: AnnotatedSentence, seo: str = "exactly_one", soo: str = "within"
) -> FrozenSet[str]:
    labels = set()
    triples = annotated.sortedtriples()
    for a, b in combinations(triples, 2):
        shared = len({a.subject, a.object} & {b.subject, b.object})
        if shared == 2 or {a.subject, a.object} == {b.subject, b.object}:
            labels.add(EPO)
            if seo == "at_least_one":
                labels.add(SEO)
        elif shared == 1:
            labels.add(SEO)
    for t in triples:
        if t.subject.overlaps(t.object):
            labels.add(SOO)
    if soo == "cross":
        for a in triples:
            for b in triples:
                if a is b:
                    continue
                s, o = a.subject, b.object
                if s != o and s.overlaps(o):
                    labels.add(SOO)
    return frozenset(labels) if labels else frozenset((NORMAL,))


@dataclass(frozen=True)
class StatsReport:
    sentences: int = 0
    normal: int = 0
    seo: int = 0
    epo: int = 0
    soo: int = 0
    single: int = 0
    multiple: int = 0
    triples: int = 0
    relations: int = 0

    def asdict(self) -> Dict[str, int]:
        return {
            "sentences": self.sentences,
            "Normal": self.normal,
            "SEO": self.seo,
            "EPO": self.epo,
            "SOO": self.soo,
            "N=1": self.single,
            "N>1": self.multiple,
            "triples": self.triples,
            "relations": self.relations,
        }

    def table(self) -> str:
        row = self.asdict()
        widths = [max(len(k), len(str(v))) for k, v in row.items()]
        header = "  ".join(k.rjust(w) for k, w in zip(row, widths))
        values = "  ".join(str(v).rjust(w) for v, w in zip(row.values(), widths))
        return f"{header}\n{values}"


def datasetstats(
    sentences: Sequence[AnnotatedSentence],
    relations: Optional[RelationSet] = None,
    seo: str = "exactly_one",
    soo: str = "within",
) -> StatsReport:
    counts = dict.fromkeys(PATTERNS, 0)
    single = multiple = triples = 0
    used = set()
    for annotated in sentences:
        for label in classifypattern(annotated, seo, soo):
            counts[label] += 1
        n = len(annotated.triples)
        triples += n
        single += n == 1
        multiple += n > 1
        used.update(t.relation for t in annotated.triples)
    return StatsReport(
        sentences=len(sentences),
        normal=counts[NORMAL],
        seo=counts[SEO],
        epo=counts[EPO],
        soo=counts[SOO],
        single=single,
        multiple=multiple,
        triples=triples,
        relations=relations.size if relations is not None else len(used),
    )


def split(
    sentences: Sequence[AnnotatedSentence],
    validfraction: float,
    generator: Optional[np.random.Generator] = None,
) -> Tuple[List[AnnotatedSentence], List[AnnotatedSentence]]:
    if not 0 <= validfraction < 1:
        raise ValueError(f"Cannot split dataset, valid fraction must lie in [0, 1), received {validfraction}")
    if generator is None:
        generator = np.random.default_rng()
    count = int(round(len(sentences) * validfraction))
    chosen = set(generator.permutation(len(sentences))[:count].tolist())
    train = [s for i, s in enumerate(sentences) if i not in chosen]
    valid = [s for i, s in enumerate(sentences) if i in chosen]
    return train, valid
