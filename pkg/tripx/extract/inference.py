import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

import numpy as np

import tripx
from tripx.extract.core import (
    B,
    I,
    O,
    EntitySpan,
    Sentence,
    TagSeq,
    Triple,
    biodecode,
    spantext,
)
from tripx.extract.decoder import PredictionBundle, predictbundle
from tripx.extract.encoder import encode
from tripx.extract.errors import ParseError, SentenceTooLong
from tripx.extract.model import Extractor

logger = logging.getLogger(__name__)

PAIRINGS = ("global", "nearest")
SUBJECT, OBJECT = "subject", "object"

# argmax ties resolve toward O, then B, then I
_PREFERENCE = np.array([2, 0, 1])


@dataclass
class Diagnostics:
    sentences: int = 0
    selected: int = 0
    emptyrelations: int = 0
    skipped: List[str] = field(default_factory=list)

    def update(self, other: "Diagnostics") -> None:
        self.sentences += other.sentences
        self.selected += other.selected
        self.emptyrelations += other.emptyrelations
        self.skipped.extend(other.skipped)

    def asdict(self) -> Dict[str, Any]:
        return {
            "sentences": self.sentences,
            "selected": self.selected,
            "emptyrelations": self.emptyrelations,
            "skipped": list(self.skipped),
        }


@dataclass(frozen=True)
class Extraction:
    triples: FrozenSet[Triple]
    relations: FrozenSet[int]
    entities: FrozenSet[Tuple[EntitySpan, str]]
    pairs: Tuple[Tuple[EntitySpan, EntitySpan], ...]
    diagnostics: Diagnostics = field(default_factory=Diagnostics)


def decodetags(dist: np.ndarray) -> TagSeq:
    dist = np.asarray(dist)
    best = _PREFERENCE[np.argmax(dist[:, _PREFERENCE], axis=-1)]
    return tuple((B, I, O)[i] for i in best)


def decodebundle(
    bundle: PredictionBundle,
    lambda2: float = 0.5,
    pairing: str = "global",
    lenient: bool = False,
) -> Extraction:
    if pairing not in PAIRINGS:
        raise ValueError(f"Cannot decode, unknown pairing {pairing!r}")
    if not 0 < lambda2 < 1:
        raise ValueError(f"Cannot decode, lambda2 must lie in (0, 1), received {lambda2}")
    triples, entities = set(), set()
    diagnostics = Diagnostics(sentences=1, selected=len(bundle.tags))
    for k in bundle.relations:
        sub, obj = bundle.tags[k]
        subjects = biodecode(decodetags(sub), lenient)
        objects = biodecode(decodetags(obj), lenient)
        entities.update((s, SUBJECT) for s in subjects)
        entities.update((o, OBJECT) for o in objects)
        if not subjects or not objects:
            diagnostics.emptyrelations += 1
            continue
        if pairing == "global":
            for s in subjects:
                for o in objects:
                    if bundle.corr[s.start, o.start] > lambda2:
                        triples.add(Triple(s, k, o))
        else:
            for s in subjects:
                triples.add(Triple(s, k, nearest(s, objects)))
    ordered = sorted(triples)
    pairs = tuple((t.subject, t.object) for t in ordered)
    return Extraction(
        frozenset(triples),
        bundle.selected,
        frozenset(entities),
        pairs,
        diagnostics,
    )


def nearest(subject: EntitySpan, objects: Sequence[EntitySpan]) -> EntitySpan:
    return min(objects, key=lambda o: (abs(o.start - subject.start), o.start))


def predict(
    model: Extractor,
    sentence: Sentence,
    lambda1: float = 0.5,
    selectall: bool = False,
) -> PredictionBundle:
    with tripx.nograd():
        h = encode(sentence, model.encoder, model.vocab)
        return predictbundle(h, model.decoder, lambda1, selectall)


def extract(
    model: Extractor,
    sentence: Sentence,
    lambda1: float = 0.5,
    lambda2: float = 0.5,
    pairing: str = "global",
    selectall: bool = False,
    lenient: bool = False,
) -> Extraction:
    if not 0 < lambda1 < 1:
        raise ValueError(f"Cannot extract, lambda1 must lie in (0, 1), received {lambda1}")
    return decodebundle(
        predict(model, sentence, lambda1, selectall), lambda2, pairing, lenient
    )


def extracttriples(
    model: Extractor,
    sentence: Sentence,
    lambda1: float = 0.5,
    lambda2: float = 0.5,
    pairing: str = "global",
    selectall: bool = False,
    lenient: bool = False,
) -> FrozenSet[Triple]:
    return extract(model, sentence, lambda1, lambda2, pairing, selectall, lenient).triples


def bruteforcebundle(
    prel: Sequence[float],
    tags: Dict[int, Tuple[np.ndarray, np.ndarray]],
    corr: np.ndarray,
    lambda1: float,
    lambda2: float,
) -> FrozenSet[Triple]:
    found = set()
    for k in range(len(prel)):
        if not float(prel[k]) > lambda1:
            continue
        sub, obj = tags[k]
        subjects = _scalarspans(sub)
        objects = _scalarspans(obj)
        for s in subjects:
            for o in objects:
                if float(corr[s[0]][o[0]]) > lambda2:
                    found.add(Triple(EntitySpan(*s), k, EntitySpan(*o)))
    return frozenset(found)


def extractbruteforce(
    model: Extractor,
    sentence: Sentence,
    lambda1: float = 0.5,
    lambda2: float = 0.5,
) -> FrozenSet[Triple]:
    full = predict(model, sentence, lambda1, selectall=True)
    return bruteforcebundle(full.prel, full.tags, full.corr, lambda1, lambda2)


def _scalarspans(dist: np.ndarray) -> List[Tuple[int, int]]:
    tags = []
    for row in dist:
        b, i, o = (float(v) for v in row)
        if o >= b and o >= i:
            tags.append("O")
        elif b >= i:
            tags.append("B")
        else:
            tags.append("I")
    spans = []
    start = None
    for j, tag in enumerate(tags):
        if tag == "B":
            if start is not None:
                spans.append((start, j - 1))
            start = j
        elif tag == "O":
            if start is not None:
                spans.append((start, j - 1))
            start = None
    if start is not None:
        spans.append((start, len(tags) - 1))
    return spans


def predictrecords(
    model: Extractor,
    sentences: Iterable[Sentence],
    lambda1: float = 0.5,
    lambda2: float = 0.5,
    pairing: str = "global",
    selectall: bool = False,
    lenient: bool = False,
) -> Tuple[List[Dict[str, Any]], Diagnostics]:
    records = []
    diagnostics = Diagnostics()
    for sentence in sentences:
        if sentence.length > model.encoder.maxlen:
            logger.warning(
                "skipping sentence %s: %s",
                sentence.id,
                SentenceTooLong(f"{sentence.length} tokens > maxlen {model.encoder.maxlen}"),
            )
            diagnostics.skipped.append(sentence.id)
            continue
        extraction = extract(
            model, sentence, lambda1, lambda2, pairing, selectall, lenient
        )
        diagnostics.update(extraction.diagnostics)
        records.append(torecord(sentence, extraction, model.relations.names))
    if diagnostics.emptyrelations:
        logger.info(
            "%d selected relations produced no subject or no object",
            diagnostics.emptyrelations,
        )
    if diagnostics.skipped:
        logger.warning(
            "skipped %d sentences longer than maxlen %d",
            len(diagnostics.skipped),
            model.encoder.maxlen,
        )
    return records, diagnostics


def torecord(
    sentence: Sentence, extraction: Extraction, names: Sequence[str]
) -> Dict[str, Any]:
    ordered = sorted(extraction.triples)
    return {
        "id": sentence.id,
        "text": sentence.text,
        "pred_triples": [
            [spantext(sentence, t.subject), names[t.relation], spantext(sentence, t.object)]
            for t in ordered
        ],
        "pred_spans": [
            [t.subject.tolist(), names[t.relation], t.object.tolist()] for t in ordered
        ],
        "relations": [names[k] for k in sorted(extraction.relations)],
        "entities": [
            [span.tolist(), role] for span, role in sorted(extraction.entities)
        ],
        "pairs": [[s.tolist(), o.tolist()] for s, o in extraction.pairs],
    }


def writepredictions(records: Iterable[Dict[str, Any]], path: Union[str, Path]) -> None:
    with open(path, mode="w", encoding="utf-8") as file:
        for record in records:
            file.write(json.dumps(record, ensure_ascii=False) + "\n")


def readpredictions(path: Union[str, Path]) -> List[Dict[str, Any]]:
    records = []
    with open(path, mode="r", encoding="utf-8") as file:
        for number, line in enumerate(file, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ParseError(f"Cannot parse {path}, line {number} ({e.msg})") from None
    return records
