import logging
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, Hashable, Iterable, Mapping, Optional, Sequence, Tuple

from tripx.extract.config import PATTERNS
from tripx.extract.core import AnnotatedSentence, Sentence, Triple, lasttoken, spantext
from tripx.extract.data import classifypattern
from tripx.extract.errors import IdMismatch, MissingIntermediates

logger = logging.getLogger(__name__)

BUCKETS = ("1", "2", "3", "4", ">=5")
MODES = ("last_word", "full_span")


@dataclass(frozen=True)
class ScoreReport:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def merge(self, other: "ScoreReport") -> "ScoreReport":
        return ScoreReport(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    def asdict(self) -> Dict[str, Any]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


def count(pred: Iterable[Hashable], gold: Iterable[Hashable]) -> ScoreReport:
    pred, gold = set(pred), set(gold)
    tp = len(pred & gold)
    return ScoreReport(tp, len(pred) - tp, len(gold) - tp)


def countmultiset(pred: Counter, gold: Counter) -> ScoreReport:
    tp = sum((pred & gold).values())
    return ScoreReport(tp, sum(pred.values()) - tp, sum(gold.values()) - tp)


def surface(sentence: Sentence, triple: Triple, mode: str) -> Tuple[str, int, str]:
    if mode == "last_word":
        return lasttoken(sentence, triple.subject), triple.relation, lasttoken(sentence, triple.object)
    return spantext(sentence, triple.subject), triple.relation, spantext(sentence, triple.object)


def scoretriples(
    pred: Mapping[str, Iterable[Triple]],
    gold: Mapping[str, Iterable[Triple]],
    sentences: Mapping[str, Sentence],
    mode: str = "full_span",
) -> ScoreReport:
    if mode not in MODES:
        raise ValueError(f"Cannot score triples, unknown mode {mode!r}")
    _checkids(pred, gold)
    report = ScoreReport()
    for id, triples in gold.items():
        sentence = sentences[id]
        report = report.merge(
            count(
                (surface(sentence, t, mode) for t in pred[id]),
                (surface(sentence, t, mode) for t in triples),
            )
        )
    return report


@dataclass(frozen=True)
class SubtaskReports:
    relations: ScoreReport
    entities: ScoreReport
    pairs: ScoreReport

    def asdict(self) -> Dict[str, Dict[str, Any]]:
        return {
            "relations": self.relations.asdict(),
            "entities": self.entities.asdict(),
            "pairs": self.pairs.asdict(),
        }


def scoresubtasks(
    predictions: Mapping[str, Optional[Any]],
    gold: Mapping[str, AnnotatedSentence],
) -> SubtaskReports:
    _checkids(predictions, gold)
    relations = entities = pairs = ScoreReport()
    for id, annotated in gold.items():
        extraction = predictions[id]
        if extraction is None or not all(
            hasattr(extraction, key) for key in ("relations", "entities", "pairs")
        ):
            raise MissingIntermediates(
                f"Cannot score subtasks, prediction {id} carries no intermediate outputs"
            )
        triples = annotated.triples
        relations = relations.merge(
            count(extraction.relations, {t.relation for t in triples})
        )
        goldentities = {(t.subject, "subject") for t in triples}
        goldentities |= {(t.object, "object") for t in triples}
        entities = entities.merge(count(extraction.entities, goldentities))
        pairs = pairs.merge(
            countmultiset(
                Counter(extraction.pairs),
                Counter((t.subject, t.object) for t in triples),
            )
        )
    return SubtaskReports(relations, entities, pairs)


@dataclass(frozen=True)
class Breakdown:
    patterns: Dict[str, ScoreReport]
    counts: Dict[str, ScoreReport]

    def asdict(self) -> Dict[str, Dict[str, Dict[str, Any]]]:
        return {
            "patterns": {k: v.asdict() for k, v in self.patterns.items()},
            "counts": {k: v.asdict() for k, v in self.counts.items()},
        }


def bucket(triples: int) -> Optional[str]:
    if triples < 1:
        return None
    return BUCKETS[min(triples, 5) - 1]


def breakdown(
    pred: Mapping[str, Iterable[Triple]],
    gold: Mapping[str, Iterable[Triple]],
    dataset: Sequence[AnnotatedSentence],
    mode: str = "full_span",
    seo: str = "exactly_one",
    soo: str = "within",
) -> Breakdown:
    _checkids(pred, gold)
    patterns = dict.fromkeys(PATTERNS, ScoreReport())
    counts = dict.fromkeys(BUCKETS, ScoreReport())
    for annotated in dataset:
        if annotated.id not in gold:
            continue
        single = scoretriples(
            {annotated.id: pred[annotated.id]},
            {annotated.id: gold[annotated.id]},
            {annotated.id: annotated.sentence},
            mode,
        )
        for label in classifypattern(annotated, seo, soo):
            patterns[label] = patterns[label].merge(single)
        key = bucket(len(annotated.triples))
        if key is not None:
            counts[key] = counts[key].merge(single)
    return Breakdown(patterns, counts)


def decoderparamcount(dim: int, relations: int, mode: str = "dual") -> int:
    if dim < 1 or relations < 1:
        raise ValueError(f"Cannot count parameters, dimensions must be positive ({dim=} {relations=})")
    if mode not in ("dual", "single"):
        raise ValueError(f"Cannot count parameters, unknown tagging mode {mode!r}")
    rel = dim * relations + relations
    embeddings = dim * relations
    taggers = 2 * (3 * dim + 3) if mode == "dual" else 5 * dim + 5
    correspondence = 2 * dim + 1
    return rel + embeddings + taggers + correspondence


def rendertable(rows: Mapping[str, ScoreReport], title: str = "") -> str:
    header = ("", "P", "R", "F1", "tp", "fp", "fn")
    lines = [header]
    for name, r in rows.items():
        lines.append(
            (
                name,
                f"{r.precision:.4f}",
                f"{r.recall:.4f}",
                f"{r.f1:.4f}",
                str(r.tp),
                str(r.fp),
                str(r.fn),
            )
        )
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    out = [title] if title else []
    for line in lines:
        out.append(
            "  ".join(
                cell.ljust(w) if not i else cell.rjust(w)
                for i, (cell, w) in enumerate(zip(line, widths))
            )
        )
    return "\n".join(out)


def _checkids(pred: Mapping[str, Any], gold: Mapping[str, Any]) -> None:
    if set(pred) != set(gold):
        missing = sorted(set(gold) - set(pred))[:5]
        extra = sorted(set(pred) - set(gold))[:5]
        raise IdMismatch(
            f"Cannot score, sentence ids differ (missing predictions {missing}, unknown predictions {extra})"
        )
