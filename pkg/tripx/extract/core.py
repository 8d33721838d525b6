from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

from tripx.extract.errors import OverlappingSpans

B, I, O = "B", "I", "O"
TAGS = (B, I, O)
TagSeq = Tuple[str, ...]


@dataclass(frozen=True, order=True)
class EntitySpan:
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(
                f"Cannot build span, expected 0 <= start <= end, received ({self.start}, {self.end})"
            )

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def overlaps(self, other: "EntitySpan") -> bool:
        return self.start <= other.end and other.start <= self.end

    def tolist(self) -> list:
        return [self.start, self.end]


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: Tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError(f"Cannot build sentence {self.id}, it has no tokens")

    @property
    def length(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class RelationSet:
    names: Tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError("Cannot build relation set, names are not unique")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    @property
    def size(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        if name not in self._index:
            raise LookupError(f"Cannot find relation {name!r} in relation set")
        return self._index[name]

    def name(self, id: int) -> str:
        if not 0 <= id < len(self.names):
            raise LookupError(
                f"Cannot find relation id {id}, relation set has {len(self.names)} relations"
            )
        return self.names[id]

    def extend(self, names: Iterable[str]) -> "RelationSet":
        extra = [n for n in dict.fromkeys(names) if n not in self._index]
        return RelationSet(self.names + tuple(extra)) if extra else self

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True, order=True)
class Triple:
    subject: EntitySpan
    relation: int
    object: EntitySpan


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence: Sentence
    triples: FrozenSet[Triple] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "triples", frozenset(self.triples))
        n = self.sentence.length
        for t in self.triples:
            if t.subject.end >= n or t.object.end >= n:
                raise ValueError(
                    f"Cannot annotate sentence {self.sentence.id}, triple {t} leaves the sentence (n={n})"
                )

    @property
    def id(self) -> str:
        return self.sentence.id

    def sortedtriples(self) -> Tuple[Triple, ...]:
        return tuple(sorted(self.triples))


def bioencode(spans: Iterable[EntitySpan], n: int) -> TagSeq:
    spans = sorted(set(spans))
    for a, b in zip(spans, spans[1:]):
        if a.overlaps(b):
            raise OverlappingSpans(
                f"Cannot encode spans, {a.tolist()} and {b.tolist()} share tokens"
            )
    tags = [O] * n
    for s in spans:
        if s.end >= n:
            raise ValueError(f"Cannot encode span {s.tolist()}, sentence length is {n}")
        tags[s.start] = B
        for i in range(s.start + 1, s.end + 1):
            tags[i] = I
    return tuple(tags)


def biodecode(tags: Sequence[str], lenient: bool = False) -> Tuple[EntitySpan, ...]:
    spans = []
    start: Optional[int] = None
    for i, tag in enumerate(tags):
        if tag == B:
            if start is not None:
                spans.append(EntitySpan(start, i - 1))
            start = i
        elif tag == I:
            if start is None and lenient:
                start = i
        elif tag == O:
            if start is not None:
                spans.append(EntitySpan(start, i - 1))
            start = None
        else:
            raise ValueError(f"Cannot decode tag {tag!r}, expected one of {TAGS}")
    if start is not None:
        spans.append(EntitySpan(start, len(tags) - 1))
    return tuple(spans)


def spantext(sentence: Sentence, span: EntitySpan) -> str:
    return " ".join(sentence.tokens[span.start : span.end + 1])


def lasttoken(sentence: Sentence, span: EntitySpan) -> str:
    return sentence.tokens[span.end]
