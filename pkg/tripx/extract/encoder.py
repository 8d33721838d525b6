import re
from collections import Counter
from typing import Iterable, List, Optional, Protocol, Sequence

import numpy as np

import tripx
import tripx.nn.functional as f
from tripx.nn import Embedding, Module, MultiHeadAttention, WindowConv
from tripx.tensors import Tensor
from tripx.extract.core import Sentence
from tripx.extract.errors import SentenceTooLong

PAD, UNK = "<pad>", "<unk>"
PADID, UNKID = 0, 1

_PUNCT = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str, scheme: str = "whitespace") -> List[str]:
    if scheme == "whitespace":
        return text.split()
    if scheme == "punct":
        return _PUNCT.findall(text)
    raise ValueError(f"Cannot tokenize, unknown scheme {scheme!r}")


class Vocabulary:

    def __init__(self, tokens: Iterable[str] = ()) -> None:
        self._tokens = [PAD, UNK]
        self._tokens.extend(t for t in dict.fromkeys(tokens) if t not in (PAD, UNK))
        self._index = {t: i for i, t in enumerate(self._tokens)}

    @classmethod
    def build(cls, sentences: Iterable[Sentence], mincount: int = 1) -> "Vocabulary":
        counts = Counter()
        order = {}
        for s in sentences:
            for t in s.tokens:
                counts[t] += 1
                order.setdefault(t, len(order))
        return cls(t for t in order if counts[t] >= mincount)

    @property
    def tokens(self) -> List[str]:
        return list(self._tokens)

    def id(self, token: str) -> int:
        return self._index.get(token, UNKID)

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        return np.array([self.id(t) for t in tokens], dtype=np.int64)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return len(self._tokens)

    def __repr__(self) -> str:
        size = len(self)
        return f"{self.__class__.__name__}({size=})"


class Encoder(Protocol):

    dim: int
    maxlen: int

    def forward(self, ids: np.ndarray, mask: np.ndarray) -> Tensor: ...

    def __call__(self, ids: np.ndarray, mask: np.ndarray) -> Tensor: ...


class DeskEncoder(Module):

    def __init__(
        self,
        vocab: int,
        dim: int,
        layers: int = 2,
        mixer: str = "conv",
        window: int = 3,
        heads: int = 4,
        positions: bool = False,
        maxlen: int = 100,
        generator: Optional[np.random.Generator] = None,
    ) -> None:
        super().__init__()
        if mixer not in ("conv", "attention"):
            raise ValueError(f"Cannot build encoder, unknown mixer {mixer!r}")
        self._dim = dim
        self._layers = layers
        self._mixer = mixer
        self._maxlen = maxlen
        self._embedding = Embedding(dim, vocab, padid=PADID, generator=generator)
        self._positions = (
            Embedding(dim, maxlen, generator=generator) if positions else None
        )
        for i in range(layers):
            if mixer == "conv":
                block = WindowConv(dim, dim, window, generator=generator)
            else:
                head = dim // heads
                block = MultiHeadAttention(
                    dim, head, head, heads, bias=True, generator=generator
                )
            setattr(self, f"_block{i}", block)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def maxlen(self) -> int:
        return self._maxlen

    @property
    def mixer(self) -> str:
        return self._mixer

    def blocks(self) -> List[Module]:
        return [getattr(self, f"_block{i}") for i in range(self._layers)]

    def forward(self, ids: np.ndarray, mask: np.ndarray) -> Tensor:
        ids = np.asarray(ids, dtype=np.int64)
        mask = np.asarray(mask, dtype=np.float64)
        length = ids.shape[-1]
        if length > self._maxlen:
            raise SentenceTooLong(
                f"Cannot encode, sentence has {length} tokens but maxlen is {self._maxlen}"
            )
        keep = tripx.tensor(mask[..., None])
        x = self._embedding(tripx.tensor(ids))
        if self._positions is not None:
            x = x + self._positions(tripx.tensor(np.arange(length)))
        x = x * keep
        keymask = mask[:, None, None, :]
        for block in self.blocks():
            if self._mixer == "conv":
                y = block(x)
            else:
                y, _ = block(x, x, x, mask=keymask)
            # residual block, padding re-zeroed so batches match single sentences
            x = (x + f.tanh(y)) * keep
        return x

    def xrepr(self) -> str:
        dim, layers, mixer, maxlen = self.dim, self._layers, self.mixer, self.maxlen
        return f"{self.name()}({dim=} {layers=} {mixer=} {maxlen=})"


def encode(
    sentence: Sentence, encoder: Encoder, vocab: Vocabulary
) -> Tensor:
    if sentence.length > encoder.maxlen:
        raise SentenceTooLong(
            f"Cannot encode sentence {sentence.id}, it has {sentence.length} tokens but maxlen is {encoder.maxlen}"
        )
    ids = vocab.encode(sentence.tokens)[None]
    mask = np.ones_like(ids, dtype=np.float64)
    return encoder(ids, mask)[0]


def avgpool(h: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    if h.ndim < 2 or h.dim[-2] < 1:
        raise ValueError(f"Cannot pool, expected at least one token row, received {h.dim}")
    if mask is None:
        return h.mean(dim=-2)
    mask = np.asarray(mask, dtype=np.float64)
    counts = np.maximum(mask.sum(axis=-1, keepdims=True), 1.0)
    masked = h * tripx.tensor(mask[..., None])
    return masked.sum(dim=-2) / tripx.tensor(counts)


def firstsubwordpool(hsub: Tensor, wordstarts: Sequence[int]) -> Tensor:
    starts = np.asarray(wordstarts, dtype=np.int64)
    length = hsub.dim[-2]
    if starts.ndim != 1 or not len(starts):
        raise ValueError("Cannot pool subwords, expected a non-empty list of word starts")
    if starts[0] != 0 or np.any(np.diff(starts) <= 0) or starts[-1] >= length:
        raise ValueError(
            f"Cannot pool subwords, word starts must increase from 0 and stay below {length}"
        )
    if hsub.ndim == 2:
        return hsub[starts]
    return hsub[:, starts]
