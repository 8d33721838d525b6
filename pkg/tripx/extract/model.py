from typing import Optional, Sequence, Tuple

import numpy as np

from tripx.nn import Module
from tripx.tensors import Tensor
from tripx.extract.config import RunConfig
from tripx.extract.core import RelationSet, Sentence
from tripx.extract.decoder import DecoderParams
from tripx.extract.encoder import PADID, DeskEncoder, Encoder, Vocabulary
from tripx.extract.errors import SentenceTooLong


class Extractor(Module):

    def __init__(
        self,
        encoder: Encoder,
        decoder: DecoderParams,
        vocab: Vocabulary,
        relations: RelationSet,
        config: RunConfig,
    ) -> None:
        super().__init__()
        if encoder.dim != decoder.dim:
            raise ValueError(
                f"Cannot build extractor, encoder dimension {encoder.dim} != decoder dimension {decoder.dim}"
            )
        if relations.size != decoder.relations:
            raise ValueError(
                f"Cannot build extractor, {relations.size} relations but decoder expects {decoder.relations}"
            )
        self._encoder = encoder
        self._decoder = decoder
        self._vocab = vocab
        self._relations = relations
        self._config = config

    @classmethod
    def build(
        cls,
        config: RunConfig,
        vocab: Vocabulary,
        relations: RelationSet,
        generator: Optional[np.random.Generator] = None,
    ) -> "Extractor":
        enc = config.encoder
        encoder = DeskEncoder(
            len(vocab),
            enc.dim,
            enc.layers,
            enc.mixer,
            enc.window,
            enc.heads,
            enc.positions,
            enc.maxlen,
            generator,
        )
        decoder = DecoderParams(
            enc.dim, relations.size, config.training.tagging, generator
        )
        return cls(encoder, decoder, vocab, relations, config)

    @property
    def encoder(self) -> Encoder:
        return self._encoder

    @property
    def decoder(self) -> DecoderParams:
        return self._decoder

    @property
    def vocab(self) -> Vocabulary:
        return self._vocab

    @property
    def relations(self) -> RelationSet:
        return self._relations

    @property
    def config(self) -> RunConfig:
        return self._config

    @property
    def tagging(self) -> str:
        return self._decoder.tagging

    def pad(self, sentences: Sequence[Sentence]) -> Tuple[np.ndarray, np.ndarray]:
        maxlen = self._encoder.maxlen
        for s in sentences:
            if s.length > maxlen:
                raise SentenceTooLong(
                    f"Cannot encode sentence {s.id}, it has {s.length} tokens but maxlen is {maxlen}"
                )
        width = max(s.length for s in sentences)
        ids = np.full((len(sentences), width), PADID, dtype=np.int64)
        mask = np.zeros((len(sentences), width), dtype=np.float64)
        for i, s in enumerate(sentences):
            ids[i, : s.length] = self._vocab.encode(s.tokens)
            mask[i, : s.length] = 1.0
        return ids, mask

    def forward(self, ids: np.ndarray, mask: np.ndarray) -> Tensor:
        return self._encoder(ids, mask)

    def xrepr(self) -> str:
        relations, vocab = self.relations.size, len(self.vocab)
        return f"{self.name()}({relations=} {vocab=})"
