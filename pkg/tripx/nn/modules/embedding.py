import numpy as np
import tripx
import tripx.nn.functional as f
from tripx.nn.modules.module import Module
from tripx.nn.parameter import Parameter, parameter
from tripx.tensors import Tensor
from tripx.types import dtype
from typing import Optional, Type


class Embedding(Module):

    def __init__(
        self,
        emdim: int,
        vocab: int,
        padid: Optional[int] = None,
        dtype: Optional[Type[dtype]] = None,
        generator: Optional[np.random.Generator] = None,
    ) -> None:
        super().__init__()
        if padid is not None and not 0 <= padid < vocab:
            raise ValueError(
                f"Cannot build embedding, padding id {padid} is outside a vocabulary of {vocab}"
            )
        self._padid = padid
        table = tripx.randn(vocab, emdim, generator=generator).data / np.sqrt(emdim)
        self._weight = parameter(table, dtype=dtype)

    @property
    def weight(self) -> Parameter:
        return self._weight

    @property
    def rows(self) -> int:
        return self._weight.dim[0]

    def forward(self, ids: Tensor) -> Tensor:
        data = ids.data
        if data.size and (data.min() < 0 or data.max() >= self.rows):
            raise IndexError(
                f"Cannot embed, ids must lie in [0, {self.rows}), received {data.min()}..{data.max()}"
            )
        return f.embedding(ids, self._weight, self._padid)

    def xrepr(self) -> str:
        rows, width, padid = self.rows, self._weight.dim[1], self._padid
        return f"{self.name()}({rows=} {width=} {padid=})"
