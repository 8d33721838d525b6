import numpy as np
import tripx.nn.functional as f
from tripx.tensors import Tensor
from tripx.nn.modules.module import Module
from tripx.nn.modules.linear import Linear
from tripx.types import dtype
from typing import Optional, Tuple, Type


class MultiHeadAttention(Module):

    def __init__(
        self,
        dm: int,
        dk: int,
        dv: int,
        heads: int,
        maskfill: float = -1e9,
        bias: bool = False,
        dtype: Optional[Type[dtype]] = None,
        generator: Optional[np.random.Generator] = None,
    ) -> None:
        super().__init__()
        if heads < 1 or dm % heads:
            raise ValueError(
                f"Cannot build attention, {dm=} must split evenly into {heads=}"
            )
        self._heads = heads
        self._dk = dk
        self._dv = dv
        self._maskfill = maskfill
        self._query = Linear(dm, heads * dk, bias, dtype, generator)
        self._key = Linear(dm, heads * dk, bias, dtype, generator)
        self._value = Linear(dm, heads * dv, bias, dtype, generator)
        self._out = Linear(heads * dv, dm, bias, dtype, generator)

    @property
    def heads(self) -> int:
        return self._heads

    def split(self, x: Tensor, width: int) -> Tensor:
        # (batch, length, heads * width) -> (batch, heads, length, width)
        return x.reshape((-1, x.dim[1], self._heads, width)).transpose(1, 2)

    def forward(
        self, q: Tensor, k: Tensor, v: Tensor, mask: Optional[np.ndarray] = None
    ) -> Tuple[Tensor, Tensor]:
        qlen = q.dim[1]
        q = self.split(self._query(q), self._dk)
        k = self.split(self._key(k), self._dk)
        v = self.split(self._value(v), self._dv)
        ctx, weights = f.attention(q, k, v, mask, self._maskfill)
        ctx = ctx.transpose(1, 2).reshape((-1, qlen, self._heads * self._dv))
        return self._out(ctx), weights

    def xrepr(self) -> str:
        heads, dk, dv = self._heads, self._dk, self._dv
        return f"{self.name()}({heads=} {dk=} {dv=})"
