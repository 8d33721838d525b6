import numpy as np
import tripx
import tripx.nn.functional as f
from tripx.nn.modules.module import Module
from tripx.nn.parameter import Parameter, parameter
from tripx.nn.utils import fanin
from tripx.tensors import Tensor
from tripx.types import dtype
from typing import Optional, Type


class Linear(Module):

    def __init__(
        self,
        inputdim: int,
        outputdim: int,
        bias: bool = True,
        dtype: Optional[Type[dtype]] = None,
        generator: Optional[np.random.Generator] = None,
    ) -> None:
        super().__init__()
        self._weight = parameter(
            fanin(inputdim, (outputdim, inputdim), generator=generator), dtype
        )
        self._bias = parameter(tripx.zeros(outputdim), dtype) if bias else None

    @property
    def weight(self) -> Parameter:
        return self._weight

    @property
    def bias(self) -> Optional[Parameter]:
        return self._bias

    def forward(self, x: Tensor) -> Tensor:
        if x.dim[-1] != self._weight.dim[1]:
            raise ValueError(
                f"Cannot project, expected trailing dimension {self._weight.dim[1]}, received {x.dim[-1]}"
            )
        return f.linear(x, self._weight, self._bias)

    def xrepr(self) -> str:
        outputdim, inputdim = self._weight.dim
        bias = self._bias is not None
        return f"{self.name()}({inputdim=} {outputdim=} {bias=})"
