import numpy as np
import tripx
import tripx.types as types
import tripx.nn.functional as f
from tripx.nn.modules.module import Module
from tripx.nn.parameter import Parameter, parameter
from tripx.nn.utils import fanin
from tripx.tensors import Tensor
from tripx.types import dtype
from typing import Type, Optional


class WindowConv(Module):

    def __init__(
        self,
        inputdim: int,
        outputdim: int,
        width: int = 3,
        dtype: Optional[Type[dtype]] = None,
        generator: Optional[np.random.Generator] = None,
    ) -> None:
        super().__init__()
        if width < 1 or width % 2 == 0:
            raise ValueError(f"Cannot build window convolution, width must be odd and positive, received {width}")
        if dtype is None:
            dtype = types.double
        self._inputdim = inputdim
        self._outputdim = outputdim
        self._width = width
        self._dtype = dtype
        weight = fanin(
            width * inputdim, (outputdim, width * inputdim), generator=generator
        )
        self._weight = parameter(weight, dtype=dtype)
        self._bias = parameter(tripx.zeros(outputdim), dtype=dtype)

    @property
    def weight(self) -> Parameter:
        return self._weight

    @property
    def bias(self) -> Parameter:
        return self._bias

    @property
    def width(self) -> int:
        return self._width

    @property
    def inputdim(self) -> int:
        return self._inputdim

    @property
    def outputdim(self) -> int:
        return self._outputdim

    def forward(self, x: Tensor) -> Tensor:
        return f.conv1d(x, self.weight, self.bias, self.width)

    def xrepr(self) -> str:
        inputdim, outputdim, width = self.inputdim, self.outputdim, self.width
        dtype = self._dtype.name()
        return f"{self.name()}({inputdim=} {outputdim=} {width=} {dtype=})"
