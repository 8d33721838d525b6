import numpy as np
import tripx
from tripx.tensors import Tensor
from tripx.types import dtype, dimlike
from tripx.nn.parameter import Parameter
from typing import Optional, Type, Iterable


def fanin(
    inputdim: int,
    dim: dimlike,
    usegrad: bool = False,
    dtype: Optional[Type[dtype]] = None,
    generator: Optional[np.random.Generator] = None,
) -> Tensor:
    bound = 1 / inputdim**0.5
    return tripx.uniform(-bound, bound, dim, usegrad, dtype, generator)


def clipgradnorm(parameters: Iterable[Parameter], maxnorm: float) -> float:
    parameters = tuple(p for p in parameters if p.grad is not None)
    norm = float(np.sqrt(sum(np.sum(np.square(p.grad.data)) for p in parameters)))
    if maxnorm > 0 and norm > maxnorm:
        scale = maxnorm / (norm + 1e-12)
        for p in parameters:
            p._grad = tripx.tensor(p.grad.data * scale)
    return norm
