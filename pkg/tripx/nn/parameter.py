import numpy as np
import tripx.types as types
from tripx.types import dtype
from tripx.tensors import Tensor
from typing import Optional, Type, Union


class Parameter(Tensor):

    def __init__(self, data: np.ndarray) -> None:
        super().__init__(data, True, None, None, True)


def parameter(
    a: Union[Tensor, np.ndarray], dtype: Optional[Type[dtype]] = None
) -> Parameter:
    data = a.data if isinstance(a, Tensor) else np.asarray(a)
    if dtype is None:
        dtype = types.dtypeof(data)
    if dtype not in types.floating:
        raise ValueError(
            f"Cannot create parameter, {dtype.name()} is not a floating-point type"
        )
    return Parameter(dtype.numpy(data).copy())
