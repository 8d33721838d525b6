import numpy as np
import tripx.types as types
from tripx.types import Scalar, dimlike, dim, dtype
from tripx.tensors import Tensor, tensor
from typing import Optional, Type, Any, Tuple


def todim(dim: Tuple[Any, ...]) -> dim:
    # accepts zeros(2, 3) as well as zeros((2, 3))
    if dim and isinstance(dim[0], tuple):
        return dim[0]
    return tuple(dim)


def zeros(
    *dim: dimlike, usegrad: bool = False, dtype: Optional[Type[dtype]] = None
) -> Tensor:
    return tensor(np.zeros(todim(dim)), usegrad, dtype or types.double)


def _fillas(a: Tensor, value: float, usegrad: bool, dtype: Optional[Type[dtype]]) -> Tensor:
    if dtype is None:
        dtype = types.double if a.dtype is types.bool else a.dtype
    return tensor(np.full(a.dim, value), usegrad, dtype)


def zeroslike(
    a: Tensor, usegrad: bool = False, dtype: Optional[Type[dtype]] = None
) -> Tensor:
    return _fillas(a, 0.0, usegrad, dtype)


def oneslike(
    a: Tensor, usegrad: bool = False, dtype: Optional[Type[dtype]] = None
) -> Tensor:
    return _fillas(a, 1.0, usegrad, dtype)


def uniform(
    low: float = 0.0,
    high: float = 1.0,
    dim: Optional[dimlike] = None,
    usegrad: bool = False,
    dtype: Optional[Type[dtype]] = None,
    generator: Optional[np.random.Generator] = None,
) -> Tensor:
    generator = np.random.default_rng() if generator is None else generator
    return tensor(generator.uniform(low, high, dim), usegrad, dtype or types.double)


def randn(
    *dim: dimlike,
    usegrad: bool = False,
    dtype: Optional[Type[dtype]] = None,
    generator: Optional[np.random.Generator] = None,
) -> Tensor:
    generator = np.random.default_rng() if generator is None else generator
    return tensor(generator.standard_normal(todim(dim)), usegrad, dtype or types.double)


def item(a: Tensor) -> Scalar:
    if a.nelem != 1:
        raise RuntimeError(
            f"Cannot read a single value, tensor holds {a.nelem} elements"
        )
    return a.data.item()


def to(a: Tensor, dtype: Type[dtype]) -> Tensor:
    if a.usegrad and dtype not in types.floating:
        raise RuntimeError(
            f"Cannot cast to {dtype.name()}, tensor records gradients, detach() it first"
        )
    return tensor(dtype.numpy(a.data), a.usegrad, dtype)
