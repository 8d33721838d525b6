import tripx.functions as functions
from tripx.autograd.function import Function
from tripx.tensors import Tensor, tensor
from tripx.types import Tensorlike, Scalar, dimlike, dim
from typing import Optional, Type, Union, Iterable, Sequence


def _binary(function: Type[Function], a: Tensor, b: Union[Tensor, Scalar]) -> Tensor:
    # scalars take the dtype of the tensor they meet
    if not isinstance(b, Tensor):
        b = tensor(b, dtype=a.dtype)
    return function.apply(a, b)


def add(a: Tensor, b: Union[Tensor, Scalar]) -> Tensor:
    return _binary(functions.Add, a, b)


def sub(a: Tensor, b: Union[Tensor, Scalar]) -> Tensor:
    return _binary(functions.Sub, a, b)


def mul(a: Tensor, b: Union[Tensor, Scalar]) -> Tensor:
    return _binary(functions.Mul, a, b)


def div(a: Tensor, b: Union[Tensor, Scalar]) -> Tensor:
    return _binary(functions.Div, a, b)


def pow(a: Tensor, b: Union[Tensor, Scalar]) -> Tensor:
    return _binary(functions.Pow, a, b)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if not a.ndim or not b.ndim:
        raise ValueError("Cannot multiply matrices, received a scalar, use mul()")
    if a.ndim == b.ndim == 1:
        raise ValueError("Cannot multiply matrices, received two vectors, use mul() and sum()")
    inner = b.dim[-2] if b.ndim > 1 else b.dim[0]
    if a.dim[-1] != inner:
        raise ValueError(
            f"Cannot multiply matrices, inner dimensions differ ({a.dim} @ {b.dim})"
        )
    return functions.Matmul.apply(a, b)


def square(a: Tensor) -> Tensor:
    return pow(a, 2.0)


def sqrt(a: Tensor) -> Tensor:
    return pow(a, 0.5)


def exp(a: Tensor) -> Tensor:
    return functions.Exp.apply(a)


def log(a: Tensor) -> Tensor:
    return functions.Log.apply(a)


def neg(a: Tensor) -> Tensor:
    return functions.Neg.apply(a)


def sum(a: Tensor, dim: Optional[dimlike] = None, keepdims: bool = False) -> Tensor:
    return functions.Sum.apply(a, dim, keepdims)


def mean(a: Tensor, dim: Optional[dimlike] = None, keepdims: bool = False) -> Tensor:
    return functions.Mean.apply(a, dim, keepdims)


def transpose(a: Tensor, dim0: int = -2, dim1: int = -1) -> Tensor:
    return functions.Transpose.apply(a, dim0, dim1)


def squeeze(a: Tensor, dim: Optional[dimlike] = None) -> Tensor:
    return functions.Squeeze.apply(a, dim)


def unsqueeze(a: Tensor, dim: dimlike) -> Tensor:
    return functions.Unsqueeze.apply(a, dim)


def reshape(a: Tensor, newdim: dim) -> Tensor:
    return functions.Reshape.apply(a, newdim)


def select(
    a: Tensor,
    index: Union[Iterable[Union[Tensor, Tensorlike, slice]], Tensor, Tensorlike, slice],
) -> Tensor:
    # tensor indices are unwrapped so numpy sees plain arrays
    if isinstance(index, (list, tuple)):
        index = tuple(i.data if isinstance(i, Tensor) else i for i in index)
    elif isinstance(index, Tensor):
        index = index.data
    return functions.Slice.apply(a, index)


def concat(tensors: Sequence[Tensor], dim: int = 0) -> Tensor:
    if not tensors:
        raise ValueError("Cannot concatenate, received no tensors")
    ndim = tensors[0].ndim
    if ndim < 1 or any(t.ndim != ndim for t in tensors):
        raise ValueError("Cannot concatenate, tensors need the same non-zero number of dimensions")
    dim = dim + ndim if dim < 0 else dim
    others = {t.dim[:dim] + t.dim[dim + 1 :] for t in tensors}
    if len(others) > 1:
        raise ValueError(
            f"Cannot concatenate along {dim}, the remaining dimensions differ {sorted(others)}"
        )
    return functions.Concat.apply(*tensors, dim=dim)
