import numpy as np
from numpy import ndarray
from typing import Type, Any, Tuple, Iterable, Union

dim = Tuple[int, ...]
dimlike = Union[Tuple[int, ...], int]
Scalar = Union[float, int, bool]
Tensorlike = Union[Iterable[Any], Scalar]


class dtype:

    numpytype: Any = None

    @classmethod
    def numpy(cls, data: Any) -> ndarray:
        return np.asarray(data, dtype=cls.numpytype)

    @classmethod
    def name(cls) -> str:
        return cls.__name__


class int(dtype):
    numpytype = np.int32


class long(dtype):
    numpytype = np.int64


class float(dtype):
    numpytype = np.float32


class double(dtype):
    numpytype = np.float64


class bool(dtype):
    numpytype = np.bool_


floating = (float, double)

_bynumpy = {np.dtype(t.numpytype): t for t in (int, long, float, double, bool)}


def dtypeof(data: Any) -> Type[dtype]:
    # python scalars and lists go through numpy's own inference
    kind = data.dtype if isinstance(data, ndarray) else np.asarray(data).dtype
    if kind not in _bynumpy:
        raise KeyError(f"Cannot map {kind} to a tensor dtype")
    return _bynumpy[kind]
