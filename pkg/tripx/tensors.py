import tripx
import tripx.types as types
from tripx.types import Tensorlike, Scalar, dtype, dim, dimlike
from typing import Optional, Iterable, Type, Any, Union, TYPE_CHECKING
from numpy import ndarray

if TYPE_CHECKING:
    from tripx.autograd.graph import Node

Operand = Union["Tensor", Scalar]

_FIELDS = frozenset(("_data", "_usegrad", "_grad", "_gradfn", "_leaf", "_version"))


class Tensor:

    def __init__(
        self,
        data: ndarray,
        usegrad: bool,
        grad: Optional["Tensor"],
        gradfn: Optional["Node"],
        leaf: bool,
    ) -> None:
        self._data: ndarray = data
        self._grad: Optional[Tensor] = grad
        self._gradfn: Optional[Node] = gradfn
        self._usegrad: bool = usegrad
        self._leaf: bool = leaf
        self._version: int = 0

    @property
    def data(self) -> ndarray:
        return self._data

    @data.setter
    def data(self, data: Union[Scalar, ndarray]) -> None:
        kind = types.dtypeof(data)
        if self._usegrad and kind not in types.floating:
            raise ValueError(
                f"Cannot assign data, tensor records gradients but {kind.name()} is not floating-point"
            )
        if tripx.Autograd.enabled():
            self._version += 1
        self._data = kind.numpy(data)

    @property
    def dim(self) -> dim:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def nelem(self) -> int:
        return self._data.size

    @property
    def dtype(self) -> Type[dtype]:
        return types.dtypeof(self._data)

    @property
    def usegrad(self) -> bool:
        return self._usegrad

    @usegrad.setter
    def usegrad(self, state: bool) -> None:
        if state and not self.gradtensor:
            raise ValueError(
                f"Cannot record gradients for a {self.dtype.name()} tensor, only floating-point tensors can"
            )
        self._usegrad = state

    @property
    def gradtensor(self) -> bool:
        return self.dtype in types.floating

    @property
    def grad(self) -> Optional["Tensor"]:
        return self._grad

    @property
    def gradfn(self) -> Optional["Node"]:
        return self._gradfn

    @property
    def leaf(self) -> bool:
        return self._leaf

    @property
    def version(self) -> int:
        return self._version

    def item(self) -> Scalar:
        return tripx.item(self)

    def backward(self, grad: Optional["Tensor"] = None) -> None:
        tripx.backward(self, grad)

    def cleargrad(self) -> None:
        self._grad = None

    def detach(self) -> "Tensor":
        return Tensor(self._data, False, None, None, True)

    def to(self, dtype: Type[types.dtype]) -> "Tensor":
        return tripx.to(self, dtype)

    def mutate(self, **attrs: Any) -> None:
        for k, v in attrs.items():
            setattr(self, f"_{k}", v)

    def sum(self, dim: Optional[dimlike] = None, keepdims: bool = False) -> "Tensor":
        return tripx.sum(self, dim, keepdims)

    def mean(self, dim: Optional[dimlike] = None, keepdims: bool = False) -> "Tensor":
        return tripx.mean(self, dim, keepdims)

    def squeeze(self, dim: Optional[dimlike] = None) -> "Tensor":
        return tripx.squeeze(self, dim)

    def unsqueeze(self, dim: dimlike) -> "Tensor":
        return tripx.unsqueeze(self, dim)

    def reshape(self, newdim: types.dim) -> "Tensor":
        return tripx.reshape(self, newdim)

    def transpose(self, dim0: int = -2, dim1: int = -1) -> "Tensor":
        return tripx.transpose(self, dim0, dim1)

    def __add__(self, other: Operand) -> "Tensor":
        return tripx.add(self, other)

    __radd__ = __add__

    def __sub__(self, other: Operand) -> "Tensor":
        return tripx.sub(self, other)

    def __rsub__(self, other: Scalar) -> "Tensor":
        return tripx.sub(tensor(other, dtype=self.dtype), self)

    def __isub__(self, other: Operand) -> "Tensor":
        # in place, used by optimizer steps under nograd
        other = other.data if isinstance(other, Tensor) else other
        self.data = self._data - other
        return self

    def __mul__(self, other: Operand) -> "Tensor":
        return tripx.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other: Operand) -> "Tensor":
        return tripx.div(self, other)

    def __rtruediv__(self, other: Scalar) -> "Tensor":
        return tripx.div(tensor(other, dtype=self.dtype), self)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return tripx.matmul(self, other)

    def __pow__(self, other: Operand) -> "Tensor":
        return tripx.pow(self, other)

    def __neg__(self) -> "Tensor":
        return tripx.neg(self)

    def __len__(self) -> int:
        return len(self._data)

    def __bool__(self) -> bool:
        raise ValueError("Cannot take the truth of a tensor, compare item() or data instead")

    def __float__(self) -> float:
        return float(self.item())

    def __getitem__(
        self, index: Union[Iterable[Union["Tensor", Tensorlike, slice]], Tensorlike, "Tensor", slice]
    ) -> "Tensor":
        return tripx.select(self, index)

    def __setattr__(self, name: str, value: Any) -> None:
        prop = getattr(type(self), name, None)
        if isinstance(prop, property) and prop.fset is not None:
            prop.fset(self, value)
        elif name in _FIELDS:
            object.__setattr__(self, name, value)
        else:
            raise AttributeError(
                f"Cannot assign {name} on {type(self).__name__}, it is not a tensor field"
            )

    def __repr__(self) -> str:
        body = repr(self._data)[len("array("):-1].split(", dtype")[0].replace(",", "")
        extra = ""
        if self._usegrad:
            extra = f" gradfn={self._gradfn.name() if self._gradfn is not None else None}"
        return f"{type(self).__name__}({body}{extra} dtype={self.dtype.name()})"


def tensor(
    data: Union[Tensor, Tensorlike],
    usegrad: bool = False,
    dtype: Optional[Type[dtype]] = None,
) -> Tensor:
    if isinstance(data, Tensor):
        dtype = data.dtype if dtype is None else dtype
        data = data.data.copy()
    if dtype is None:
        dtype = types.dtypeof(data)
    return Tensor(dtype.numpy(data), usegrad, None, None, True)
