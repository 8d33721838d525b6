import tripx
from tripx.tensors import Tensor
from numpy import ndarray
from typing import Any, Tuple, Union


class Context:

    def __init__(self) -> None:
        self.__dict__["_saved"] = ()

    def save(self, *tensors: Tensor) -> None:
        self.__dict__["_saved"] = tuple((t, t.version) for t in tensors)

    def tensors(self) -> Tuple[Tensor, ...]:
        stale = [i for i, (t, v) in enumerate(self._saved) if t.version != v]
        if stale:
            raise RuntimeError(
                f"Cannot retrieve saved tensors, inputs {stale} were modified in place after the forward pass"
            )
        return tuple(t for t, _ in self._saved)

    def tracked(self) -> bool:
        return any(t.usegrad for t, _ in self._saved)

    def __getattr__(self, name: str) -> Any:
        raise AttributeError(f"Cannot read context, nothing was saved as {name!r}")

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(saved={len(self._saved)})"


class Function:

    @staticmethod
    def forward(context: Context, *args: Any, **kwargs: Any) -> ndarray:
        raise NotImplementedError

    @staticmethod
    def backward(context: Context, grad: Tensor) -> Union[Tuple[ndarray, ...], ndarray]:
        raise NotImplementedError

    @classmethod
    def apply(cls, *args: Any, **kwargs: Any) -> Tensor:
        context = Context()
        output = tripx.tensor(cls.forward(context, *args, **kwargs))
        if tripx.Autograd.enabled() and context.tracked():
            tripx.graph.addtograph(output, cls, context)
        return output

    @classmethod
    def name(cls) -> str:
        return cls.__name__
