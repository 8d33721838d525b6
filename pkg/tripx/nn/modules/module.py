import numpy as np
import tripx
from tripx.nn.parameter import Parameter
from collections import OrderedDict
from typing import Dict, Iterator, Tuple, Any


class Module:

    def __init__(self) -> None:
        self._modules: OrderedDict[str, "Module"] = OrderedDict()
        self._parameters: OrderedDict[str, Parameter] = OrderedDict()
        self._training: bool = True

    @property
    def training(self) -> bool:
        return self._training

    @classmethod
    def name(cls) -> str:
        return cls.__name__

    def forward(self, *args: Any, **kwargs: Any) -> Any:
        raise NotImplementedError

    def parameters(self) -> Iterator[Parameter]:
        for _, p in self.namedparameters():
            yield p

    def namedparameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        for n, p in self._parameters.items():
            yield prefix + n.lstrip("_"), p
        for n, m in self._modules.items():
            yield from m.namedparameters(f"{prefix}{n.lstrip('_')}.")

    def count(self) -> int:
        return sum(p.nelem for p in self.parameters())

    def statedict(self, prefix: str = "") -> Dict[str, np.ndarray]:
        return {n: p.data.copy() for n, p in self.namedparameters(prefix)}

    def loadstatedict(self, state: Dict[str, np.ndarray], prefix: str = "") -> None:
        named = dict(self.namedparameters(prefix))
        missing = sorted(set(named) - set(state))
        if missing:
            raise KeyError(f"Cannot load state, missing parameters {missing}")
        for n, p in named.items():
            arr = np.asarray(state[n])
            if arr.shape != p.dim:
                raise ValueError(
                    f"Cannot load state, {n} has dimensions {arr.shape} but parameter expects {p.dim}"
                )
        # validated first so a bad entry leaves every parameter untouched
        with tripx.nograd():
            for n, p in named.items():
                p.data = np.array(state[n], dtype=p.data.dtype)

    def train(self) -> None:
        self._settraining(True)

    def eval(self) -> None:
        self._settraining(False)

    def _settraining(self, state: bool) -> None:
        self._training = state
        for m in self._modules.values():
            m._settraining(state)

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        return self.forward(*args, **kwargs)

    def __setattr__(self, name: str, value: Any) -> None:
        if isinstance(value, Module):
            self._modules[name] = value
        elif isinstance(value, Parameter):
            self._parameters[name] = value
        self.__dict__[name] = value

    def __repr__(self) -> str:
        return "\n".join(self._lines(0))

    def _lines(self, depth: int) -> Iterator[str]:
        pad = "   " * depth
        if not self._modules:
            yield self.xrepr() if not depth else f"{pad}{self.xrepr()}"
            return
        yield f"{pad}{self.xrepr()}: ("
        for n, m in self._modules.items():
            lines = list(m._lines(depth + 1))
            yield f"{'   ' * (depth + 1)}({n}): {lines[0].lstrip()}"
            yield from lines[1:]
        yield f"{pad})"

    def xrepr(self) -> str:
        return f"{self.name()}()"
