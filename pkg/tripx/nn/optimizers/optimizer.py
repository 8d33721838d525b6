import tripx
from tripx.tensors import Tensor
from tripx.nn.parameter import Parameter
from typing import Any, Dict, Iterable, List, Tuple, Union

ParamGroup = Dict[str, Any]


class Optimizer:

    def __init__(
        self,
        parameters: Union[Iterable[Parameter], Iterable[ParamGroup]],
        learnrate: float,
        decay: float = 0.0,
    ) -> None:
        self._stepnum = 0
        self._learnrate = learnrate
        self._decay = decay
        self._groups = self._makegroups(parameters)

    @property
    def learnrate(self) -> float:
        return self._learnrate

    @property
    def decay(self) -> float:
        return self._decay

    @property
    def stepnum(self) -> int:
        return self._stepnum

    @property
    def groups(self) -> List[ParamGroup]:
        return self._groups

    @classmethod
    def name(cls) -> str:
        return cls.__name__

    def parameters(self) -> Tuple[Parameter, ...]:
        return tuple(p for g in self._groups for p in g["parameters"])

    def update(self, parameter: Tensor, gradstep: Tensor) -> None:
        with tripx.nograd():
            parameter -= gradstep

    def zerograd(self) -> None:
        for p in self.parameters():
            p.cleargrad()

    def step(self) -> None:
        self._stepnum += 1

    def _makegroups(
        self, parameters: Union[Iterable[Parameter], Iterable[ParamGroup]]
    ) -> List[ParamGroup]:
        parameters = list(parameters)
        if parameters and isinstance(parameters[0], dict):
            groups = []
            for group in parameters:
                if "parameters" not in group:
                    raise ValueError(
                        "Cannot build parameter group, missing 'parameters' entry"
                    )
                groups.append(
                    {
                        "parameters": tuple(group["parameters"]),
                        "learnrate": group.get("learnrate", self._learnrate),
                        "decay": group.get("decay", self._decay),
                    }
                )
            return groups
        return [
            {
                "parameters": tuple(parameters),
                "learnrate": self._learnrate,
                "decay": self._decay,
            }
        ]

    def __repr__(self) -> str:
        learnrate, decay = self.learnrate, self.decay
        groups = len(self._groups)
        return f"{self.name()}({learnrate=:.2e} {decay=} {groups=})"
