from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Optional, Tuple, Union

import numpy as np

import tripx
import tripx.nn.functional as f
from tripx.nn import Module, Parameter, parameter
from tripx.nn.utils import fanin
from tripx.tensors import Tensor
from tripx.extract.encoder import avgpool
from tripx.extract.errors import DimensionMismatch

TAGGINGS = ("dual", "single")


class DecoderParams(Module):

    def __init__(
        self,
        dim: int,
        relations: int,
        tagging: str = "dual",
        generator: Optional[np.random.Generator] = None,
    ) -> None:
        super().__init__()
        if tagging not in TAGGINGS:
            raise ValueError(f"Cannot build decoder, unknown tagging mode {tagging!r}")
        if dim < 1 or relations < 1:
            raise ValueError(
                f"Cannot build decoder, dimensions must be positive ({dim=} {relations=})"
            )
        self._dim = dim
        self._relations = relations
        self._tagging = tagging
        self._wrel = parameter(fanin(dim, (dim, relations), generator=generator))
        self._brel = parameter(tripx.zeros(relations))
        self._u = parameter(fanin(dim, (dim, relations), generator=generator))
        if tagging == "dual":
            self._wsub = parameter(fanin(dim, (dim, 3), generator=generator))
            self._bsub = parameter(tripx.zeros(3))
            self._wobj = parameter(fanin(dim, (dim, 3), generator=generator))
            self._bobj = parameter(tripx.zeros(3))
        else:
            self._wtag = parameter(fanin(dim, (dim, 5), generator=generator))
            self._btag = parameter(tripx.zeros(5))
        self._wglob = parameter(fanin(dim, (2 * dim,), generator=generator))
        self._bglob = parameter(tripx.zeros(1))

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def relations(self) -> int:
        return self._relations

    @property
    def tagging(self) -> str:
        return self._tagging

    def get(self, name: str) -> Parameter:
        named = dict(self.namedparameters())
        if name not in named:
            raise KeyError(f"Cannot find decoder parameter {name!r}")
        return named[name]

    def xrepr(self) -> str:
        dim, relations, tagging = self.dim, self.relations, self.tagging
        count = self.count()
        return f"{self.name()}({dim=} {relations=} {tagging=} {count=})"


@dataclass(frozen=True)
class PredictionBundle:
    prel: np.ndarray
    tags: Dict[int, Tuple[np.ndarray, np.ndarray]]
    corr: np.ndarray
    selected: FrozenSet[int] = field(default_factory=frozenset)

    @property
    def length(self) -> int:
        return self.corr.shape[0]

    @property
    def relations(self) -> Tuple[int, ...]:
        return tuple(sorted(self.tags))


def predictrelations(
    h: Tensor, params: DecoderParams, mask: Optional[np.ndarray] = None
) -> Tensor:
    _checkdim(h, params)
    pooled = avgpool(h, mask)
    return f.sigmoid(tripx.matmul(pooled, params.get("wrel")) + params.get("brel"))


def selectrelations(
    prel: Union[Tensor, np.ndarray, Iterable[float]], lambda1: float
) -> FrozenSet[int]:
    if not 0 < lambda1 < 1:
        raise ValueError(f"Cannot select relations, lambda1 must lie in (0, 1), received {lambda1}")
    probs = prel.data if isinstance(prel, Tensor) else np.asarray(prel, dtype=np.float64)
    return frozenset(int(k) for k in np.flatnonzero(probs > lambda1))


def tagsequences(
    h: Tensor, relation: Union[int, np.ndarray], params: DecoderParams
) -> Tuple[Tensor, Tensor]:
    x = _conditioned(h, relation, params)
    if params.tagging == "single":
        return _split(_joint(x, params))
    sub = f.softmax(tripx.matmul(x, params.get("wsub")) + params.get("bsub"), -1)
    obj = f.softmax(tripx.matmul(x, params.get("wobj")) + params.get("bobj"), -1)
    return sub, obj


def tagjoint(h: Tensor, relation: Union[int, np.ndarray], params: DecoderParams) -> Tensor:
    if params.tagging != "single":
        raise ValueError("Cannot compute joint tags, decoder uses dual tagging")
    return _joint(_conditioned(h, relation, params), params)


def globalcorrespondence(h: Tensor, params: DecoderParams) -> Tensor:
    _checkdim(h, params)
    d = params.dim
    wglob = params.get("wglob")
    subject = tripx.matmul(h, wglob[:d]).unsqueeze(-1)
    obj = tripx.matmul(h, wglob[d:]).unsqueeze(-2)
    return f.sigmoid(subject + obj + params.get("bglob"))


def predictbundle(
    h: Tensor,
    params: DecoderParams,
    lambda1: float = 0.5,
    selectall: bool = False,
) -> PredictionBundle:
    with tripx.nograd():
        prel = predictrelations(h, params)
        selected = selectrelations(prel, lambda1)
        relations = range(params.relations) if selectall else sorted(selected)
        tags = {}
        for k in relations:
            sub, obj = tagsequences(h, k, params)
            tags[k] = (sub.data, obj.data)
        corr = globalcorrespondence(h, params)
    return PredictionBundle(prel.data, tags, corr.data, selected)


def _conditioned(h: Tensor, relation: Union[int, np.ndarray], params: DecoderParams) -> Tensor:
    _checkdim(h, params)
    ids = np.asarray(relation, dtype=np.int64)
    if np.any(ids < 0) or np.any(ids >= params.relations):
        raise DimensionMismatch(
            f"Cannot tag sequences, relation ids {ids.tolist()} fall outside {params.relations} relations"
        )
    if not ids.ndim:
        return h + params.get("u").transpose()[int(ids)]
    return h + params.get("u").transpose()[ids].unsqueeze(-2)


def _joint(x: Tensor, params: DecoderParams) -> Tensor:
    return f.softmax(tripx.matmul(x, params.get("wtag")) + params.get("btag"), -1)


def _split(joint: Tensor) -> Tuple[Tensor, Tensor]:
    # joint columns: B-sub, I-sub, B-obj, I-obj, O
    sub = tripx.concat((joint[..., 0:2], joint[..., 2:].sum(-1, keepdims=True)), -1)
    rest = joint[..., 0:2].sum(-1, keepdims=True) + joint[..., 4:5]
    obj = tripx.concat((joint[..., 2:4], rest), -1)
    return sub, obj


def _checkdim(h: Tensor, params: DecoderParams) -> None:
    if h.ndim < 2 or h.dim[-1] != params.dim:
        raise DimensionMismatch(
            f"Cannot decode, encoder output {h.dim} doesn't match decoder dimension {params.dim}"
        )
