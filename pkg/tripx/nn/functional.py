import numpy as np
import tripx
import tripx.nn.functions as functions
from tripx.tensors import Tensor
from typing import Optional, Tuple, Union

ArrayLike = Union[np.ndarray, Tensor, float]


def linear(x: Tensor, w: Tensor, b: Optional[Tensor] = None) -> Tensor:
    out = tripx.matmul(x, w.transpose())
    if b is not None:
        out = out + b
    return out


def sigmoid(x: Tensor) -> Tensor:
    out = functions.Sigmoid.apply(x)
    return out


def tanh(x: Tensor) -> Tensor:
    out = functions.Tanh.apply(x)
    return out


def softmax(x: Tensor, dim: int = -1) -> Tensor:
    out = functions.Softmax.apply(x, dim)
    return out


def attention(
    q: Tensor,
    k: Tensor,
    v: Tensor,
    mask: Optional[Tensor] = None,
    maskfill: float = -1e9,
) -> Tuple[Tensor, Tensor]:
    norm = 1 / (k.dim[-1] ** 0.5)
    simscore = tripx.matmul(q, k.transpose(-1, -2)) * norm
    if mask is not None:
        # masked keys get a large negative offset, kept off the graph
        offset = np.where(_array(mask).astype(bool), 0.0, maskfill)
        simscore = simscore + tripx.tensor(offset, dtype=simscore.dtype)
    attn = softmax(simscore, -1)
    context = tripx.matmul(attn, v)
    return context, attn


def embedding(x: Tensor, w: Tensor, padid: Optional[int] = None) -> Tensor:
    return functions.Embedding.apply(x, w, padid)


def conv1d(x: Tensor, w: Tensor, b: Optional[Tensor], width: int) -> Tensor:
    if width < 1 or width % 2 == 0:
        raise ValueError(
            f"Cannot convolve, width must be odd and positive, received {width}"
        )
    if x.ndim != 3:
        raise ValueError(
            f"Cannot convolve, expected (batch, length, dim), received {x.ndim}D"
        )
    batch, length, dim = x.dim
    if w.dim[-1] != width * dim:
        raise ValueError(
            f"Cannot convolve, weight expects {w.dim[-1]} inputs but windows hold {width * dim}"
        )
    radius = width // 2
    if not radius:
        return linear(x, w, b)
    pad = tripx.zeros((batch, radius, dim), dtype=x.dtype)
    padded = tripx.concat((pad, x, pad), dim=1)
    windows = [padded[:, offset : offset + length] for offset in range(width)]
    return linear(tripx.concat(windows, dim=-1), w, b)


def binarycrossentropy(
    a: Tensor,
    y: ArrayLike,
    weight: Optional[ArrayLike] = None,
    eps: float = 1e-12,
) -> Tensor:
    y = _array(y).astype(np.float64)
    if y.shape != a.dim:
        raise ValueError(
            f"Cannot compute binary cross-entropy, 'a' and 'y' differ in shape ({a.dim} != {y.shape})"
        )
    weight = _weight(weight, a.dim, a.nelem)
    return functions.BinaryCrossEntropy.apply(a, y, weight, eps)


def nllloss(
    p: Tensor,
    y: ArrayLike,
    weight: Optional[ArrayLike] = None,
    eps: float = 1e-12,
) -> Tensor:
    y = _array(y).astype(np.int64)
    if y.shape != p.dim[:-1]:
        raise ValueError(
            f"Cannot compute negative log-likelihood, targets {y.shape} don't index distributions {p.dim}"
        )
    weight = _weight(weight, y.shape, y.size)
    return functions.NLLLoss.apply(p, y, weight, eps)


def _array(value: ArrayLike) -> np.ndarray:
    if isinstance(value, Tensor):
        return value.data
    return np.asarray(value)


def _weight(weight: Optional[ArrayLike], dim: tuple, nelem: int) -> np.ndarray:
    if weight is None:
        return np.full(dim, 1 / max(nelem, 1))
    return np.broadcast_to(_array(weight).astype(np.float64), dim)
