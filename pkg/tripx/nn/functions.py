import numpy as np
from tripx.autograd.function import Function, Context
from tripx.tensors import Tensor
from typing import Optional


class Sigmoid(Function):

    @staticmethod
    def forward(context: Context, x: Tensor):
        context.save(x)
        z = np.exp(-np.abs(x.data))
        arr = np.where(x.data >= 0, 1 / (1 + z), z / (1 + z))
        context.arr = arr
        return arr

    @staticmethod
    def backward(context: Context, grad: Tensor):
        arr = context.arr
        return arr * (1 - arr) * grad.data


class Tanh(Function):

    @staticmethod
    def forward(context: Context, x: Tensor):
        context.save(x)
        arr = np.tanh(x.data)
        context.arr = arr
        return arr

    @staticmethod
    def backward(context: Context, grad: Tensor):
        arr = context.arr
        return (1 - np.square(arr)) * grad.data


class Softmax(Function):

    @staticmethod
    def forward(context: Context, x: Tensor, dim: int):
        context.save(x)
        exp = np.exp(x.data - x.data.max(axis=dim, keepdims=True))
        p = exp / exp.sum(axis=dim, keepdims=True)
        context.p = p
        context.dim = dim
        return p

    @staticmethod
    def backward(context: Context, grad: Tensor):
        p = context.p
        inner = (grad.data * p).sum(axis=context.dim, keepdims=True)
        return p * (grad.data - inner)


class Embedding(Function):

    @staticmethod
    def forward(context: Context, x: Tensor, w: Tensor, padid: Optional[int]):
        context.save(w)
        context.xdata = x.data
        context.padid = padid
        mask = np.expand_dims(_keep(x.data, padid), -1)
        return w.data[x.data] * mask

    @staticmethod
    def backward(context: Context, grad: Tensor):
        w = context.tensors()[0]
        xdata = context.xdata
        arr = np.zeros_like(w.data)
        mask = _keep(xdata, context.padid)
        np.add.at(arr, xdata[mask], grad.data[mask])
        return arr


def _keep(ids: np.ndarray, padid: Optional[int]) -> np.ndarray:
    if padid is None:
        return np.ones(ids.shape, dtype=bool)
    return ids != padid


class BinaryCrossEntropy(Function):

    @staticmethod
    def forward(
        context: Context, a: Tensor, y: np.ndarray, weight: np.ndarray, eps: float
    ):
        context.save(a)
        clipped = np.clip(a.data, eps, 1 - eps)
        context.clipped = clipped
        context.inside = (a.data >= eps) & (a.data <= 1 - eps)
        context.y = y
        context.weight = weight
        nll = np.negative(y * np.log(clipped) + (1 - y) * np.log(1 - clipped))
        return np.sum(weight * nll)

    @staticmethod
    def backward(context: Context, grad: Tensor):
        clipped, y = context.clipped, context.y
        arr = np.negative(y) / clipped + (1 - y) / (1 - clipped)
        return context.weight * context.inside * arr * grad.data


class NLLLoss(Function):

    @staticmethod
    def forward(
        context: Context, p: Tensor, y: np.ndarray, weight: np.ndarray, eps: float
    ):
        context.save(p)
        picked = np.take_along_axis(p.data, np.expand_dims(y, -1), axis=-1)[..., 0]
        clipped = np.clip(picked, eps, 1.0)
        context.y = y
        context.clipped = clipped
        context.inside = picked >= eps
        context.weight = weight
        return np.sum(weight * np.negative(np.log(clipped)))

    @staticmethod
    def backward(context: Context, grad: Tensor):
        p = context.tensors()[0]
        arr = np.zeros_like(p.data)
        picked = np.negative(context.weight) * context.inside / context.clipped
        np.put_along_axis(
            arr, np.expand_dims(context.y, -1), np.expand_dims(picked, -1), axis=-1
        )
        return arr * grad.data
