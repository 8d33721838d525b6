import numpy as np
import tripx
from tripx.tensors import Tensor
from tripx.autograd.graph import Node, toposort
from typing import Dict, Tuple, Optional, Union


def backward(
    output: Union[Tuple[Tensor, ...], Tensor],
    grad: Optional[Union[Tuple[Tensor, ...], Tensor]] = None,
) -> None:
    output, grad = _tupify(output), _tupify(grad)
    _validate(output, grad)
    roots = tuple(o.gradfn for o in output)
    gradmap: Dict[Node, Tensor] = {}
    for i, (node, o) in enumerate(zip(roots, output)):
        gradmap[node] = grad[i].to(o.dtype) if i < len(grad) else tripx.oneslike(o)

    for node in toposort(roots):
        nodegrad = gradmap.pop(node, None)
        if nodegrad is None:
            continue
        if node.leaf:
            if node.output.usegrad:
                _accumulate(node.output, nodegrad)
            continue
        for edge, edgegrad in zip(node.edges, node.apply(nodegrad)):
            if edge is None:
                continue
            if edge.output.dim != edgegrad.dim:
                edgegrad = _sumgrad(edge.output, edgegrad)
            if edge in gradmap:
                edgegrad = gradmap[edge] + edgegrad
            gradmap[edge] = edgegrad


def _validate(output: Tuple[Tensor, ...], grad: Tuple[Tensor, ...]) -> None:
    if len(output) != len(set(output)):
        raise ValueError("Cannot run backward, received duplicate output tensors")
    if not all(t.gradfn is not None and t.gradtensor for t in output):
        raise ValueError(
            "Cannot run backward, all tensors must be on computational graph"
        )
    if len(grad) > len(output):
        raise ValueError(
            "Cannot run backward, received more gradients than output tensors"
        )
    for i, o in enumerate(output):
        if i >= len(grad):
            if o.nelem > 1:
                raise ValueError(
                    "Cannot run backward, gradient must be supplied for outputs that are not scalars"
                )
        elif grad[i].dim != o.dim:
            raise ValueError(
                f"Cannot run backward, gradient dimensions {grad[i].dim} differ from output dimensions {o.dim}"
            )


def _tupify(input: Optional[Union[Tuple[Tensor, ...], Tensor]]) -> Tuple[Tensor, ...]:
    if input is None:
        return ()
    if isinstance(input, Tensor):
        return (input,)
    return tuple(input)


def _sumgrad(tensor: Tensor, grad: Tensor) -> Tensor:
    # undo broadcasting: sum over prepended axes, then over stretched ones
    arr = grad.data
    extra = arr.ndim - tensor.ndim
    if extra > 0:
        arr = arr.sum(axis=tuple(range(extra)))
    elif extra < 0:
        arr = np.broadcast_to(arr, tensor.dim).copy()
    stretched = tuple(
        i for i, (have, want) in enumerate(zip(arr.shape, tensor.dim)) if have != want
    )
    if stretched:
        arr = arr.sum(axis=stretched, keepdims=True)
    return tripx.tensor(arr.reshape(tensor.dim))


def _accumulate(tensor: Tensor, grad: Tensor) -> None:
    if tensor.dim != grad.dim:
        raise ValueError(
            f"Cannot accumulate gradient, tensor dimensions do not match gradient dimensions ({tensor.dim} != {grad.dim})"
        )
    data = grad.data.astype(tensor.data.dtype)
    if tensor._grad is None:
        tensor._grad = tripx.tensor(data)
    else:
        tensor._grad = tripx.tensor(tensor._grad.data + data)
