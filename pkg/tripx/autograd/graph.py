import tripx
from tripx.tensors import Tensor
from typing import Iterable, List, Optional, Type, Tuple, Union
from tripx.autograd.function import Function, Context


class Node:

    def __init__(
        self,
        output: Tensor,
        function: Optional[Type[Function]] = None,
        context: Optional[Context] = None,
        edges: Tuple[Optional["Node"], ...] = (),
    ) -> None:
        self._output = output
        self._function = function
        self._context = context
        self._edges = edges

    @property
    def output(self) -> Tensor:
        return self._output

    @property
    def function(self) -> Optional[Type[Function]]:
        return self._function

    @property
    def context(self) -> Optional[Context]:
        return self._context

    @property
    def edges(self) -> Tuple[Optional["Node"], ...]:
        return self._edges

    @property
    def leaf(self) -> bool:
        return self._function is None

    def apply(self, grad: Tensor) -> Tuple[Tensor, ...]:
        if self.leaf or self.context is None:
            raise RuntimeError(f"Cannot apply backward, {self.name()} has no function")
        arr = self.function.backward(self.context, grad)
        if not isinstance(arr, tuple):
            arr = (arr,)
        return tuple(tripx.tensor(a) for a in arr)

    def name(self) -> str:
        if self.leaf:
            return "Accumulate"
        return f"{self.function.name()}Backward"

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.name()})"


def addtograph(output: Tensor, function: Type[Function], context: Context) -> None:
    edges = []
    for t in context.tensors():
        # leaves get an accumulating node the first time they enter a graph
        if t.usegrad and t.leaf and t.gradfn is None:
            t.mutate(gradfn=Node(t))
        edges.append(t.gradfn)
    node = Node(output, function, context, tuple(edges))
    output.mutate(usegrad=True, gradfn=node, leaf=False)


def toposort(roots: Union[Node, Iterable[Node]]) -> Tuple[Node, ...]:
    roots = (roots,) if isinstance(roots, Node) else tuple(roots)
    if any(r is None for r in roots):
        raise ValueError("Cannot sort graph, received a tensor without a node")
    finished: List[Node] = []
    seen = set()
    for root in roots:
        if root in seen:
            continue
        seen.add(root)
        stack = [(root, iter(root.edges))]
        while stack:
            node, edges = stack[-1]
            for edge in edges:
                if edge is not None and edge not in seen:
                    seen.add(edge)
                    stack.append((edge, iter(edge.edges)))
                    break
            else:
                stack.pop()
                finished.append(node)
    # reversed post-order puts every node before the nodes it feeds gradient to
    return tuple(reversed(finished))
